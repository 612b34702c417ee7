#include "conefrac/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <vector>

namespace conefrac {

namespace {

enum class Kind { number, variable, neg, add, sub, mul, div, pow, func };
enum class Func { sin, cos, exp, log, abs, sgn };

const char* func_name(Func f) {
    switch (f) {
        case Func::sin: return "sin";
        case Func::cos: return "cos";
        case Func::exp: return "exp";
        case Func::log: return "log";
        case Func::abs: return "abs";
        case Func::sgn: return "sgn";
    }
    return "?";
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

struct Expression::Node {
    Kind kind = Kind::number;
    double value = 0.0;
    Variable var = Variable::x1;
    Func func = Func::sin;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr num(double v) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::number;
    n->value = v;
    return n;
}

NodePtr var(Variable v) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::variable;
    n->var = v;
    return n;
}

NodePtr unary(Kind k, NodePtr a) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->a = std::move(a);
    return n;
}

NodePtr binary(Kind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr call(Func f, NodePtr a) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::func;
    n->func = f;
    n->a = std::move(a);
    return n;
}

bool is_num(const NodePtr& n, double v) { return n->kind == Kind::number && n->value == v; }

// ------------------------------------------------------------------ parser

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    NodePtr parse() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
        NodePtr n = sum();
        skip();
        if (pos_ < s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << what << " at position " << pos_ << " in \"" << s_ << "\"";
        throw ParseError(os.str(), pos_);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' but the input ended");
            fail(std::string("expected '") + c + "'");
        }
    }

    NodePtr sum() {
        NodePtr n = product();
        for (;;) {
            if (accept('+')) n = binary(Kind::add, n, product());
            else if (accept('-')) n = binary(Kind::sub, n, product());
            else return n;
        }
    }

    NodePtr product() {
        NodePtr n = unary_expr();
        for (;;) {
            if (accept('*')) n = binary(Kind::mul, n, unary_expr());
            else if (accept('/')) n = binary(Kind::div, n, unary_expr());
            else return n;
        }
    }

    NodePtr unary_expr() {
        if (accept('-')) return unary(Kind::neg, unary_expr());
        if (accept('+')) return unary_expr();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return binary(Kind::pow, base, unary_expr());
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("expected a number, variable or '(' but the input ended");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (accept('(')) {
            NodePtr n = sum();
            expect(')');
            return n;
        }
        fail(std::string("unexpected '") + c + "'");
    }

    NodePtr number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return num(v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        const std::string id = s_.substr(start, pos_ - start);
        for (int v = 0; v < variable_count; ++v)
            if (id == variable_name(static_cast<Variable>(v))) return var(static_cast<Variable>(v));
        if (id == "pi") return num(std::numbers::pi);
        if (id == "e") return num(std::numbers::e);
        static const std::pair<const char*, Func> unary_funcs[] = {
            {"sin", Func::sin}, {"cos", Func::cos}, {"exp", Func::exp}, {"log", Func::log}, {"abs", Func::abs}};
        for (const auto& [name, f] : unary_funcs) {
            if (id == name) {
                expect('(');
                NodePtr arg = sum();
                expect(')');
                return call(f, arg);
            }
        }
        if (id == "pow") {
            expect('(');
            NodePtr a = sum();
            expect(',');
            NodePtr b = sum();
            expect(')');
            return binary(Kind::pow, a, b);
        }
        pos_ = start;
        fail("unknown identifier '" + id + "' (variables: x1, x2, r, theta, t)");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

// ------------------------------------------------------------------ evaluation

struct EvalContext {
    const Bindings& b;
    const Expression::Node* root;
};

std::string print(const NodePtr& n);

[[noreturn]] void eval_fail(const EvalContext& ctx, const std::string& what) {
    std::ostringstream os;
    os << what << " while evaluating " << print(std::shared_ptr<const Expression::Node>(ctx.root, [](auto*) {}))
       << " at " << ctx.b.to_string();
    throw DomainError(os.str());
}

double eval(const Expression::Node& n, const EvalContext& ctx) {
    switch (n.kind) {
        case Kind::number: return n.value;
        case Kind::variable: return ctx.b[n.var];
        case Kind::neg: return -eval(*n.a, ctx);
        case Kind::add: return eval(*n.a, ctx) + eval(*n.b, ctx);
        case Kind::sub: return eval(*n.a, ctx) - eval(*n.b, ctx);
        case Kind::mul: return eval(*n.a, ctx) * eval(*n.b, ctx);
        case Kind::div: {
            const double num_v = eval(*n.a, ctx);
            const double den = eval(*n.b, ctx);
            if (den == 0.0) eval_fail(ctx, "division by zero in " + print(std::shared_ptr<const Expression::Node>(&n, [](auto*) {})));
            return num_v / den;
        }
        case Kind::pow: {
            const double base = eval(*n.a, ctx);
            const double ex = eval(*n.b, ctx);
            if (base == 0.0 && ex < 0.0) eval_fail(ctx, "zero raised to a negative power");
            const double v = std::pow(base, ex);
            if (std::isnan(v)) eval_fail(ctx, "negative base with non-integer exponent");
            return v;
        }
        case Kind::func: {
            const double x = eval(*n.a, ctx);
            switch (n.func) {
                case Func::sin: return std::sin(x);
                case Func::cos: return std::cos(x);
                case Func::exp: return std::exp(x);
                case Func::log:
                    if (!(x > 0.0)) eval_fail(ctx, "logarithm of a non-positive number");
                    return std::log(x);
                case Func::abs: return std::abs(x);
                case Func::sgn: return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
            }
        }
    }
    return 0.0;
}

// ------------------------------------------------------------------ printing

std::string print(const NodePtr& n) {
    switch (n->kind) {
        case Kind::number: return n->value < 0.0 ? "(" + format_number(n->value) + ")" : format_number(n->value);
        case Kind::variable: return variable_name(n->var);
        case Kind::neg: return "(-" + print(n->a) + ")";
        case Kind::add: return "(" + print(n->a) + " + " + print(n->b) + ")";
        case Kind::sub: return "(" + print(n->a) + " - " + print(n->b) + ")";
        case Kind::mul: return "(" + print(n->a) + " * " + print(n->b) + ")";
        case Kind::div: return "(" + print(n->a) + " / " + print(n->b) + ")";
        case Kind::pow: return "(" + print(n->a) + " ^ " + print(n->b) + ")";
        case Kind::func: return std::string(func_name(n->func)) + "(" + print(n->a) + ")";
    }
    return "";
}

// ------------------------------------------------------------------ simplification

NodePtr simplify(const NodePtr& n) {
    if (n->kind == Kind::number || n->kind == Kind::variable) return n;
    NodePtr a = n->a ? simplify(n->a) : nullptr;
    NodePtr b = n->b ? simplify(n->b) : nullptr;
    const bool ca = a && a->kind == Kind::number;
    const bool cb = !b || b->kind == Kind::number;
    if (ca && cb) {
        auto tmp = std::make_shared<Expression::Node>(*n);
        tmp->a = a;
        tmp->b = b;
        const Bindings none;
        const EvalContext ctx{none, tmp.get()};
        try {
            const double v = eval(*tmp, ctx);
            if (std::isfinite(v)) return num(v);
        } catch (const DomainError&) {
            // leave the subtree intact so evaluation reports the problem
        }
    }
    switch (n->kind) {
        case Kind::neg:
            if (a->kind == Kind::neg) return a->a;
            return unary(Kind::neg, a);
        case Kind::add:
            if (is_num(a, 0.0)) return b;
            if (is_num(b, 0.0)) return a;
            return binary(Kind::add, a, b);
        case Kind::sub:
            if (is_num(b, 0.0)) return a;
            if (is_num(a, 0.0)) return unary(Kind::neg, b);
            return binary(Kind::sub, a, b);
        case Kind::mul:
            if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0);
            if (is_num(a, 1.0)) return b;
            if (is_num(b, 1.0)) return a;
            return binary(Kind::mul, a, b);
        case Kind::div:
            if (is_num(a, 0.0) && !is_num(b, 0.0)) return num(0.0);
            if (is_num(b, 1.0)) return a;
            return binary(Kind::div, a, b);
        case Kind::pow:
            if (is_num(b, 0.0)) return num(1.0);
            if (is_num(b, 1.0)) return a;
            return binary(Kind::pow, a, b);
        case Kind::func: {
            auto f = std::make_shared<Expression::Node>(*n);
            f->a = a;
            return f;
        }
        default: return n;
    }
}

// ------------------------------------------------------------------ differentiation

NodePtr diff(const NodePtr& n, Variable v) {
    switch (n->kind) {
        case Kind::number: return num(0.0);
        case Kind::variable: return num(n->var == v ? 1.0 : 0.0);
        case Kind::neg: return unary(Kind::neg, diff(n->a, v));
        case Kind::add: return binary(Kind::add, diff(n->a, v), diff(n->b, v));
        case Kind::sub: return binary(Kind::sub, diff(n->a, v), diff(n->b, v));
        case Kind::mul:
            return binary(Kind::add, binary(Kind::mul, diff(n->a, v), n->b), binary(Kind::mul, n->a, diff(n->b, v)));
        case Kind::div: {
            // (a' b - a b') / b^2
            NodePtr top = binary(Kind::sub, binary(Kind::mul, diff(n->a, v), n->b), binary(Kind::mul, n->a, diff(n->b, v)));
            return binary(Kind::div, top, binary(Kind::mul, n->b, n->b));
        }
        case Kind::pow: {
            NodePtr db = simplify(diff(n->b, v));
            if (is_num(db, 0.0)) {
                // b a^(b-1) a'
                return binary(Kind::mul, binary(Kind::mul, n->b, binary(Kind::pow, n->a, binary(Kind::sub, n->b, num(1.0)))),
                              diff(n->a, v));
            }
            // a^b (b' log a + b a' / a)
            NodePtr inner = binary(Kind::add, binary(Kind::mul, db, call(Func::log, n->a)),
                                   binary(Kind::div, binary(Kind::mul, n->b, diff(n->a, v)), n->a));
            return binary(Kind::mul, n, inner);
        }
        case Kind::func: {
            NodePtr da = diff(n->a, v);
            switch (n->func) {
                case Func::sin: return binary(Kind::mul, call(Func::cos, n->a), da);
                case Func::cos: return unary(Kind::neg, binary(Kind::mul, call(Func::sin, n->a), da));
                case Func::exp: return binary(Kind::mul, n, da);
                case Func::log: return binary(Kind::div, da, n->a);
                case Func::abs: return binary(Kind::mul, call(Func::sgn, n->a), da);
                case Func::sgn: return num(0.0);
            }
        }
    }
    return num(0.0);
}

bool uses_var(const NodePtr& n, Variable v) {
    if (!n) return false;
    if (n->kind == Kind::variable) return n->var == v;
    return uses_var(n->a, v) || uses_var(n->b, v);
}

}  // namespace

// ------------------------------------------------------------------ public API

const char* variable_name(Variable v) {
    switch (v) {
        case Variable::x1: return "x1";
        case Variable::x2: return "x2";
        case Variable::r: return "r";
        case Variable::theta: return "theta";
        case Variable::t: return "t";
    }
    return "?";
}

Bindings Bindings::thin(double x1, double x2) {
    Bindings b;
    b[Variable::x1] = x1;
    b[Variable::x2] = x2;
    b[Variable::r] = std::hypot(x1, x2);
    double th = std::atan2(x2, x1);
    if (th < 0.0) th += 2.0 * std::numbers::pi;
    b[Variable::theta] = th;
    b[Variable::t] = 0.0;
    return b;
}

Bindings Bindings::sphere(double t, double theta) {
    Bindings b;
    b[Variable::x1] = std::cos(t) * std::cos(theta);
    b[Variable::x2] = std::cos(t) * std::sin(theta);
    b[Variable::r] = 1.0;
    b[Variable::theta] = theta;
    b[Variable::t] = t;
    return b;
}

std::string Bindings::to_string() const {
    std::ostringstream os;
    os.precision(17);
    for (int v = 0; v < variable_count; ++v) {
        if (v) os << ", ";
        os << variable_name(static_cast<Variable>(v)) << "=" << values[v];
    }
    return os.str();
}

ParseError::ParseError(const std::string& message, std::size_t position)
    : ConfigError(message), position_(position) {}

Expression::Expression() : root_(num(0.0)) {}

Expression Expression::parse(const std::string& text) { return Expression(Parser(text).parse()); }

Expression Expression::constant(double c) { return Expression(num(c)); }

double Expression::evaluate(const Bindings& b) const {
    const EvalContext ctx{b, root_.get()};
    const double v = eval(*root_, ctx);
    if (!std::isfinite(v)) eval_fail(ctx, "non-finite result");
    return v;
}

std::string Expression::to_string() const { return print(root_); }

Expression Expression::derivative(Variable v) const { return Expression(simplify(diff(root_, v))); }

bool Expression::uses(Variable v) const { return uses_var(root_, v); }

bool Expression::is_constant() const { return simplify(root_)->kind == Kind::number; }

Expression Expression::simplified() const { return Expression(simplify(root_)); }

Perturbation perturbation_from_expression(const Expression& e, const std::string& text) {
    if (e.uses(Variable::t)) throw ConfigError("h must be a function on the thin space; it may not use t");
    const Expression h = e.simplified();
    if (h.is_constant()) {
        Perturbation p = Perturbation::constant(h.evaluate(Bindings{}));
        p.description = text;
        return p;
    }
    const Expression d1 = h.derivative(Variable::x1);
    const Expression d2 = h.derivative(Variable::x2);
    const Expression dr = h.derivative(Variable::r);
    Perturbation p;
    p.is_zero = false;
    p.description = text;
    p.value = [h](double x1, double x2) { return h.evaluate(Bindings::thin(x1, x2)); };
    p.radial_moment = [d1, d2, dr](double x1, double x2) {
        const Bindings b = Bindings::thin(x1, x2);
        double m = x1 * d1.evaluate(b) + x2 * d2.evaluate(b);
        if (b[Variable::r] > 0.0) m += b[Variable::r] * dr.evaluate(b);
        return m;
    };
    return p;
}

}  // namespace conefrac
