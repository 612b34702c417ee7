#pragma once

// Arithmetic expressions over the variables x1, x2, r, theta, t, used for the
// perturbation h and for lid data in run configurations.
//
// Grammar (lowest to highest precedence):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?        right associative
//   primary := number | variable | func '(' args ')' | '(' sum ')'
// Functions: sin cos exp log abs (one argument), pow (two arguments).
// Constants: pi, e.

#include "conefrac/error.hpp"
#include "conefrac/field.hpp"

#include <array>
#include <memory>
#include <string>

namespace conefrac {

enum class Variable { x1 = 0, x2, r, theta, t };

constexpr int variable_count = 5;

const char* variable_name(Variable v);

/// Values for every variable; unused ones are ignored.
struct Bindings {
    std::array<double, variable_count> values{};

    double& operator[](Variable v) { return values[static_cast<int>(v)]; }
    double operator[](Variable v) const { return values[static_cast<int>(v)]; }

    /// Thin-space point: r = |x|, theta = atan2(x2, x1) in [0, 2 pi), t = 0.
    static Bindings thin(double x1, double x2);
    /// Point of the unit hemisphere with polar height t and azimuth theta.
    static Bindings sphere(double t, double theta);

    std::string to_string() const;
};

/// Raised for malformed text; position() is the 0-based character offset.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& message, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class Expression {
public:
    struct Node;

    /// The constant 0.
    Expression();

    static Expression parse(const std::string& text);
    static Expression constant(double c);

    /// Throws DomainError on division by zero, log of a non-positive number or
    /// a non-finite result, quoting the bindings.
    double evaluate(const Bindings& b) const;

    /// Fully parenthesized form that parses back to the same tree.
    std::string to_string() const;

    /// Partial derivative treating the five variables as independent.
    Expression derivative(Variable v) const;

    bool uses(Variable v) const;
    bool is_constant() const;
    /// Folds constant subtrees.
    Expression simplified() const;

private:
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

/// h(x1, x2) from an expression over x1, x2, r, theta. The radial moment is
/// x1 h_x1 + x2 h_x2 + r h_r (theta is 0-homogeneous). Rejects expressions using t.
Perturbation perturbation_from_expression(const Expression& e, const std::string& text);

}  // namespace conefrac
