#include "conefrac/config.hpp"

#include "conefrac/hardy.hpp"
#include "conefrac/sphercap.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace conefrac {

namespace {

using boost::property_tree::ptree;

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"params", {"N", "s", "lambda", "p", "allow_inadmissible"}},
        {"cone", {"preset", "g_plus", "g_minus"}},
        {"mesh", {"nt", "ntheta", "grading", "nr", "rmin"}},
        {"task",
         {"name", "k", "arcs", "field", "modes", "R0", "radii", "r_lo", "beta_R", "tau", "n", "samples", "tolerance"}},
        {"expressions", {"h", "lid"}},
    };
    return keys;
}

std::string suggestion(const std::string& word, const std::vector<std::string>& candidates) {
    std::string best;
    std::size_t best_d = 3;  // suggest only close matches
    for (const auto& c : candidates) {
        const std::size_t d = edit_distance(word, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best.empty() ? "" : " (did you mean '" + best + "'?)";
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    std::string out = s.substr(b, e - b + 1);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

// Numeric values may be constant expressions such as 3*pi/2.
double constant_value(const std::string& text) {
    const Expression e = Expression::parse(text);
    for (int v = 0; v < variable_count; ++v)
        if (e.uses(static_cast<Variable>(v)))
            throw ConfigError(std::string("expected a constant, found variable '") +
                              variable_name(static_cast<Variable>(v)) + "'");
    return e.evaluate(Bindings{});
}

class Reader {
public:
    Reader(const ptree& tree, std::vector<std::string>& errors) : tree_(tree), errors_(errors) {}

    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        const auto sec = tree_.get_child_optional(section);
        if (!sec) return std::nullopt;
        const auto v = sec->get_optional<std::string>(key);
        if (!v) return std::nullopt;
        return trim(*v);
    }

    void real(const std::string& section, const std::string& key, double& out) {
        const auto v = raw(section, key);
        if (!v) return;
        try {
            out = constant_value(*v);
        } catch (const Error& e) {
            errors_.push_back(section + "." + key + ": " + e.what());
        }
    }

    void integer(const std::string& section, const std::string& key, int& out) {
        const auto v = raw(section, key);
        if (!v) return;
        try {
            std::size_t used = 0;
            const long value = std::stol(*v, &used);
            if (used != v->size()) throw std::invalid_argument("trailing characters");
            out = static_cast<int>(value);
        } catch (const std::exception&) {
            errors_.push_back(section + "." + key + ": expected an integer, got '" + *v + "'");
        }
    }

    void boolean(const std::string& section, const std::string& key, bool& out) {
        const auto v = raw(section, key);
        if (!v) return;
        if (*v == "true" || *v == "1" || *v == "yes") out = true;
        else if (*v == "false" || *v == "0" || *v == "no") out = false;
        else errors_.push_back(section + "." + key + ": expected true or false, got '" + *v + "'");
    }

    void text(const std::string& section, const std::string& key, std::string& out) {
        const auto v = raw(section, key);
        if (v) out = *v;
    }

    void reals(const std::string& section, const std::string& key, std::vector<double>& out) {
        const auto v = raw(section, key);
        if (!v) return;
        std::vector<double> values;
        for (const auto& item : split(*v, ',')) {
            try {
                values.push_back(constant_value(item));
            } catch (const Error& e) {
                errors_.push_back(section + "." + key + ": item '" + item + "': " + e.what());
                return;
            }
        }
        out = values;
    }

private:
    const ptree& tree_;
    std::vector<std::string>& errors_;
};

}  // namespace

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names = {"eig", "hardy", "frequency", "solve-ext", "smooth-cone", "scan"};
    return names;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

ProblemParams RunConfig::params() const {
    return p ? ProblemParams(N, s, lambda, *p) : ProblemParams(N, s, lambda);
}

std::optional<ConeProfile> RunConfig::cone() const {
    if (preset == "full") return std::nullopt;
    if (preset == "half") return ConeProfile::half_plane();
    return ConeProfile(g_plus, g_minus);
}

SphericalCap RunConfig::cap() const {
    const auto c = cone();
    return c ? cap_of_cone(*c) : SphericalCap::full_circle();
}

Perturbation RunConfig::perturbation() const { return perturbation_from_expression(h, h_text); }

std::string RunConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["params.N"] = std::to_string(N);
    kv["params.s"] = fmt(s);
    kv["params.lambda"] = fmt(lambda);
    kv["params.p"] = fmt(params().p());
    kv["params.allow_inadmissible"] = allow_inadmissible ? "true" : "false";
    kv["cone.preset"] = preset;
    if (preset == "custom") {
        kv["cone.g_plus"] = fmt(g_plus);
        kv["cone.g_minus"] = fmt(g_minus);
    }
    kv["mesh.nt"] = std::to_string(nt);
    kv["mesh.ntheta"] = std::to_string(ntheta);
    kv["mesh.grading"] = fmt(grading);
    kv["mesh.nr"] = std::to_string(nr);
    kv["mesh.rmin"] = fmt(rmin);
    kv["task.name"] = task;
    kv["task.k"] = std::to_string(k);
    std::string list;
    for (double a : arcs) list += (list.empty() ? "" : ",") + fmt(a);
    kv["task.arcs"] = list;
    kv["task.field"] = field;
    list.clear();
    for (const auto& [j, b] : modes) list += (list.empty() ? "" : ",") + std::to_string(j) + ":" + fmt(b);
    kv["task.modes"] = list;
    kv["task.R0"] = fmt(R0);
    kv["task.radii"] = std::to_string(radii);
    kv["task.r_lo"] = fmt(r_lo);
    list.clear();
    for (double r : beta_R) list += (list.empty() ? "" : ",") + fmt(r);
    kv["task.beta_R"] = list;
    kv["task.tau"] = fmt(tau);
    kv["task.n"] = std::to_string(n);
    kv["task.samples"] = std::to_string(samples);
    kv["task.tolerance"] = fmt(tolerance);
    kv["expressions.h"] = h.to_string();
    kv["expressions.lid"] = lid ? lid->to_string() : "psi1";
    std::string out;
    for (const auto& [key, value] : kv) out += key + " = " + value + "\n";
    return out;
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

RunConfig parse_config(const std::string& text, const std::string& task, bool check_admissibility) {
    ptree tree;
    try {
        std::istringstream is(text);
        boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("malformed config, line " + std::to_string(e.line()) + ": " + e.message());
    }

    std::vector<std::string> errors;
    std::vector<std::string> section_names;
    for (const auto& [name, _] : schema()) section_names.push_back(name);
    for (const auto& [section, child] : tree) {
        const auto it = schema().find(section);
        if (child.empty() && !child.data().empty()) {
            errors.push_back("key '" + section + "' outside of any section");
            continue;
        }
        if (it == schema().end()) {
            errors.push_back("unknown section [" + section + "]" + suggestion(section, section_names));
            continue;
        }
        for (const auto& [key, _] : child) {
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                errors.push_back("unknown key '" + key + "' in [" + section + "]" + suggestion(key, it->second));
        }
    }

    RunConfig c;
    Reader r(tree, errors);
    r.integer("params", "N", c.N);
    r.real("params", "s", c.s);
    r.real("params", "lambda", c.lambda);
    if (r.raw("params", "p")) {
        double p = 0.0;
        r.real("params", "p", p);
        c.p = p;
    }
    r.boolean("params", "allow_inadmissible", c.allow_inadmissible);
    r.text("cone", "preset", c.preset);
    const bool has_g = r.raw("cone", "g_plus") || r.raw("cone", "g_minus");
    if (has_g && !r.raw("cone", "preset")) c.preset = "custom";
    r.real("cone", "g_plus", c.g_plus);
    r.real("cone", "g_minus", c.g_minus);
    r.integer("mesh", "nt", c.nt);
    r.integer("mesh", "ntheta", c.ntheta);
    r.real("mesh", "grading", c.grading);
    r.integer("mesh", "nr", c.nr);
    r.real("mesh", "rmin", c.rmin);

    std::string named;
    r.text("task", "name", named);
    c.task = task.empty() ? named : task;
    if (!task.empty() && !named.empty() && named != task)
        errors.push_back("task.name '" + named + "' disagrees with the requested task '" + task + "'");
    r.integer("task", "k", c.k);
    c.arcs = {std::numbers::pi / 2, std::numbers::pi, 3 * std::numbers::pi / 2, 2 * std::numbers::pi};
    r.reals("task", "arcs", c.arcs);
    r.text("task", "field", c.field);
    if (const auto v = r.raw("task", "modes")) {
        std::vector<std::pair<int, double>> modes;
        bool ok = true;
        for (const auto& item : split(*v, ',')) {
            const auto parts = split(item, ':');
            try {
                if (parts.size() != 2) throw ConfigError("expected j:beta");
                std::size_t used = 0;
                const int j = std::stoi(parts[0], &used);
                if (used != parts[0].size()) throw ConfigError("mode index must be an integer");
                modes.emplace_back(j, constant_value(parts[1]));
            } catch (const std::exception& e) {
                errors.push_back("task.modes: item '" + item + "': " + e.what());
                ok = false;
                break;
            }
        }
        if (ok) c.modes = modes;
    }
    r.real("task", "R0", c.R0);
    r.integer("task", "radii", c.radii);
    r.real("task", "r_lo", c.r_lo);
    r.reals("task", "beta_R", c.beta_R);
    r.real("task", "tau", c.tau);
    r.integer("task", "n", c.n);
    r.integer("task", "samples", c.samples);
    r.real("task", "tolerance", c.tolerance);
    r.text("expressions", "h", c.h_text);
    r.text("expressions", "lid", c.lid_text);

    // Range checks.
    auto require = [&](bool ok, const std::string& message) {
        if (!ok) errors.push_back(message);
    };
    if (!c.task.empty() && std::find(task_names().begin(), task_names().end(), c.task) == task_names().end())
        errors.push_back("unknown task '" + c.task + "'" + suggestion(c.task, task_names()));
    require(c.N == 2, "params.N: only N = 2 is supported by the discretizations, got " + std::to_string(c.N));
    require(c.s > 0.0 && c.s < 1.0, "params.s: must lie in (0, 1), got " + fmt(c.s));
    require(std::isfinite(c.lambda), "params.lambda: must be finite");
    if (c.p && c.N >= 1 && c.s > 0.0)
        require(*c.p > c.N / (2.0 * c.s), "params.p: must exceed N/(2s) = " + fmt(c.N / (2.0 * c.s)) + ", got " + fmt(*c.p));
    require(c.preset == "full" || c.preset == "half" || c.preset == "custom",
            "cone.preset: expected full, half or custom, got '" + c.preset + "'" +
                suggestion(c.preset, {"full", "half", "custom"}));
    if (c.preset != "custom" && has_g) errors.push_back("cone.g_plus/g_minus are only used with preset = custom");
    if (c.preset == "custom") {
        require(std::isfinite(c.g_plus) && std::isfinite(c.g_minus), "cone.g_plus, cone.g_minus: must be finite");
        if (std::isfinite(c.g_plus) && std::isfinite(c.g_minus)) {
            try {
                (void)cap_of_cone(ConeProfile(c.g_plus, c.g_minus));
            } catch (const Error& e) {
                errors.push_back(std::string("cone: ") + e.what());
            }
        }
    }
    require(c.nt >= 4, "mesh.nt: must be at least 4, got " + std::to_string(c.nt));
    require(c.ntheta >= 4, "mesh.ntheta: must be at least 4, got " + std::to_string(c.ntheta));
    require(c.grading >= 1.0, "mesh.grading: must be at least 1, got " + fmt(c.grading));
    require(c.nr >= 3, "mesh.nr: must be at least 3, got " + std::to_string(c.nr));
    require(c.rmin > 0.0 && c.rmin < 1.0, "mesh.rmin: must lie in (0, 1), got " + fmt(c.rmin));
    require(c.k >= 1, "task.k: must be positive, got " + std::to_string(c.k));
    require(!c.arcs.empty(), "task.arcs: at least one arc length is required");
    for (std::size_t i = 0; i < c.arcs.size(); ++i) {
        if (!(c.arcs[i] > 0.0 && c.arcs[i] <= 2.0 * std::numbers::pi + 1e-12))
            errors.push_back("task.arcs: arc length " + fmt(c.arcs[i]) + " outside (0, 2 pi]");
        if (i > 0 && !(c.arcs[i] > c.arcs[i - 1])) errors.push_back("task.arcs: arc lengths must increase strictly");
    }
    require(c.field == "manufactured" || c.field == "solve",
            "task.field: expected manufactured or solve, got '" + c.field + "'");
    require(!c.modes.empty(), "task.modes: at least one mode is required");
    for (const auto& [j, b] : c.modes) {
        if (j < 1) errors.push_back("task.modes: mode index must be >= 1, got " + std::to_string(j));
        if (!std::isfinite(b)) errors.push_back("task.modes: amplitude must be finite");
    }
    require(c.R0 > 0.0 && c.R0 <= 1.0, "task.R0: must lie in (0, 1], got " + fmt(c.R0));
    require(c.radii >= 4, "task.radii: at least 4 radii are required, got " + std::to_string(c.radii));
    require(c.r_lo > 0.0 && c.r_lo < c.R0, "task.r_lo: must lie in (0, R0), got " + fmt(c.r_lo));
    for (double R : c.beta_R)
        if (!(R > 0.0 && R < 1.0)) errors.push_back("task.beta_R: radius " + fmt(R) + " outside (0, 1)");
    require(c.tau > 0.0 && c.tau <= 1.0, "task.tau: must lie in (0, 1], got " + fmt(c.tau));
    require(c.n >= 1, "task.n: must be positive, got " + std::to_string(c.n));
    require(c.samples >= 1, "task.samples: must be positive, got " + std::to_string(c.samples));
    require(c.tolerance > 0.0 && c.tolerance < 1.0, "task.tolerance: must lie in (0, 1), got " + fmt(c.tolerance));

    try {
        c.h = Expression::parse(c.h_text);
        if (c.h.uses(Variable::t)) errors.push_back("expressions.h: h lives on the thin space and may not use t");
    } catch (const ParseError& e) {
        errors.push_back(std::string("expressions.h: ") + e.what());
    }
    if (c.lid_text != "psi1") {
        try {
            c.lid = Expression::parse(c.lid_text);
        } catch (const ParseError& e) {
            errors.push_back(std::string("expressions.lid: ") + e.what());
        }
    }

    if (errors.empty() && check_admissibility && c.lambda > 0.0 && c.task != "smooth-cone" && c.task != "hardy" &&
        c.task != "scan") {
        // Coarse pre-pass; the runs themselves recheck on their own mesh.
        const ProblemParams pp = c.params();
        const HemisphereMesh mesh = build_mesh(24, 48, c.s, c.cap(), c.grading);
        const AssembledForms forms = assemble(mesh, pp);
        const double Lambda = hardy_constant(forms, pp).lambda_star;
        if (c.lambda >= Lambda && !c.allow_inadmissible)
            errors.push_back("params.lambda: " + fmt(c.lambda) + " is not below the Hardy constant of the cap, Lambda = " +
                             fmt(Lambda) + " (24x48 mesh); set allow_inadmissible = true to proceed anyway");
    }

    if (!errors.empty()) {
        std::string message = "invalid configuration (" + std::to_string(errors.size()) + " problem" +
                              (errors.size() == 1 ? "" : "s") + "):";
        for (const auto& e : errors) message += "\n  - " + e;
        throw ConfigError(message);
    }
    return c;
}

RunConfig load_config(const std::string& path, const std::string& task, bool check_admissibility) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), task, check_admissibility);
}

}  // namespace conefrac
