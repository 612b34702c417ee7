#pragma once

// Run configuration: an INI document with the sections [params], [cone],
// [mesh], [task] and [expressions]. Every key is typed and validated before a
// run starts; all violations are reported together.

#include "conefrac/cones.hpp"
#include "conefrac/expression.hpp"
#include "conefrac/params.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace conefrac {

const std::vector<std::string>& task_names();

struct RunConfig {
    // [params]
    int N = 2;
    double s = 0.5;
    double lambda = 0.0;
    std::optional<double> p;
    bool allow_inadmissible = false;

    // [cone]
    std::string preset = "half";  // full | half | custom
    double g_plus = 0.0;
    double g_minus = 0.0;

    // [mesh]
    int nt = 32;
    int ntheta = 64;
    double grading = 2.0;
    int nr = 48;
    double rmin = 1e-3;

    // [task]
    std::string task;  // set from the command line unless given as task.name
    int k = 8;
    std::vector<double> arcs;  // scan; default pi/2, pi, 3pi/2, 2pi
    std::string field = "manufactured";  // frequency: manufactured | solve
    std::vector<std::pair<int, double>> modes{{1, 1.0}, {2, 0.2}};
    double R0 = 0.8;
    int radii = 40;
    double r_lo = 1e-2;
    std::vector<double> beta_R{0.3, 0.5, 0.7};
    double tau = 1e-2;
    int n = 12;
    int samples = 1000;
    double tolerance = 1e-10;

    // [expressions]
    std::string h_text = "0";
    std::string lid_text = "psi1";
    Expression h;
    std::optional<Expression> lid;  // empty when lid = psi1

    ProblemParams params() const;
    SphericalCap cap() const;
    /// Cone profile; nullopt for the full-plane preset.
    std::optional<ConeProfile> cone() const;
    Perturbation perturbation() const;

    /// Sorted key = value listing of every resolved setting.
    std::string canonical() const;
    /// FNV-1a 64-bit hash of canonical().
    std::uint64_t hash() const;
};

/// Parses and validates. Throws ConfigError listing every violation. When
/// check_admissibility is set and lambda > 0, a coarse Hardy pass rejects
/// lambda >= Lambda unless allow_inadmissible is true.
RunConfig parse_config(const std::string& text, const std::string& task = "", bool check_admissibility = true);

RunConfig load_config(const std::string& path, const std::string& task = "", bool check_admissibility = true);

/// Classic edit distance, used for key suggestions.
std::size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace conefrac
