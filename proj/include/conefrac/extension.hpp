#pragma once

// Finite element solver for the localized extension problem on the upper half
// ball (N = 2): div(t^{1-2s} grad U) = 0, weighted Neumann condition with
// coefficient kappa_s (h + lambda |x|^{-2s}) on the cap, U = 0 on the rest of
// the thin ball and prescribed values on the spherical lid.

#include "conefrac/field.hpp"
#include "conefrac/params.hpp"
#include "conefrac/spectral.hpp"

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace conefrac {

/// Shells r_k = r_min q^k, k = 0..n_r-1, with r_{n_r-1} = 1, over an angular mesh.
struct HalfBallGrid {
    std::shared_ptr<const AssembledForms> forms;
    std::vector<double> radii;

    double r_min() const { return radii.front(); }
    int n_r() const { return static_cast<int>(radii.size()); }
    double ratio() const { return radii[1] / radii[0]; }
};

/// Throws DomainError unless n_r >= 3 and 0 < r_min < 1.
HalfBallGrid make_half_ball_grid(std::shared_ptr<const AssembledForms> forms, int n_r, double r_min = 1e-3);

struct ExtensionOptions {
    double tolerance = 1e-10;  ///< relative residual of the conjugate gradient solve
    int max_iterations = 50000;
    /// Eigensystem used for the inner boundary when h = 0: the lid data is
    /// projected onto its modes and each mode is scaled by r_min^{gamma_j}.
    /// Without it (or when h != 0) the inner sphere carries the natural condition.
    const EigenSystem* modes = nullptr;
    /// Known Hardy constant of the cap on this mesh; NaN computes it when lambda > 0.
    double hardy_limit = std::numeric_limits<double>::quiet_NaN();
};

struct ExtensionResult {
    std::shared_ptr<GridField> field;
    int iterations = 0;
    double residual = 0.0;
    std::string inner_condition;  ///< "dirichlet-modal" or "neumann"
};

/// lid: full dof vector on the angular mesh (its values at Dirichlet equator
/// nodes are replaced by zero). Throws DomainError for lambda >= Lambda_num
/// and NumericalError if conjugate gradients do not converge.
ExtensionResult solve_extension(const HalfBallGrid& grid, const ProblemParams& params, const Perturbation& h,
                                const Eigen::VectorXd& lid, const ExtensionOptions& options = {});

/// Header of the flat binary field layout (see README).
struct FieldFileHeader {
    int N = 2;
    int n_r = 0;
    int n_t = 0;
    int n_theta = 0;
    double s = 0.0;
    double lambda = 0.0;
    double r_min = 0.0;
    double grading = 0.0;
    double cap_start = 0.0;
    double cap_length = 0.0;
};

void write_field(const std::string& path, const GridField& field, const ProblemParams& params);

struct LoadedField {
    FieldFileHeader header;
    std::shared_ptr<GridField> field;
};

/// Throws Error on a malformed or truncated file.
LoadedField read_field(const std::string& path);

}  // namespace conefrac
