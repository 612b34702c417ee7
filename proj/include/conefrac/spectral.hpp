#pragma once

// Eigenpairs of the weighted spherical problem
//   (K - lambda kappa_s B_omega) psi = mu M psi
// on the retained dofs of a hemisphere mesh, plus a one-dimensional
// separated-variables oracle for the full circle.

#include "conefrac/cones.hpp"
#include "conefrac/params.hpp"
#include "conefrac/sphercap.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace conefrac {

struct EigenOptions {
    /// Solve even when lambda >= Lambda_num; the result then carries a warning.
    bool allow_inadmissible = false;
    /// Known Hardy constant of the cap on this mesh. NaN: computed on demand when lambda > 0.
    double hardy_limit = std::numeric_limits<double>::quiet_NaN();
    /// Eigenvalues within group_tolerance (1 + |mu|) of their predecessor share a group.
    double group_tolerance = 1e-6;
    /// Bound on ||x - (mu - sigma) (A - sigma M)^{-1} M x||_M for the iterative
    /// solver. A residual that stagnates below 1e3 times this bound for ten
    /// iterations is accepted as the round-off floor.
    double residual_tolerance = 1e-9;
    /// Retained dof count up to which the dense generalized solver is used.
    int dense_limit = 1500;
    int max_iterations = 500;
    unsigned long long seed = 0x5eed5eedULL;
};

/// Eigenpairs sorted ascending; psi are full dof vectors (zero on Dirichlet
/// dofs) normalized by psi^T M psi = 1. Indices are zero based.
struct EigenSystem {
    ProblemParams params;
    std::shared_ptr<const AssembledForms> forms;
    std::vector<double> mu;
    std::vector<double> gamma;  ///< NaN where mu lies below the spectrum floor
    std::vector<Eigen::VectorXd> psi;
    std::vector<int> group;  ///< multiplicity group id, starting at 1
    std::vector<std::string> warnings;
    std::string method;
    double max_residual = 0.0;

    int size() const { return static_cast<int>(mu.size()); }
    /// Indices sharing the group of index j.
    std::vector<int> group_members(int j) const;
    const HemisphereMesh& mesh() const { return forms->mesh; }
};

/// k smallest eigenpairs. Throws DomainError for k < 1 or when lambda is not
/// below the Hardy constant of the cap (unless allow_inadmissible), and
/// NumericalError when the iteration stalls (the message reports the residual).
EigenSystem solve_eigs(std::shared_ptr<const AssembledForms> forms, const ProblemParams& params, int k,
                       const EigenOptions& options = {});
EigenSystem solve_eigs(const AssembledForms& forms, const ProblemParams& params, int k,
                       const EigenOptions& options = {});

/// Eigenvalues, ascending, of the separated problem on (0, pi/2) for the
/// azimuthal index k of the full circle: P1 elements on n_t graded cells,
/// Robin term -kappa_s lambda f(0)^2 at the equator, f(pi/2) = 0 for k >= 1.
std::vector<double> oracle_full_circle_1d(const ProblemParams& params, int k, int n_t, double grading = 2.0);

/// Phi_j(z) = |z|^{gamma_j} psi_j(z / |z|) with psi_j interpolated on the
/// mesh; j is one based. Throws DomainError for j out of range.
std::function<double(const Point3&)> homogeneous_profile(const EigenSystem& es, int j);

/// Spherical coordinates (t, theta) of a nonzero point of the closed upper half space.
std::pair<double, double> sphere_coordinates(const Point3& z);

}  // namespace conefrac
