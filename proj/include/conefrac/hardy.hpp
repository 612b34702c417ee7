#pragma once

// Hardy constant Lambda_{N,s}(C) of a cone from the spherical Rayleigh
// quotient [psi^T (K + c^2 M) psi] / [kappa_s psi^T B_omega psi], c = (N-2s)/2.

#include "conefrac/params.hpp"
#include "conefrac/sphercap.hpp"

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace conefrac {

struct HardyResult {
    double lambda_star = 0.0;
    /// Full dof vector with psi^T B psi = 1, positive on omega.
    Eigen::VectorXd minimizer;
    int mesh_level = 0;  ///< n_t of the mesh used
    int n_theta = 0;
    /// Extrapolation from this level and the level with halved mesh (NaN if not computed).
    double richardson = std::numeric_limits<double>::quiet_NaN();
    /// |Lambda_h - Lambda_{2h}| (NaN if not computed).
    double error_bar = std::numeric_limits<double>::quiet_NaN();
};

/// Smallest eigenvalue of the Schur complement of A = K + c^2 M onto the
/// free equator dofs against kappa_s B. Throws DomainError for an empty omega
/// and NumericalError if A cannot be factored.
HardyResult hardy_constant(const AssembledForms& forms, const ProblemParams& params);

/// hardy_constant on (n_t, n_theta) plus the (n_t/2, n_theta/2) level, with
/// the Richardson value 2 Lambda_h - Lambda_{2h} (first order assumed).
HardyResult hardy_constant_with_estimate(const ProblemParams& params, const SphericalCap& cap, int n_t, int n_theta,
                                         double grading = 2.0);

/// Cap of a symmetric cone with the given arc length, centred at 3 pi / 2.
SphericalCap symmetric_cap(double arc_length);

struct HardyScanRow {
    double arc_length;
    double lambda_star;
    int mesh_level;
    double richardson;
};

struct HardyScan {
    std::vector<HardyScanRow> rows;
    /// Lambda decreases by more than 1e-6 between consecutive rows.
    bool strictly_decreasing = true;
};

struct MeshSpec {
    int n_t = 32;
    int n_theta = 64;
    double grading = 2.0;
};

/// Throws DomainError unless arc lengths are strictly increasing in (0, 2 pi].
HardyScan hardy_scan(const std::vector<double>& arc_lengths, const ProblemParams& params, const MeshSpec& mesh,
                     int threads = 1, bool with_estimate = true);

/// int r^{N+1-2s} |f'|^2 dr / int r^{N-1-2s} f^2 dr on the grid r (increasing),
/// trapezoidal rule with f' from divided differences. Throws DomainError for a
/// zero denominator or mismatched sizes.
double radial_hardy_quotient(const std::vector<double>& r, const std::vector<double>& f, const ProblemParams& params);

}  // namespace conefrac
