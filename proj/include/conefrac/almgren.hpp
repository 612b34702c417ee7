#pragma once

// Almgren frequency machinery for scalar fields on the half ball (N = 2):
// H(r), D(r), N(r) = D/H, the identity H' = 2D/r, blow-up rescalings,
// Fourier coefficients on the spherical eigenbasis, the beta_j formula and
// Pohozaev diagnostics.

#include "conefrac/field.hpp"
#include "conefrac/params.hpp"
#include "conefrac/spectral.hpp"

#include <memory>
#include <string>
#include <vector>

namespace conefrac {

/// r^{2s-N-1} int_{d+ B_r^+} t^{1-2s} U^2 dS. Throws NumericalError if H <= 0.
double compute_H(const ScalarField& field, double r);

/// r^{2s-N} (int_{B_r^+} t^{1-2s}|grad U|^2 - kappa_s int_{B'_r} (h + lambda|x|^{-2s}) |Tr U|^2).
double compute_D(const ScalarField& field, double r, const ProblemParams& params, const Perturbation& h);

/// Geometric radii from r_lo to R0.
std::vector<double> default_radii(double R0 = 0.8, int count = 40, double r_lo = 1e-2);

struct FrequencyTrace {
    std::vector<double> radii;
    std::vector<double> H;
    std::vector<double> D;
    std::vector<double> Ncal;
    double R0 = 0.8;
    double gamma_hat = 0.0;
    double gamma_error = 0.0;  ///< |gamma_hat - N(r_1)|, or a wide bar on fallback
    double delta = 0.0;        ///< remainder exponent used by the fit
    std::string fit_model;     ///< "constant", "free-delta", "fixed-delta" or "fallback"
};

/// Evaluates N on the radii (default grid when empty) and fits N ~ gamma + c r^delta
/// on the smallest half: delta = 2s - N/p when h != 0, delta free when h = 0.
FrequencyTrace frequency_trace(const ScalarField& field, const ProblemParams& params, const Perturbation& h,
                               std::vector<double> radii = {}, double R0 = 0.8);

/// |H'(r) - 2 D(r)/r| / |H'(r)| with a fourth-order central difference for H'.
/// Both sides below 1e-10 H(r)/r count as agreement (residual 0).
double check_H_prime_identity(const ScalarField& field, const ProblemParams& params, const Perturbation& h, double r);

/// w^tau(z) = U(tau z) / sqrt(H(tau)).
struct BlowupSnapshot {
    double tau = 0.0;
    double H_tau = 0.0;
    Eigen::VectorXd w;  ///< values of w^tau on the unit sphere
    double boundary_norm = 0.0;  ///< int_{d+ B_1^+} t^{1-2s} |w|^2
    std::shared_ptr<ScaledField> field;
};

BlowupSnapshot blowup(std::shared_ptr<const ScalarField> field, double tau);

/// Coefficients psi_j^T M w for every mode of es.
std::vector<double> blowup_projections(const BlowupSnapshot& snap, const EigenSystem& es);

/// Norm of the part of w^tau on the unit sphere orthogonal to the group of
/// mode j0 (one based): sqrt(max(0, |w|^2 - sum over the group of c_j^2)).
double off_group_projection(const BlowupSnapshot& snap, const EigenSystem& es, int j0);

struct DominantGroup {
    int j0 = 1;          ///< smallest one-based index of the group
    double weight = 0.0; ///< squared projection onto the group
    bool tie = false;    ///< another group within 1e-8
};

DominantGroup dominant_group(const BlowupSnapshot& snap, const EigenSystem& es);

struct FourierTrace {
    std::vector<double> taus;
    std::vector<int> modes;  ///< one based
    std::vector<std::vector<double>> phi;      ///< phi[m][i]
    std::vector<std::vector<double>> upsilon;  ///< upsilon[m][i]
    std::vector<double> H;
    /// Upsilon_j accumulates from this radius (0 for fields defined down to the vertex).
    double inner_radius = 0.0;
    double s = 0.0;
    int N = 2;
};

/// phi_j(tau) = int_{S^2_+} w U(tau theta) psi_j, Upsilon_j(tau) =
/// kappa_s int_{B'_tau} h Tr U Tr psi_j(x/|x|) dx for j = 1..J (J = 0: all).
/// Throws DomainError when es was computed on another mesh, s or lambda.
FourierTrace fourier_coeffs(const ScalarField& field, const EigenSystem& es, const std::vector<double>& taus,
                            const ProblemParams& params, const Perturbation& h, int J = 0);

/// zeta_j(tau_i) = tau^{2s-N-1} Upsilon_j'(tau_i) by divided differences.
std::vector<double> fourier_zeta(const FourierTrace& ft, int m);

/// beta_j for every mode of ft at reference radius R; phi_j(R) interpolated
/// log-log when R is not a grid point. Throws NumericalError when the tail
/// integral near 0 diverges.
std::vector<double> beta_coefficients(const FourierTrace& ft, double gamma, double R, const ProblemParams& params);

struct PohozaevResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
    double identity_lhs = 0.0;  ///< energy minus trace terms on B_r^+
    double identity_rhs = 0.0;  ///< int t^{1-2s} U dU/dnu on the spherical part
    double identity_residual = 0.0;
};

/// Both sides of the Pohozaev inequality at radius r and the residual of the
/// energy identity. satisfied: lhs >= rhs - tol (|lhs| + |rhs|).
PohozaevResult pohozaev_check(const ScalarField& field, const ProblemParams& params, const Perturbation& h, double r,
                              double tol = 1e-6);

}  // namespace conefrac
