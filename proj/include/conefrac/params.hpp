#pragma once

// Scalar problem parameters and the closed-form maps between spherical
// eigenvalues, vanishing orders and Hardy constants.

namespace conefrac {

/// Gamma function via the Lanczos approximation (g = 7, 9 terms), with the
/// reflection formula below 1/2. Relative error is below 1e-13 on (0, 10].
double lanczos_gamma(double x);

/// kappa_s = Gamma(1-s) / (2^{2s-1} Gamma(s)); the constant of the weighted
/// Neumann condition produced by the extension. Throws DomainError unless 0 < s < 1.
double kappa_s(double s);

/// Immutable parameter set. N is the dimension of the thin space, s the
/// fractional order, lambda the Hardy coefficient and p the integrability
/// exponent of the perturbation h (p > N / (2s)).
class ProblemParams {
public:
    ProblemParams(int N, double s, double lambda, double p);
    /// Uses the default exponent p = 10 N / (2s).
    ProblemParams(int N, double s, double lambda);

    int N() const { return N_; }
    double s() const { return s_; }
    double lambda() const { return lambda_; }
    double p() const { return p_; }
    double kappa() const { return kappa_; }

    /// (N - 2s) / 2; the spectrum of the spherical problem lies above -half_gap()^2.
    double half_gap() const { return 0.5 * (N_ - 2.0 * s_); }
    /// Weight exponent 1 - 2s of the degenerate operator.
    double weight_exponent() const { return 1.0 - 2.0 * s_; }

    /// Copy with a different lambda.
    ProblemParams with_lambda(double lambda) const;

    static double default_p(int N, double s) { return 10.0 * N / (2.0 * s); }

private:
    int N_;
    double s_;
    double lambda_;
    double p_;
    double kappa_;
};

/// gamma = sqrt(((N-2s)/2)^2 + mu) - (N-2s)/2. A radicand that is negative by
/// more than 1e-12 throws DomainError; smaller negative round-off is clamped.
double gamma_from_mu(double mu, const ProblemParams& params);

/// mu = gamma (gamma + N - 2s). Requires gamma >= -(N-2s)/2.
double mu_from_gamma(double gamma, const ProblemParams& params);

/// Best constant of the fractional Hardy inequality on the whole space:
/// 2^{2s} Gamma^2((N+2s)/4) / Gamma^2((N-2s)/4).
double hardy_constant_full_space(const ProblemParams& params);

/// A spherical eigenvalue paired with the vanishing order it induces.
struct OrderEigenPairing {
    double mu;
    double gamma;
    int N;
    double s;

    static OrderEigenPairing from_mu(double mu, const ProblemParams& params);
    static OrderEigenPairing from_gamma(double gamma, const ProblemParams& params);
};

}  // namespace conefrac
