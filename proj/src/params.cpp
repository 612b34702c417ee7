#include "conefrac/params.hpp"

#include "conefrac/error.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace conefrac {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeff = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

double lanczos_gamma(double x) {
    if (x < 0.5) {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
    }
    x -= 1.0;
    double a = kLanczosCoeff[0];
    const double t = x + kLanczosG + 0.5;
    for (std::size_t i = 1; i < kLanczosCoeff.size(); ++i) a += kLanczosCoeff[i] / (x + static_cast<double>(i));
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double kappa_s(double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("kappa_s: s must lie in (0,1), got " + std::to_string(s));
    return lanczos_gamma(1.0 - s) / (std::pow(2.0, 2.0 * s - 1.0) * lanczos_gamma(s));
}

ProblemParams::ProblemParams(int N, double s, double lambda, double p)
    : N_(N), s_(s), lambda_(lambda), p_(p), kappa_(0.0) {
    if (N < 2) throw DomainError("ProblemParams: N must be >= 2");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("ProblemParams: s must lie in (0,1)");
    if (!std::isfinite(lambda)) throw DomainError("ProblemParams: lambda must be finite");
    if (!(p > N / (2.0 * s))) throw DomainError("ProblemParams: p must exceed N/(2s)");
    kappa_ = kappa_s(s);
}

ProblemParams::ProblemParams(int N, double s, double lambda)
    : ProblemParams(N, s, lambda, (s > 0.0 && s < 1.0) ? default_p(N, s) : 0.0) {}

ProblemParams ProblemParams::with_lambda(double lambda) const { return ProblemParams(N_, s_, lambda, p_); }

double gamma_from_mu(double mu, const ProblemParams& params) {
    const double c = params.half_gap();
    double radicand = c * c + mu;
    if (radicand < -1e-12) {
        throw DomainError("gamma_from_mu: mu = " + std::to_string(mu) + " lies below -((N-2s)/2)^2");
    }
    if (radicand < 0.0) radicand = 0.0;
    return std::sqrt(radicand) - c;
}

double mu_from_gamma(double gamma, const ProblemParams& params) {
    const double c = params.half_gap();
    if (gamma < -c - 1e-12) throw DomainError("mu_from_gamma: gamma below -(N-2s)/2");
    return gamma * (gamma + 2.0 * c);
}

double hardy_constant_full_space(const ProblemParams& params) {
    const double N = params.N();
    const double s = params.s();
    const double ratio = lanczos_gamma((N + 2.0 * s) / 4.0) / lanczos_gamma((N - 2.0 * s) / 4.0);
    return std::pow(2.0, 2.0 * s) * ratio * ratio;
}

OrderEigenPairing OrderEigenPairing::from_mu(double mu, const ProblemParams& params) {
    return {mu, gamma_from_mu(mu, params), params.N(), params.s()};
}

OrderEigenPairing OrderEigenPairing::from_gamma(double gamma, const ProblemParams& params) {
    return {mu_from_gamma(gamma, params), gamma, params.N(), params.s()};
}

}  // namespace conefrac
