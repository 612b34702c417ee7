#include "conefrac/error.hpp"
#include "conefrac/params.hpp"

#include "doctest.h"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace conefrac;

namespace {

// Independent oracle built on Boost's gamma function.
double kappa_oracle(double s) {
    return boost::math::tgamma(1.0 - s) / (std::pow(2.0, 2.0 * s - 1.0) * boost::math::tgamma(s));
}

double full_space_oracle(int N, double s) {
    const double a = boost::math::tgamma((N + 2.0 * s) / 4.0);
    const double b = boost::math::tgamma((N - 2.0 * s) / 4.0);
    return std::pow(2.0, 2.0 * s) * a * a / (b * b);
}

}  // namespace

TEST_CASE("lanczos gamma against boost on (0, 10]") {
    for (int i = 1; i <= 1000; ++i) {
        const double x = 0.01 * i;
        const double ref = boost::math::tgamma(x);
        CHECK(std::abs(lanczos_gamma(x) - ref) <= 1e-13 * std::abs(ref));
    }
}

TEST_CASE("kappa_s values") {
    CHECK(kappa_s(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kappa_s(0.25) == doctest::Approx(0.47798).epsilon(1e-5));
    CHECK(kappa_s(0.75) == doctest::Approx(2.0922).epsilon(1e-4));
    for (double s : {0.05, 0.25, 0.3, 0.5, 0.7, 0.75, 0.95}) {
        CHECK(std::abs(kappa_s(s) - kappa_oracle(s)) <= 1e-12 * kappa_oracle(s));
        CHECK(ProblemParams(2, s, 0.0).kappa() == kappa_s(s));
    }
    CHECK_THROWS_AS(kappa_s(0.0), DomainError);
    CHECK_THROWS_AS(kappa_s(1.0), DomainError);
    CHECK_THROWS_AS(kappa_s(-0.3), DomainError);
}

TEST_CASE("kappa_s is positive on (0, 1)") {
    for (int i = 1; i < 1000; ++i) CHECK(kappa_s(i / 1000.0) > 0.0);
}

TEST_CASE("ProblemParams validation") {
    CHECK_THROWS_AS(ProblemParams(1, 0.5, 0.0), DomainError);
    CHECK_THROWS_AS(ProblemParams(2, 1.2, 0.0), DomainError);
    CHECK_THROWS_AS(ProblemParams(2, 0.5, 0.0, 1.5), DomainError);  // p must exceed N/(2s) = 2
    const ProblemParams p(2, 0.5, 0.1);
    CHECK(p.p() == doctest::Approx(20.0));
    CHECK(p.half_gap() == doctest::Approx(0.5));
    const ProblemParams q = p.with_lambda(0.2);
    CHECK(q.lambda() == 0.2);
    CHECK(q.s() == p.s());
    CHECK(p.lambda() == 0.1);
}

TEST_CASE("gamma_from_mu examples") {
    const ProblemParams half(2, 0.5, 0.0);
    CHECK(gamma_from_mu(0.0, half) == 0.0);
    CHECK(gamma_from_mu(2.0, half) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_from_mu(0.75, half) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(gamma_from_mu(-0.25, half) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK_THROWS_AS(gamma_from_mu(-0.26, half), DomainError);
}

TEST_CASE("mu_from_gamma examples") {
    CHECK(mu_from_gamma(0.0, ProblemParams(2, 0.5, 0.0)) == 0.0);
    CHECK(mu_from_gamma(1.5, ProblemParams(2, 0.5, 0.0)) == doctest::Approx(3.75).epsilon(1e-14));
    CHECK(mu_from_gamma(1.0, ProblemParams(3, 0.5, 0.0)) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("round trip and monotonicity on random samples") {
    std::mt19937_64 rng(7);
    for (double s : {0.25, 0.5, 0.75}) {
        const ProblemParams p(2, s, 0.0);
        const double floor = -p.half_gap() * p.half_gap();
        std::uniform_real_distribution<double> dist(floor, 100.0);
        std::vector<double> mus(1000);
        for (double& m : mus) m = dist(rng);
        for (double m : mus) {
            const double back = mu_from_gamma(gamma_from_mu(m, p), p);
            CHECK(std::abs(back - m) <= 1e-10 * std::max(1.0, std::abs(m)));
            const auto pair = OrderEigenPairing::from_mu(m, p);
            CHECK(std::abs(pair.mu - pair.gamma * (pair.gamma + 2 - 2 * s)) <= 1e-12 * std::max(1.0, std::abs(m)));
        }
        std::sort(mus.begin(), mus.end());
        for (std::size_t i = 1; i < mus.size(); ++i)
            if (mus[i] > mus[i - 1]) CHECK(gamma_from_mu(mus[i], p) > gamma_from_mu(mus[i - 1], p));
    }
}

TEST_CASE("full-space Hardy constant") {
    CHECK(hardy_constant_full_space(ProblemParams(2, 0.5, 0.0)) == doctest::Approx(0.228473).epsilon(1e-5));
    // 2 Gamma^2(5/4) / Gamma^2(3/4) = 1.09422...
    CHECK(hardy_constant_full_space(ProblemParams(4, 0.5, 0.0)) == doctest::Approx(1.0937).epsilon(1e-3));
    CHECK(std::abs(hardy_constant_full_space(ProblemParams(4, 0.5, 0.0)) - full_space_oracle(4, 0.5)) <= 1e-12);
    for (double s : {0.25, 0.5, 0.75})
        CHECK(std::abs(hardy_constant_full_space(ProblemParams(2, s, 0.0)) - full_space_oracle(2, s)) <=
              1e-12 * full_space_oracle(2, s));
    // The constant decreases in s for N = 2 (it vanishes as s -> 1 where Gamma((N-2s)/4) blows up).
    CHECK(hardy_constant_full_space(ProblemParams(2, 0.25, 0.0)) > hardy_constant_full_space(ProblemParams(2, 0.75, 0.0)));
    CHECK(full_space_oracle(2, 0.25) > full_space_oracle(2, 0.75));
}
