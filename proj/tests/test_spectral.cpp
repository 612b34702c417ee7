#include "conefrac/error.hpp"
#include "conefrac/hardy.hpp"
#include "conefrac/spectral.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace conefrac;

namespace {

constexpr double pi = std::numbers::pi;

std::shared_ptr<const AssembledForms> forms_for(int nt, int nth, double s, const SphericalCap& cap, double lambda = 0.0) {
    return std::make_shared<const AssembledForms>(
        assemble(build_mesh(nt, nth, s, cap, 2.0), ProblemParams(2, s, lambda)));
}

std::vector<double> oracle_union(const ProblemParams& p, int n_t, int count) {
    std::vector<double> all;
    for (int k = 0; k <= 3; ++k) {
        const auto v = oracle_full_circle_1d(p, k, n_t);
        for (int i = 0; i < std::min<int>(count, v.size()); ++i) {
            all.push_back(v[i]);
            if (k > 0) all.push_back(v[i]);  // cos and sin families
        }
    }
    std::sort(all.begin(), all.end());
    all.resize(count);
    return all;
}

}  // namespace

TEST_CASE("full circle, lambda = 0: closed-form ladder with multiplicity k + 1") {
    const ProblemParams p(2, 0.5, 0.0);
    const auto forms = forms_for(48, 96, 0.5, SphericalCap::full_circle());
    const EigenSystem es = solve_eigs(forms, p, 10);
    // k(k + 1) with multiplicities 1, 2, 3, 4
    const double expected[] = {0, 2, 2, 6, 6, 6, 12, 12, 12, 12};
    for (int j = 0; j < 10; ++j) CHECK(std::abs(es.mu[j] - expected[j]) <= 5e-3 * std::max(1.0, expected[j]));
    CHECK(std::abs(es.mu[0]) <= 1e-9);
    // the first eigenfunction is constant: psi_1 = 1 / sqrt(2 pi / (2 - 2s))
    const double c = 1.0 / std::sqrt(2 * pi);
    CHECK((es.psi[0].array() - c).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("half circle, lambda = 0: (k + s)(k + 2 - s)") {
    const ProblemParams p(2, 0.5, 0.0);
    const auto forms = forms_for(64, 128, 0.5, SphericalCap(pi, pi));
    const EigenSystem es = solve_eigs(forms, p, 3);
    CHECK(es.mu[0] == doctest::Approx(0.75).epsilon(0.02));
    CHECK(es.mu[1] == doctest::Approx(3.75).epsilon(0.02));
    CHECK(es.mu[2] == doctest::Approx(3.75).epsilon(0.02));
    CHECK(es.gamma[0] == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("convergence toward the closed form under refinement") {
    const ProblemParams p(2, 0.5, 0.0);
    double prev = 1e300;
    for (int nt : {12, 24, 48}) {
        const EigenSystem es = solve_eigs(forms_for(nt, 2 * nt, 0.5, SphericalCap(pi, pi)), p, 1);
        const double err = std::abs(es.mu[0] - 0.75);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("eigensystem invariants") {
    for (double lambda : {0.0, 0.2}) {
        const ProblemParams p(2, 0.75, lambda);
        const auto forms = forms_for(24, 48, 0.75, SphericalCap(pi, 1.5 * pi), lambda);
        const EigenSystem es = solve_eigs(forms, p, 8);
        REQUIRE(es.size() == 8);
        for (int i = 0; i < 8; ++i) {
            if (i > 0) CHECK(es.mu[i] >= es.mu[i - 1]);
            CHECK(es.mu[i] > -p.half_gap() * p.half_gap());
            CHECK(es.gamma[i] == doctest::Approx(gamma_from_mu(es.mu[i], p)));
            for (int j = 0; j <= i; ++j)
                CHECK(std::abs(es.psi[i].dot(forms->M * es.psi[j]) - (i == j ? 1.0 : 0.0)) <= 1e-10);
            // residual of the pencil (K - lambda kappa B) psi = mu M psi
            const Eigen::VectorXd r = forms->K * es.psi[i] - lambda * p.kappa() * (forms->B * es.psi[i]) -
                                      es.mu[i] * (forms->M * es.psi[i]);
            CHECK(forms->restrict_to_retained(r).norm() <= 1e-6 * (1 + std::abs(es.mu[i])));
        }
        // psi_1 has a fixed sign on the nodes not forced to zero
        const Eigen::VectorXd& psi = es.psi[0];
        double lo = 1e300;
        for (int d : forms->mesh.retained()) lo = std::min(lo, psi[d]);
        CHECK(lo > 0.0);
        CHECK(weighted_surface_integral(*forms, psi) > 0.0);
    }
}

TEST_CASE("dense and iterative solvers agree") {
    const ProblemParams p(2, 0.3, 0.1);
    const auto forms = forms_for(20, 40, 0.3, SphericalCap(2.0, 4.0), 0.1);
    EigenOptions dense;
    dense.dense_limit = 100000;
    EigenOptions iter;
    iter.dense_limit = 0;
    const EigenSystem a = solve_eigs(forms, p, 5, dense);
    const EigenSystem b = solve_eigs(forms, p, 5, iter);
    CHECK(a.method != b.method);
    for (int j = 0; j < 5; ++j) {
        CHECK(a.mu[j] == doctest::Approx(b.mu[j]).epsilon(1e-9));
        CHECK(std::abs(std::abs(a.psi[j].dot(forms->M * b.psi[j])) - 1.0) <= 1e-7);
    }
}

TEST_CASE("deterministic output") {
    const ProblemParams p(2, 0.5, 0.1);
    const auto forms = forms_for(24, 48, 0.5, SphericalCap(pi, pi), 0.1);
    const EigenSystem a = solve_eigs(forms, p, 4);
    const EigenSystem b = solve_eigs(forms, p, 4);
    for (int j = 0; j < 4; ++j) {
        CHECK(a.mu[j] == b.mu[j]);
        CHECK((a.psi[j] - b.psi[j]).norm() == 0.0);
    }
}

TEST_CASE("1-D oracle examples") {
    const ProblemParams half(2, 0.5, 0.0);
    CHECK(std::abs(oracle_full_circle_1d(half, 0, 200)[0]) <= 1e-10);
    CHECK(oracle_full_circle_1d(half, 1, 200)[0] == doctest::Approx(2.0).epsilon(1e-3));
    // s = 1/4: gamma = 1 gives mu = 5/2 and sits in the k = 1 family; k = 0 holds gamma = 0, 2, ...
    const ProblemParams quarter(2, 0.25, 0.0);
    const auto k0 = oracle_full_circle_1d(quarter, 0, 200);
    const auto k1 = oracle_full_circle_1d(quarter, 1, 200);
    CHECK(k1[0] == doctest::Approx(2.5).epsilon(1e-3));
    CHECK(k0[1] == doctest::Approx(2 * (2 + 1.5)).epsilon(1e-3));
    for (double m : k0) CHECK(std::abs(m - 2.5) > 0.1);
    CHECK_THROWS_AS(oracle_full_circle_1d(half, -1, 50), DomainError);
}

TEST_CASE("2-D eigenvalues against the union of 1-D oracle families") {
    for (double s : {0.25, 0.5, 0.75}) {
        for (double frac : {0.0, 0.5}) {
            const double lambda = frac * hardy_constant_full_space(ProblemParams(2, s, 0.0));
            const ProblemParams p(2, s, lambda);
            const EigenSystem es = solve_eigs(forms_for(48, 96, s, SphericalCap::full_circle(), lambda), p, 5);
            const auto ref = oracle_union(p, 48, 5);
            for (int j = 0; j < 5; ++j)
                CHECK(std::abs(es.mu[j] - ref[j]) <= 5e-3 * std::max(1.0, std::abs(ref[j])));
        }
    }
}

TEST_CASE("mu_1 decreases as the cap grows") {
    const ProblemParams p(2, 0.5, 0.0);
    double prev = 1e300;
    for (double len : {pi / 2, 0.8 * pi, pi, 1.5 * pi, 1.9 * pi}) {
        const EigenSystem es = solve_eigs(forms_for(16, 32, 0.5, symmetric_cap(len)), p, 1);
        CHECK(es.mu[0] <= prev);
        prev = es.mu[0];
    }
}

TEST_CASE("mu_1 decreases strictly in lambda") {
    const ProblemParams p0(2, 0.5, 0.0);
    const auto forms = forms_for(16, 32, 0.5, SphericalCap(pi, pi));
    const double Lambda = hardy_constant(*forms, p0).lambda_star;
    double prev = 1e300;
    for (double f : {0.0, 0.25, 0.5, 0.75}) {
        const EigenSystem es = solve_eigs(forms, p0.with_lambda(f * Lambda), 1);
        CHECK(es.mu[0] < prev);
        prev = es.mu[0];
    }
}

TEST_CASE("admissibility and argument errors") {
    const auto forms = forms_for(16, 32, 0.5, SphericalCap(pi, pi));
    const ProblemParams p0(2, 0.5, 0.0);
    const double Lambda = hardy_constant(*forms, p0).lambda_star;
    CHECK_THROWS_AS(solve_eigs(forms, p0.with_lambda(1.01 * Lambda), 2), DomainError);
    EigenOptions o;
    o.allow_inadmissible = true;
    const EigenSystem es = solve_eigs(forms, p0.with_lambda(1.01 * Lambda), 2, o);
    CHECK(!es.warnings.empty());
    CHECK_THROWS_AS(solve_eigs(forms, p0, 0), DomainError);
    CHECK_THROWS_AS(solve_eigs(forms, ProblemParams(2, 0.25, 0.0), 2), DomainError);
}

TEST_CASE("homogeneous profiles") {
    const ProblemParams p(2, 0.5, 0.1);
    const auto forms = forms_for(24, 48, 0.5, SphericalCap(pi, pi), 0.1);
    const EigenSystem es = solve_eigs(forms, p, 3);
    for (int j = 1; j <= 3; ++j) {
        const auto phi = homogeneous_profile(es, j);
        for (int d : {5, 100, 333, forms->mesh.pole()}) {
            const double t = forms->mesh.t_of(d), th = forms->mesh.theta_of(d);
            const Point3 z{std::cos(t) * std::cos(th), std::cos(t) * std::sin(th), std::sin(t)};
            CHECK(phi(z) == doctest::Approx(es.psi[j - 1][d]).epsilon(1e-12));
            for (double tau : {0.5, 0.1, 1e-3}) {
                const Point3 w{tau * z[0], tau * z[1], tau * z[2]};
                CHECK(phi(w) == doctest::Approx(std::pow(tau, es.gamma[j - 1]) * phi(z)).epsilon(1e-12));
            }
        }
    }
    CHECK_THROWS_AS(homogeneous_profile(es, 0), DomainError);
    CHECK_THROWS_AS(homogeneous_profile(es, 4), DomainError);

    const auto full = forms_for(12, 24, 0.5, SphericalCap::full_circle());
    const EigenSystem ef = solve_eigs(full, ProblemParams(2, 0.5, 0.0), 1);
    const auto c = homogeneous_profile(ef, 1);
    CHECK(c({0.3, -0.2, 0.1}) == doctest::Approx(c({0.0, 0.0, 0.9})).epsilon(1e-8));
}
