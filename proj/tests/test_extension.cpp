#include "conefrac/almgren.hpp"
#include "conefrac/error.hpp"
#include "conefrac/extension.hpp"
#include "conefrac/hardy.hpp"

#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

using namespace conefrac;

namespace {

constexpr double pi = std::numbers::pi;

std::shared_ptr<const AssembledForms> forms_for(int nt, int nth, const ProblemParams& p, const SphericalCap& cap) {
    return std::make_shared<const AssembledForms>(assemble(build_mesh(nt, nth, p.s(), cap, 2.0), p));
}

double relative_l2(std::shared_ptr<const ScalarField> u, std::shared_ptr<const ScalarField> ref) {
    const CombinedField diff(u, 1.0, ref, -1.0);
    return std::sqrt(diff.volume_l2(1.0) / ref->volume_l2(1.0));
}

// Nodal interpolant of an analytic field on the shells of a grid.
std::shared_ptr<GridField> interpolant(const HalfBallGrid& grid, const std::function<double(const Point3&)>& f) {
    std::vector<Eigen::VectorXd> values;
    const HemisphereMesh& m = grid.forms->mesh;
    for (double r : grid.radii)
        values.push_back(m.sample([&](double t, double th) {
            return f({r * std::cos(t) * std::cos(th), r * std::cos(t) * std::sin(th), r * std::sin(t)});
        }));
    return std::make_shared<GridField>(grid.forms, grid.radii, values);
}

// Degree 1/2 solution for s = 1/2 with the Dirichlet half {x2 > 0} of the thin space.
double half_plane_profile(const Point3& z) {
    const double y = -z[1];
    return std::sqrt(0.5 * (std::hypot(y, z[2]) + y));
}

}  // namespace

TEST_CASE("grid construction") {
    const auto forms = forms_for(8, 16, ProblemParams(2, 0.5, 0.0), SphericalCap::half_circle());
    const HalfBallGrid g = make_half_ball_grid(forms, 10, 1e-3);
    CHECK(g.n_r() == 10);
    CHECK(g.r_min() == doctest::Approx(1e-3));
    CHECK(g.radii.back() == 1.0);
    for (int k = 1; k < g.n_r(); ++k) CHECK(g.radii[k] / g.radii[k - 1] == doctest::Approx(g.ratio()).epsilon(1e-12));
    CHECK_THROWS_AS(make_half_ball_grid(forms, 2, 1e-3), DomainError);
    CHECK_THROWS_AS(make_half_ball_grid(forms, 10, 1.0), DomainError);
    CHECK_THROWS_AS(make_half_ball_grid(forms, 10, 0.0), DomainError);
}

TEST_CASE("h = 0 reproduces the homogeneous profile") {
    const ProblemParams p(2, 0.5, 0.1);
    const auto forms = forms_for(16, 32, p, SphericalCap::half_circle());
    const EigenSystem es = solve_eigs(forms, p, 4);
    ExtensionOptions o;
    o.modes = &es;
    const ExtensionResult res = solve_extension(make_half_ball_grid(forms, 24), p, Perturbation::zero(), es.psi[0], o);
    CHECK(res.inner_condition == "dirichlet-modal");
    CHECK(res.residual <= 1e-10);
    CHECK(relative_l2(res.field, manufactured_field(es, {{1, 1.0}})) <= 0.03);
    // trace vanishes off the cap on every shell
    const HemisphereMesh& m = forms->mesh;
    for (const auto& v : res.field->shell_values())
        for (int j = 0; j < m.n_theta(); ++j)
            if (!m.in_omega(j)) CHECK(v[m.node(0, j)] == 0.0);
}

TEST_CASE("constants solve the full-circle problem") {
    const ProblemParams p(2, 0.4, 0.0);
    const auto forms = forms_for(8, 16, p, SphericalCap::full_circle());
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(forms->mesh.dof_count());
    for (bool modal : {false, true}) {
        const EigenSystem es = solve_eigs(forms, p, 3);
        ExtensionOptions o;
        if (modal) o.modes = &es;
        const ExtensionResult res = solve_extension(make_half_ball_grid(forms, 12), p, Perturbation::zero(), one, o);
        for (const auto& v : res.field->shell_values()) CHECK((v.array() - 1.0).abs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("deviation from the profile is linear in a small constant h") {
    const ProblemParams p(2, 0.5, 0.0);
    const auto forms = forms_for(12, 24, p, SphericalCap::half_circle());
    const EigenSystem es = solve_eigs(forms, p, 3);
    const HalfBallGrid grid = make_half_ball_grid(forms, 16);
    // the same inner condition for every h so that only the perturbation differs
    const auto base = solve_extension(grid, p, Perturbation::zero(), es.psi[0]).field;
    const double c = 0.05;
    const auto full = solve_extension(grid, p, Perturbation::constant(c), es.psi[0]).field;
    const auto half = solve_extension(grid, p, Perturbation::constant(c / 2), es.psi[0]).field;
    const double d1 = relative_l2(full, base), d2 = relative_l2(half, base);
    CHECK(d1 > 0.0);
    CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("solve is linear in the lid data") {
    const ProblemParams p(2, 0.3, 0.05);
    const auto forms = forms_for(8, 16, p, SphericalCap(1.0, 4.0));
    const HalfBallGrid grid = make_half_ball_grid(forms, 10);
    const Eigen::VectorXd g = forms->mesh.sample([](double t, double th) { return std::cos(t) * (1 + std::sin(th)) + t; });
    const Perturbation h = Perturbation::constant(0.2);
    const auto u1 = solve_extension(grid, p, h, g).field;
    const auto u3 = solve_extension(grid, p, h, -3.0 * g).field;
    for (int k = 0; k < grid.n_r(); ++k) {
        const Eigen::VectorXd d = u3->shell_values()[k] + 3.0 * u1->shell_values()[k];
        CHECK(d.norm() <= 1e-7 * (1 + u1->shell_values()[k].norm()));
    }
}

TEST_CASE("Green identity on the discrete solution") {
    const ProblemParams p(2, 0.5, 0.1);
    const auto forms = forms_for(16, 32, p, SphericalCap::half_circle());
    const EigenSystem es = solve_eigs(forms, p, 3);
    ExtensionOptions o;
    o.modes = &es;
    const HalfBallGrid grid = make_half_ball_grid(forms, 24);
    const auto u = solve_extension(grid, p, Perturbation::zero(), es.psi[0], o).field;
    for (int k : {6, 9, 12, 15, 18}) {
        const double r = std::sqrt(grid.radii[k] * grid.radii[k + 1]);
        const PohozaevResult pr = pohozaev_check(*u, p, Perturbation::zero(), r);
        CHECK(pr.identity_residual <= 0.01);
    }
}

TEST_CASE("refinement converges toward the exact half-plane solution") {
    const ProblemParams p(2, 0.5, 0.0);
    double prev = 0.0;
    for (int level = 0; level < 3; ++level) {
        const int nt = 6 << level;
        const auto forms = forms_for(nt, 2 * nt, p, SphericalCap::half_circle());
        const EigenSystem es = solve_eigs(forms, p, 2);
        const HalfBallGrid grid = make_half_ball_grid(forms, 8 << level, 1e-2);
        const auto exact = interpolant(grid, half_plane_profile);
        ExtensionOptions o;
        o.modes = &es;
        const Eigen::VectorXd lid = exact->shell_values().back();
        const double err = relative_l2(solve_extension(grid, p, Perturbation::zero(), lid, o).field, exact);
        if (level > 0) CHECK(prev / err >= 1.5);
        prev = err;
    }
}

TEST_CASE("inadmissible lambda is rejected") {
    const ProblemParams p(2, 0.5, 0.0);
    const auto forms = forms_for(8, 16, p, SphericalCap::half_circle());
    const double Lambda = hardy_constant(*forms, p).lambda_star;
    const auto forms_bad = forms_for(8, 16, p.with_lambda(1.01 * Lambda), SphericalCap::half_circle());
    CHECK_THROWS_AS(solve_extension(make_half_ball_grid(forms_bad, 6), p.with_lambda(1.01 * Lambda), Perturbation::zero(),
                                    Eigen::VectorXd::Ones(forms->mesh.dof_count())),
                    DomainError);
}

TEST_CASE("manufactured fields") {
    const ProblemParams p(2, 0.5, 0.0);
    const auto forms = forms_for(12, 24, p, SphericalCap::half_circle());
    const EigenSystem es = solve_eigs(forms, p, 4);
    const auto prof = homogeneous_profile(es, 1);
    const auto single = manufactured_field(es, {{1, 1.0}});
    const auto two = manufactured_field(es, {{1, 1.0}, {3, 0.1}});
    const double tau = 0.37;
    for (const Point3& z : {Point3{0.2, -0.3, 0.1}, Point3{-0.4, -0.1, 0.5}, Point3{0.0, 0.0, 0.6}}) {
        CHECK(single->evaluate(z) == doctest::Approx(prof(z)).epsilon(1e-12));
        const Point3 tz{tau * z[0], tau * z[1], tau * z[2]};
        const double expect = std::pow(tau, es.gamma[0]) * homogeneous_profile(es, 1)(z) +
                              0.1 * std::pow(tau, es.gamma[2]) * homogeneous_profile(es, 3)(z);
        CHECK(two->evaluate(tz) == doctest::Approx(expect).epsilon(1e-10));
    }
    const HemisphereMesh& m = forms->mesh;
    for (double r : {0.1, 0.5, 1.0}) {
        const Eigen::VectorXd v = two->values_on_sphere(r);
        for (int j = 0; j < m.n_theta(); ++j)
            if (!m.in_omega(j)) CHECK(v[m.node(0, j)] == 0.0);
    }
    CHECK_THROWS_AS(manufactured_field(es, {}), DomainError);
    CHECK_THROWS_AS(manufactured_field(es, {{5, 1.0}}), DomainError);
    CHECK_THROWS_AS(manufactured_field(es, {{0, 1.0}}), DomainError);
}

TEST_CASE("binary field round trip") {
    const ProblemParams p(2, 0.35, 0.02);
    const auto forms = forms_for(6, 12, p, SphericalCap(0.5, 3.0));
    const HalfBallGrid grid = make_half_ball_grid(forms, 5, 1e-2);
    const auto u = solve_extension(grid, p, Perturbation::constant(0.1),
                                   forms->mesh.sample([](double t, double th) { return 1 + t * std::cos(th); }))
                       .field;
    const auto path = (std::filesystem::temp_directory_path() / "conefrac_roundtrip.bin").string();
    write_field(path, *u, p);
    const LoadedField back = read_field(path);
    CHECK(back.header.N == 2);
    CHECK(back.header.n_r == 5);
    CHECK(back.header.n_t == 6);
    CHECK(back.header.n_theta == 12);
    CHECK(back.header.s == 0.35);
    CHECK(back.header.lambda == 0.02);
    CHECK(back.header.r_min == grid.r_min());
    CHECK(back.header.cap_start == 0.5);
    CHECK(back.header.cap_length == 3.0);
    for (int k = 0; k < 5; ++k) {
        CHECK(back.field->radii()[k] == u->radii()[k]);
        CHECK(back.field->shell_values()[k] == u->shell_values()[k]);
    }
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
    CHECK_THROWS_AS(read_field(path), Error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_field(path), Error);
}
