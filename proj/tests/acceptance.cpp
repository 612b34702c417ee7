// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "conefrac/almgren.hpp"
#include "conefrac/cones.hpp"
#include "conefrac/extension.hpp"
#include "conefrac/hardy.hpp"
#include "conefrac/params.hpp"
#include "conefrac/spectral.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace conefrac;

namespace {

constexpr double pi = std::numbers::pi;

// Eigenvalues of every admissible solve in items 2 to 4, for item 10.
struct FloorRecord {
    double s;
    double lambda;
    double mu;
};
std::vector<FloorRecord> floor_records;

struct Report {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

std::shared_ptr<const AssembledForms> forms_for(int nt, int nth, const ProblemParams& p, const SphericalCap& cap) {
    return std::make_shared<const AssembledForms>(assemble(build_mesh(nt, nth, p.s(), cap, 2.0), p));
}

EigenSystem eigs(std::shared_ptr<const AssembledForms> forms, const ProblemParams& p, int k,
                 const EigenOptions& o = {}) {
    EigenSystem es = solve_eigs(forms, p, k, o);
    if (!o.allow_inadmissible)
        for (double mu : es.mu) floor_records.push_back({p.s(), p.lambda(), mu});
    return es;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// 1. kappa_s(1/2) = 1; the full-space constant 2^{2s} Gamma((N+2s)/4)^2 / Gamma((N-2s)/4)^2 via Boost.
void closed_form_constants(Report& r) {
    r.require(kappa_s(0.5) == 1.0, "kappa_s(1/2) == 1");
    const double a = boost::math::tgamma(0.75), b = boost::math::tgamma(0.25);
    const double ref = 2.0 * a * a / (b * b);
    const double got = hardy_constant_full_space(ProblemParams(2, 0.5, 0.0));
    r.require(std::abs(got - ref) <= 1e-10, "Lambda_{2,1/2} within 1e-10");
    r.detail << "kappa=" << kappa_s(0.5) << " Lambda=" << fmt("%.12f", got) << " oracle=" << fmt("%.12f", ref);
}

// 2. Closed-form ladders at 96 x 192.
void spectral_anchors(Report& r) {
    double worst_full = 0.0, worst_half = 0.0;
    for (double s : {0.25, 0.5, 0.75}) {
        const ProblemParams p(2, s, 0.0);
        // k(k + 2 - 2s) has multiplicity k + 1: the first five distinct values fill 15 slots
        std::vector<double> ladder;
        for (int k = 0; k <= 4; ++k)
            for (int m = 0; m <= k; ++m) ladder.push_back(k * (k + 2.0 - 2.0 * s));
        const EigenSystem full = eigs(forms_for(96, 192, p, SphericalCap::full_circle()), p, 15);
        for (int j = 0; j < 15; ++j) {
            // relative error; the zero eigenvalue is measured on the unit scale
            const double e = std::abs(full.mu[j] - ladder[j]) / std::max(1.0, ladder[j]);
            worst_full = std::max(worst_full, e);
            r.require(e <= 0.01, "full circle s=" + fmt("%g", s) + " j=" + std::to_string(j + 1));
        }
        const EigenSystem half = eigs(forms_for(96, 192, p, SphericalCap::half_circle()), p, 2);
        for (int k = 0; k <= 1; ++k) {
            const double exact = (k + s) * (k + 2.0 - s);
            const double e = std::abs(half.mu[k] - exact) / exact;
            worst_half = std::max(worst_half, e);
            r.require(e <= 0.02, "half circle s=" + fmt("%g", s) + " k=" + std::to_string(k));
        }
    }
    r.detail << "max rel err full=" << fmt("%.2e", worst_full) << " half=" << fmt("%.2e", worst_half);
}

// 3. 2-D solver against the 1-D oracle families.
void oracle_agreement(Report& r) {
    double worst = 0.0;
    for (double s : {0.25, 0.5, 0.75}) {
        for (double lambda : {0.0, 0.1}) {
            const ProblemParams p(2, s, lambda);
            if (lambda >= hardy_constant_full_space(p)) continue;  // s = 3/4: Lambda < 0.1
            const EigenSystem es = eigs(forms_for(48, 96, p, SphericalCap::full_circle()), p, 10);
            for (int k = 0; k <= 2; ++k) {
                const double o = oracle_full_circle_1d(p, k, 48)[0];
                double best = std::numeric_limits<double>::infinity();
                for (double mu : es.mu) best = std::min(best, rel(mu, o));
                worst = std::max(worst, best);
                r.require(best <= 5e-3, "s=" + fmt("%g", s) + " lambda=" + fmt("%g", lambda) + " k=" + std::to_string(k));
            }
        }
    }
    r.detail << "max rel deviation=" << fmt("%.2e", worst) << " (s=3/4, lambda=0.1 skipped: inadmissible)";
}

// 4. mu_1 at lambda = Lambda_num equals -(1 - s)^2.
void hardy_duality(Report& r) {
    double worst = 0.0;
    for (double s : {0.5, 0.75}) {
        for (double len : {pi, 1.5 * pi}) {
            const ProblemParams p(2, s, 0.0);
            const auto forms = forms_for(32, 64, p, SphericalCap(pi, len));
            const double Lambda = hardy_constant(*forms, p).lambda_star;
            EigenOptions o;
            o.allow_inadmissible = true;
            o.hardy_limit = Lambda;
            const EigenSystem es = eigs(forms, p.with_lambda(Lambda), 1, o);
            const double e = std::abs(es.mu[0] + (1 - s) * (1 - s));
            worst = std::max(worst, e);
            r.require(e <= 1e-3, "s=" + fmt("%g", s) + " arc=" + fmt("%.4f", len));
        }
    }
    r.detail << "max |mu_1 + (1-s)^2|=" << fmt("%.2e", worst);
}

// 5. Scan over arc lengths.
void hardy_monotonicity(Report& r) {
    const ProblemParams p(2, 0.5, 0.0);
    const HardyScan scan = hardy_scan({pi / 2, pi, 1.5 * pi, 2 * pi}, p, MeshSpec{48, 96, 2.0}, 1, false);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < scan.rows.size(); ++i)
        margin = std::min(margin, scan.rows[i - 1].lambda_star - scan.rows[i].lambda_star);
    r.require(margin > 1e-4, "decrease margins > 1e-4");
    const double exact = hardy_constant_full_space(p);
    const double e = std::abs(scan.rows.back().lambda_star - exact) / exact;
    r.require(e <= 0.02, "2 pi value within 2%");
    r.detail << "Lambda:";
    for (const auto& row : scan.rows) r.detail << " " << fmt("%.5f", row.lambda_star);
    r.detail << " min margin=" << fmt("%.3e", margin) << " rel err 2pi=" << fmt("%.2e", e);
}

// 6. Pure profiles.
void almgren_exactness(Report& r) {
    double wN = 0.0, wH = 0.0, wP = 0.0;
    for (double s : {0.25, 0.5, 0.75}) {
        const ProblemParams p0(2, s, 0.0);
        const auto probe = forms_for(24, 48, p0, SphericalCap::half_circle());
        const double lambda = 0.5 * hardy_constant(*probe, p0).lambda_star;
        for (double lam : {0.0, lambda}) {
            const ProblemParams p = p0.with_lambda(lam);
            const EigenSystem es = eigs(forms_for(24, 48, p, SphericalCap::half_circle()), p, 4);
            for (int j : {1, 2}) {
                const auto u = manufactured_field(es, {{j, 1.0}});
                const double g = es.gamma[j - 1];
                const FrequencyTrace ft = frequency_trace(*u, p, Perturbation::zero());
                const double c0 = ft.H.front() / std::pow(ft.radii.front(), 2 * g);
                for (std::size_t i = 0; i < ft.radii.size(); ++i) {
                    wN = std::max(wN, std::abs(ft.Ncal[i] - g));
                    wH = std::max(wH, std::abs(ft.H[i] / std::pow(ft.radii[i], 2 * g) / c0 - 1.0));
                }
                for (std::size_t i = 2; i + 2 < ft.radii.size(); i += 6)
                    wP = std::max(wP, check_H_prime_identity(*u, p, Perturbation::zero(), ft.radii[i]));
                r.require(ft.radii.size() == 40, "40 radii");
            }
        }
    }
    r.require(wN <= 1e-6, "N == gamma within 1e-6");
    r.require(wH <= 1e-8, "H / r^{2 gamma} constant within 1e-8");
    r.require(wP <= 1e-8, "H' identity residual <= 1e-8");
    r.detail << "max |N-gamma|=" << fmt("%.2e", wN) << " H/r^2g spread=" << fmt("%.2e", wH)
             << " H' residual=" << fmt("%.2e", wP);
}

// 7. Two-mode manufactured field on the half circle: gamma_2 - gamma_1 = 1 at s = 1/2.
void blowup_classification(Report& r) {
    const ProblemParams p(2, 0.5, 0.0);
    const EigenSystem es = eigs(forms_for(32, 64, p, SphericalCap::half_circle()), p, 4);
    const auto g1 = es.group_members(1);
    const int j2 = *std::max_element(g1.begin(), g1.end()) + 1;
    const double gap = es.gamma[j2 - 1] - es.gamma[0];
    r.require(gap >= 0.3, "gamma gap >= 0.3");
    const auto u = manufactured_field(es, {{1, 1.0}, {j2, 0.2}});
    const FrequencyTrace ft = frequency_trace(*u, p, Perturbation::zero());
    const double eg = std::abs(ft.gamma_hat - es.gamma[0]);
    r.require(eg <= 1e-2, "gamma_hat within 1e-2");
    const BlowupSnapshot b = blowup(u, 1e-2);
    const DominantGroup dg = dominant_group(b, es);
    const double off = off_group_projection(b, es, dg.j0);
    r.require(dg.j0 == 1, "dominant group is mode 1");
    r.require(off <= 0.05, "off-group projection <= 0.05");
    r.detail << "gap=" << fmt("%.4f", gap) << " |gamma_hat-gamma_1|=" << fmt("%.2e", eg) << " off-group="
             << fmt("%.2e", off);
}

// 8. Extension solve with h = 0.1 and psi_1 lid data.
void end_to_end(Report& r) {
    const ProblemParams p(2, 0.5, 0.1);
    const auto forms = forms_for(48, 96, p, SphericalCap::half_circle());
    const EigenSystem es = eigs(forms, p, 6);
    const Perturbation h = Perturbation::constant(0.1);
    const HalfBallGrid grid = make_half_ball_grid(forms, 32, 1e-3);
    const ExtensionResult res = solve_extension(grid, p, h, es.psi[0]);
    const auto& u = *res.field;

    // the inner sphere carries the natural condition, so radii start at 10 r_min
    const FrequencyTrace ft = frequency_trace(u, p, h, default_radii(0.8, 40, 1e-2));
    const BlowupSnapshot snap = blowup(res.field, 1e-2);
    const int j0 = dominant_group(snap, es).j0;
    const double g0 = es.gamma[j0 - 1];
    const double eg = std::abs(ft.gamma_hat - g0) / g0;
    r.require(eg <= 0.05, "gamma_hat within 5%");

    std::vector<double> taus = default_radii(0.8, 60, 1e-2);
    for (double R : {0.3, 0.5, 0.7}) taus.push_back(R);
    std::sort(taus.begin(), taus.end());
    const FourierTrace fc = fourier_coeffs(u, es, taus, p, h);
    std::vector<double> beta;
    for (double R : {0.3, 0.5, 0.7}) beta.push_back(beta_coefficients(fc, g0, R, p)[j0 - 1]);
    const auto [lo, hi] = std::minmax_element(beta.begin(), beta.end());
    const double spread = (*hi - *lo) / std::abs(beta[0]);
    r.require(spread <= 0.05, "beta_j0 spread within 5%");

    int satisfied = 0;
    for (int i = 0; i < 5; ++i) {
        const double rad = 1e-2 * std::pow(80.0, i / 4.0);
        if (pohozaev_check(u, p, h, rad, 1e-2).satisfied) ++satisfied;
    }
    r.require(satisfied == 5, "Pohozaev at five radii");
    r.detail << "gamma_hat=" << fmt("%.5f", ft.gamma_hat) << " gamma_j0=" << fmt("%.5f", g0) << " (j0=" << j0
             << ") beta=" << fmt("%.5f", beta[0]) << "," << fmt("%.5f", beta[1]) << "," << fmt("%.5f", beta[2])
             << " spread=" << fmt("%.2e", spread) << " pohozaev " << satisfied << "/5 cg=" << res.iterations;
}

// 9. Smoothing profile identities, inequalities and the smoothed cone margins.
void geometry_certificates(Report& r) {
    for (int n : {8, 16, 32, 64}) {
        const double n2 = double(n) * n;
        const double bound = 3.0 / (2.0 * n2);
        for (int i = 0; i < 10000; ++i) {
            const double t = 3.0 / n2 * (i + 0.5) / 10000.0;
            const double f = smoothing_profile(n, t);
            const double d = smoothing_defect(n, t);
            if (t <= 1.0 / n2) r.require(f == 0.0, "f_n = 0 below 1/n^2");
            if (t >= 2.0 / n2) r.require(f == t - bound, "f_n = t - 3/(2n^2) above 2/n^2");
            r.require(d <= 0.0 && d >= -bound, "-3/(2n^2) <= f_n - t f_n' <= 0");
            r.require(std::abs(f - t) <= bound, "|f_n - t| <= 3/(2n^2)");
        }
    }
    const ConeProfile wedge(1.0, 1.0);
    double worst_star = std::numeric_limits<double>::infinity(), worst_incl = worst_star;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n : {SmoothedCone::minimal_index(wedge), 12, 16, 32, 64}) {
        const SmoothedCone sc(wedge, n);
        const double bound = 3.0 / (4.0 * n);
        for (int i = 0; i < 1000; ++i) {
            const double x = -1.0 + 2.0 * i / 999.0;
            const double m = starshape_margin(sc, sc.boundary_point(x));
            worst_star = std::min(worst_star, m / bound);
            r.require(m >= bound, "star-shape margin n=" + std::to_string(n));
        }
        for (int count = 0; count < 10000;) {
            const Point2 x{u(rng), u(rng)};
            if (x[0] * x[0] + x[1] * x[1] > 1.0 || !wedge.contains(x)) continue;
            ++count;
            const double m = sc.psi(x[0]) - wedge.phi(x[0]);
            worst_incl = std::min(worst_incl, m / bound);
            r.require(sc.contains(x) && m >= bound, "inclusion margin n=" + std::to_string(n));
        }
    }
    r.detail << "min star-shape margin / (3/4n)=" << fmt("%.4f", worst_star)
             << " min inclusion margin / (3/4n)=" << fmt("%.4f", worst_incl);
}

// 10. Every eigenvalue of an admissible solve above -(1 - s)^2.
void spectrum_floor(Report& r) {
    // add admissible lambda close to the threshold on the half and three-quarter caps
    for (double s : {0.25, 0.5, 0.75}) {
        for (double len : {pi, 1.5 * pi}) {
            const ProblemParams p0(2, s, 0.0);
            const auto probe = forms_for(24, 48, p0, SphericalCap(pi, len));
            const double Lambda = hardy_constant(*probe, p0).lambda_star;
            for (double f : {0.5, 0.9, 0.99}) {
                const ProblemParams p = p0.with_lambda(f * Lambda);
                eigs(forms_for(24, 48, p, SphericalCap(pi, len)), p, 6);
            }
        }
    }
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& rec : floor_records) {
        const double margin = rec.mu + (1 - rec.s) * (1 - rec.s);
        worst = std::min(worst, margin);
        if (!(margin > 0.0)) r.require(false, "mu=" + fmt("%g", rec.mu) + " at s=" + fmt("%g", rec.s));
    }
    r.require(!floor_records.empty(), "eigenvalues recorded");
    r.detail << floor_records.size() << " eigenvalues, min mu + (1-s)^2=" << fmt("%.3e", worst);
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Report&)>>> criteria{
        {"closed-form constants", closed_form_constants},
        {"spectral anchors", spectral_anchors},
        {"1-D/2-D oracle agreement", oracle_agreement},
        {"Hardy duality", hardy_duality},
        {"Hardy monotonicity", hardy_monotonicity},
        {"Almgren exactness on pure profiles", almgren_exactness},
        {"blow-up classification", blowup_classification},
        {"end-to-end extension run", end_to_end},
        {"geometry certificates", geometry_certificates},
        {"spectrum floor", spectrum_floor},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Report r;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(r);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail << " [exception: " << e.what() << "]";
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!r.pass) ++failures;
        std::printf("%s %2zu. %s: %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    r.detail.str().c_str(), dt);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
