#include "conefrac/almgren.hpp"

#include "conefrac/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace conefrac {

namespace {

double raw_H(const ScalarField& field, double r) {
    const Eigen::VectorXd u = field.values_on_sphere(r);
    return u.dot(field.forms().M * u);
}

ThinFunction as_thin(const Perturbation& h) {
    return [&h](double x1, double x2) { return h(x1, x2); };
}

struct LinearFit {
    double gamma = 0.0;
    double c = 0.0;
    double ss = 0.0;
    bool ok = false;
};

LinearFit fit_power(const std::vector<double>& r, const std::vector<double>& y, double delta) {
    const std::size_t n = r.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(r[i], delta);
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    LinearFit f;
    const double spread = std::sqrt(sxx / n);
    if (!(spread > 1e-10 * (std::abs(xm) + spread))) return f;
    f.c = sxy / sxx;
    f.gamma = ym - f.c * xm;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - f.gamma - f.c * x[i];
        f.ss += e * e;
    }
    f.ok = std::isfinite(f.gamma);
    return f;
}

// Integral of t^a Y(t) over [lo, hi] for Y interpolated between (t0, y0) and
// (t1, y1): power law when both values share a sign, linear otherwise.
double segment_integral(double a, double t0, double y0, double t1, double y1, double lo, double hi) {
    if (hi <= lo) return 0.0;
    if (y0 != 0.0 && y1 != 0.0 && (y0 > 0.0) == (y1 > 0.0)) {
        const double q = std::log(y1 / y0) / std::log(t1 / t0);
        const double e = a + q + 1.0;
        const double pre = y0 * std::pow(t0, -q);
        if (std::abs(e) < 1e-12) return pre * std::log(hi / lo);
        return pre * (std::pow(hi, e) - std::pow(lo, e)) / e;
    }
    const double slope = (y1 - y0) / (t1 - t0);
    const double icpt = y0 - slope * t0;
    auto prim = [&](double t, double p) {
        return std::abs(p + 1.0) < 1e-12 ? std::log(t) : std::pow(t, p + 1.0) / (p + 1.0);
    };
    return icpt * (prim(hi, a) - prim(lo, a)) + slope * (prim(hi, a + 1.0) - prim(lo, a + 1.0));
}

double tail_integral(std::vector<double> t, std::vector<double> y, double a, double R, double inner) {
    if (inner > 0.0 && t.front() > inner) {
        // Upsilon accumulates from the inner radius of the field, where it vanishes.
        t.insert(t.begin(), inner);
        y.insert(y.begin(), 0.0);
    }
    const std::size_t n = t.size();
    double total = 0.0;
    if (y[0] != 0.0) {
        if (n < 2 || y[1] == 0.0 || (y[0] > 0.0) != (y[1] > 0.0)) {
            throw NumericalError("beta_coefficients: cannot resolve the behaviour of Upsilon_j near 0");
        }
        const double p = std::log(y[1] / y[0]) / std::log(t[1] / t[0]);
        const double e = a + p + 1.0;
        if (!(e > 0.0)) {
            std::ostringstream os;
            os << "beta_coefficients: divergent tail, t^" << a << " Upsilon_j(t) ~ t^" << (a + p)
               << " is not integrable at 0 (Upsilon_j must decay faster than t^" << (-a - 1.0) << ")";
            throw NumericalError(os.str());
        }
        total += y[0] * std::pow(t[0], a + 1.0) / e;
    }
    for (std::size_t i = 0; i + 1 < n && t[i] < R; ++i) {
        total += segment_integral(a, t[i], y[i], t[i + 1], y[i + 1], t[i], std::min(R, t[i + 1]));
    }
    return total;
}

bool same_mesh(const HemisphereMesh& a, const HemisphereMesh& b) {
    return a.n_t() == b.n_t() && a.n_theta() == b.n_theta() && a.grading() == b.grading() &&
           std::abs(a.cap().start() - b.cap().start()) < 1e-12 &&
           std::abs(a.cap().length() - b.cap().length()) < 1e-12 && std::abs(a.s() - b.s()) < 1e-14;
}

}  // namespace

double compute_H(const ScalarField& field, double r) {
    if (!(r > 0.0 && r <= 1.0 + 1e-12)) throw DomainError("compute_H: radius must lie in (0, 1]");
    const double H = raw_H(field, r);
    if (!(H > 0.0)) throw NumericalError("compute_H: H(r) <= 0, the field is trivial on this sphere");
    return H;
}

double compute_D(const ScalarField& field, double r, const ProblemParams& params, const Perturbation& h) {
    if (!(r > 0.0 && r <= 1.0 + 1e-12)) throw DomainError("compute_D: radius must lie in (0, 1]");
    double trace = 0.0;
    if (params.lambda() != 0.0) trace += params.lambda() * field.hardy_trace(r);
    if (!h.is_zero) trace += field.trace_potential(r, as_thin(h));
    const double energy = field.bulk_energy(r) - params.kappa() * trace;
    return std::pow(r, 2.0 * params.s() - params.N()) * energy;
}

std::vector<double> default_radii(double R0, int count, double r_lo) {
    if (!(R0 > r_lo && r_lo > 0.0) || count < 2) throw DomainError("default_radii: need 0 < r_lo < R0 and count >= 2");
    std::vector<double> r(count);
    for (int i = 0; i < count; ++i) r[i] = r_lo * std::pow(R0 / r_lo, static_cast<double>(i) / (count - 1));
    r.back() = R0;
    return r;
}

FrequencyTrace frequency_trace(const ScalarField& field, const ProblemParams& params, const Perturbation& h,
                               std::vector<double> radii, double R0) {
    if (radii.empty()) radii = default_radii(R0, 40, std::max(1e-2, 10.0 * field.inner_radius()));
    std::sort(radii.begin(), radii.end());
    if (!(radii.front() > 0.0) || radii.back() > R0 * (1.0 + 1e-12)) {
        throw DomainError("frequency_trace: radii must lie in (0, R0]");
    }
    FrequencyTrace ft;
    ft.R0 = R0;
    ft.radii = radii;
    for (double r : radii) {
        const double H = compute_H(field, r);
        const double D = compute_D(field, r, params, h);
        ft.H.push_back(H);
        ft.D.push_back(D);
        ft.Ncal.push_back(D / H);
    }
    const std::size_t m = std::max<std::size_t>(3, radii.size() / 2);
    std::vector<double> rs(radii.begin(), radii.begin() + std::min(m, radii.size()));
    std::vector<double> ys(ft.Ncal.begin(), ft.Ncal.begin() + rs.size());
    const double n1 = ys.front();
    const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    auto fallback = [&] {
        ft.fit_model = "fallback";
        ft.gamma_hat = n1;
        ft.gamma_error = std::max(std::abs(ys.back() - n1), 1e-3 * (1.0 + std::abs(n1)));
    };
    if (*hi - *lo <= 1e-12 * (1.0 + std::abs(n1))) {
        ft.fit_model = "constant";
        ft.gamma_hat = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
        ft.gamma_error = *hi - *lo;
        return ft;
    }
    if (!h.is_zero) {
        ft.delta = 2.0 * params.s() - params.N() / params.p();
        if (!(ft.delta > 0.0)) {
            fallback();
            return ft;
        }
        const LinearFit f = fit_power(rs, ys, ft.delta);
        if (!f.ok) {
            fallback();
            return ft;
        }
        ft.fit_model = "fixed-delta";
        ft.gamma_hat = f.gamma;
    } else {
        // Golden section search for the exponent minimizing the residual.
        double a = 0.25, b = 6.0;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        auto obj = [&](double d) {
            const LinearFit f = fit_power(rs, ys, d);
            return f.ok ? f.ss : std::numeric_limits<double>::infinity();
        };
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = obj(c), fd = obj(d);
        for (int it = 0; it < 80; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = obj(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = obj(d);
            }
        }
        ft.delta = 0.5 * (a + b);
        const LinearFit f = fit_power(rs, ys, ft.delta);
        if (!f.ok) {
            fallback();
            return ft;
        }
        ft.fit_model = "free-delta";
        ft.gamma_hat = f.gamma;
    }
    ft.gamma_error = std::abs(ft.gamma_hat - n1);
    return ft;
}

double check_H_prime_identity(const ScalarField& field, const ProblemParams& params, const Perturbation& h, double r) {
    double step = 1e-3 * r;
    for (double b : field.radial_breakpoints()) {
        const double dist = std::abs(b - r);
        if (dist == 0.0) throw DomainError("check_H_prime_identity: r coincides with a shell radius");
        step = std::min(step, dist / 2.5);
    }
    const double Hp = (-raw_H(field, r + 2 * step) + 8.0 * raw_H(field, r + step) - 8.0 * raw_H(field, r - step) +
                       raw_H(field, r - 2 * step)) /
                      (12.0 * step);
    const double rhs = 2.0 * compute_D(field, r, params, h) / r;
    const double floor = 1e-10 * std::abs(raw_H(field, r)) / r;
    if (std::abs(Hp) <= floor && std::abs(rhs) <= floor) return 0.0;
    return std::abs(Hp - rhs) / std::abs(Hp);
}

BlowupSnapshot blowup(std::shared_ptr<const ScalarField> field, double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("blowup: tau must lie in (0, 1]");
    BlowupSnapshot snap;
    snap.tau = tau;
    snap.H_tau = raw_H(*field, tau);
    if (!(snap.H_tau > 0.0)) throw NumericalError("blowup: H(tau) = 0");
    const double c = std::sqrt(snap.H_tau);
    snap.w = field->values_on_sphere(tau) / c;
    snap.boundary_norm = snap.w.dot(field->forms().M * snap.w);
    snap.field = std::make_shared<ScaledField>(field, tau, c);
    return snap;
}

std::vector<double> blowup_projections(const BlowupSnapshot& snap, const EigenSystem& es) {
    if (es.mesh().dof_count() != snap.w.size()) throw DomainError("blowup_projections: mesh mismatch");
    const Eigen::VectorXd Mw = es.forms->M * snap.w;
    std::vector<double> c(es.size());
    for (int j = 0; j < es.size(); ++j) c[j] = es.psi[j].dot(Mw);
    return c;
}

double off_group_projection(const BlowupSnapshot& snap, const EigenSystem& es, int j0) {
    if (j0 < 1 || j0 > es.size()) throw DomainError("off_group_projection: mode index out of range");
    const auto c = blowup_projections(snap, es);
    double in = 0.0;
    for (int j : es.group_members(j0 - 1)) in += c[j] * c[j];
    return std::sqrt(std::max(0.0, snap.boundary_norm - in));
}

DominantGroup dominant_group(const BlowupSnapshot& snap, const EigenSystem& es) {
    const auto c = blowup_projections(snap, es);
    DominantGroup best;
    best.weight = -1.0;
    for (int j = 0; j < es.size(); ++j) {
        if (j > 0 && es.group[j] == es.group[j - 1]) continue;
        double wsum = 0.0;
        for (int i : es.group_members(j)) wsum += c[i] * c[i];
        if (wsum > best.weight + 1e-8) {
            best = {j + 1, wsum, false};
        } else if (std::abs(wsum - best.weight) <= 1e-8) {
            best.tie = true;
        }
    }
    return best;
}

FourierTrace fourier_coeffs(const ScalarField& field, const EigenSystem& es, const std::vector<double>& taus,
                            const ProblemParams& params, const Perturbation& h, int J) {
    if (!same_mesh(field.mesh(), es.mesh()) || std::abs(es.params.lambda() - params.lambda()) > 1e-14 ||
        std::abs(es.params.s() - params.s()) > 1e-14) {
        throw DomainError("fourier_coeffs: eigensystem was computed for another cap, mesh, s or lambda");
    }
    if (taus.empty()) throw DomainError("fourier_coeffs: no radii");
    for (std::size_t i = 1; i < taus.size(); ++i)
        if (!(taus[i] > taus[i - 1])) throw DomainError("fourier_coeffs: radii must be increasing");
    const int count = J <= 0 ? es.size() : std::min(J, es.size());
    FourierTrace ft;
    ft.taus = taus;
    ft.s = params.s();
    ft.N = params.N();
    ft.inner_radius = field.inner_radius();
    ft.phi.assign(count, std::vector<double>(taus.size(), 0.0));
    ft.upsilon.assign(count, std::vector<double>(taus.size(), 0.0));
    for (int m = 0; m < count; ++m) ft.modes.push_back(m + 1);
    const auto& M = field.forms().M;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const Eigen::VectorXd u = field.values_on_sphere(taus[i]);
        const Eigen::VectorXd Mu = M * u;
        ft.H.push_back(u.dot(Mu));
        for (int m = 0; m < count; ++m) ft.phi[m][i] = es.psi[m].dot(Mu);
    }
    if (!h.is_zero) {
        const HemisphereMesh& mesh = field.mesh();
        for (int m = 0; m < count; ++m) {
            double acc = 0.0;
            double prev = field.inner_radius();
            for (std::size_t i = 0; i < taus.size(); ++i) {
                acc += params.kappa() * field.radial_integral(prev, taus[i], [&](double rho) {
                    const Eigen::VectorXd u = field.values_on_sphere(rho);
                    return rho * equator_integral(mesh, u, es.psi[m], [&](double th) {
                               return h(rho * std::cos(th), rho * std::sin(th));
                           });
                });
                prev = taus[i];
                ft.upsilon[m][i] = acc;
            }
        }
    }
    return ft;
}

std::vector<double> fourier_zeta(const FourierTrace& ft, int m) {
    const auto& t = ft.taus;
    const auto& y = ft.upsilon.at(m);
    const std::size_t n = t.size();
    if (n < 3) throw DomainError("fourier_zeta: need at least three radii");
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t a = i == 0 ? 0 : (i + 1 == n ? n - 3 : i - 1);
        const double x0 = t[a], x1 = t[a + 1], x2 = t[a + 2];
        const double x = t[i];
        // derivative of the quadratic through three points
        const double d = y[a] * ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2)) +
                         y[a + 1] * ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2)) +
                         y[a + 2] * ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
        z[i] = std::pow(x, 2.0 * ft.s - ft.N - 1.0) * d;
    }
    return z;
}

std::vector<double> beta_coefficients(const FourierTrace& ft, double gamma, double R, const ProblemParams& params) {
    if (!(R > 0.0 && R < 1.0)) throw DomainError("beta_coefficients: R must lie in (0, 1)");
    const auto& t = ft.taus;
    if (R < t.front() * (1.0 - 1e-12) || R > t.back() * (1.0 + 1e-12)) {
        throw DomainError("beta_coefficients: R outside the sampled radii");
    }
    const double N = params.N(), s = params.s();
    const double denom = N + 2.0 * gamma - 2.0 * s;
    const double c1 = (N + gamma - 2.0 * s) / denom;
    const double c2 = gamma * std::pow(R, -N + 2.0 * s - 2.0 * gamma) / denom;
    const double a1 = -N - 1.0 + 2.0 * s - gamma;
    const double a2 = gamma - 1.0;
    std::vector<double> beta;
    for (std::size_t m = 0; m < ft.modes.size(); ++m) {
        // phi(R) / R^gamma, interpolated linearly in log tau
        double ratio;
        std::size_t k = std::upper_bound(t.begin(), t.end(), R) - t.begin();
        if (k == 0) k = 1;
        if (k >= t.size()) k = t.size() - 1;
        const std::size_t i0 = k - 1;
        if (std::abs(t[i0] - R) <= 1e-12 * R) {
            ratio = ft.phi[m][i0] / std::pow(R, gamma);
        } else if (std::abs(t[k] - R) <= 1e-12 * R) {
            ratio = ft.phi[m][k] / std::pow(R, gamma);
        } else {
            const double g0 = ft.phi[m][i0] / std::pow(t[i0], gamma);
            const double g1 = ft.phi[m][k] / std::pow(t[k], gamma);
            const double w = std::log(R / t[i0]) / std::log(t[k] / t[i0]);
            ratio = (1.0 - w) * g0 + w * g1;
        }
        double b = ratio;
        const auto& y = ft.upsilon[m];
        if (std::any_of(y.begin(), y.end(), [](double v) { return v != 0.0; })) {
            b += c1 * tail_integral(t, y, a1, R, ft.inner_radius) + c2 * tail_integral(t, y, a2, R, ft.inner_radius);
        }
        beta.push_back(b);
    }
    return beta;
}

PohozaevResult pohozaev_check(const ScalarField& field, const ProblemParams& params, const Perturbation& h, double r,
                              double tol) {
    const double s = params.s();
    const double kappa = params.kappa();
    const double lambda = params.lambda();
    const double N = params.N();
    const auto& forms = field.forms();
    const Eigen::VectorXd u = field.values_on_sphere(r);
    const Eigen::VectorXd ur = field.radial_derivative(r);
    const double w = std::pow(r, 3.0 - 2.0 * s);
    const double normal = w * ur.dot(forms.M * ur);
    const double grad_sphere = normal + w * u.dot(forms.K * u) / (r * r);
    const double hardy_sphere = std::pow(r, 1.0 - 2.0 * s) * u.dot(forms.B * u);
    double h_moment = 0.0, h_sphere = 0.0, h_volume = 0.0;
    if (!h.is_zero) {
        h_moment = field.trace_potential(r, [&](double x1, double x2) { return h.moment(x1, x2) + N * h(x1, x2); });
        h_sphere = r * equator_integral(field.mesh(), u, u,
                                        [&](double th) { return h(r * std::cos(th), r * std::sin(th)); });
        h_volume = field.trace_potential(r, as_thin(h));
    }
    const double bulk = field.bulk_energy(r);
    const double hardy_vol = lambda != 0.0 ? field.hardy_trace(r) : 0.0;

    PohozaevResult res;
    res.lhs = 0.5 * r * (grad_sphere - kappa * lambda * hardy_sphere) - r * normal + 0.5 * kappa * h_moment -
              0.5 * r * kappa * h_sphere;
    res.rhs = 0.5 * (N - 2.0 * s) * (bulk - kappa * lambda * hardy_vol);
    res.satisfied = res.lhs >= res.rhs - tol * (std::abs(res.lhs) + std::abs(res.rhs));
    res.identity_lhs = bulk - kappa * (lambda * hardy_vol + h_volume);
    res.identity_rhs = w * u.dot(forms.M * ur);
    const double scale = std::max({std::abs(res.identity_lhs), std::abs(res.identity_rhs), 1e-300});
    res.identity_residual = std::abs(res.identity_lhs - res.identity_rhs) / scale;
    if (std::abs(res.identity_lhs) < 1e-14 && std::abs(res.identity_rhs) < 1e-14) res.identity_residual = 0.0;
    return res;
}

}  // namespace conefrac
