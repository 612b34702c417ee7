#include "conefrac/field.hpp"

#include "conefrac/error.hpp"
#include "conefrac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace conefrac {

namespace {

constexpr int kRadialPoints = 10;

double power_integral(double e, double r) {
    if (!(e > 0.0)) throw NumericalError("radial power is not integrable at the origin");
    return std::pow(r, e) / e;
}

}  // namespace

// ---------------------------------------------------------------- Perturbation

Perturbation Perturbation::zero() { return Perturbation{}; }

Perturbation Perturbation::constant(double c) {
    if (c == 0.0) return zero();
    Perturbation p;
    p.value = [c](double, double) { return c; };
    p.radial_moment = [](double, double) { return 0.0; };
    p.is_zero = false;
    std::ostringstream os;
    os.precision(17);
    os << c;
    p.description = os.str();
    return p;
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(std::shared_ptr<const AssembledForms> forms) : forms_(std::move(forms)) {
    if (!forms_) throw DomainError("ScalarField: no assembled forms");
}

void ScalarField::check_radius(double r, const char* what) const {
    const double lo = inner_radius(), hi = outer_radius();
    if (!(r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12)) || !(r > 0.0)) {
        std::ostringstream os;
        os << what << ": radius " << r << " outside the field range [" << lo << ", " << hi << "]";
        throw DomainError(os.str());
    }
}

double ScalarField::radial_integral(double a, double b, const std::function<double(double)>& f) const {
    if (b <= a) return 0.0;
    std::vector<double> cuts{a};
    for (double x : radial_breakpoints())
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i] == 0.0) {
            total += quad::integrate_geometric(f, cuts[i + 1] * 1e-10, cuts[i + 1], 60, kRadialPoints);
        } else {
            total += quad::integrate(f, cuts[i], cuts[i + 1], kRadialPoints);
        }
    }
    return total;
}

double ScalarField::bulk_energy(double r) const {
    check_radius(r, "bulk_energy");
    const double a = 1.0 - 2.0 * s();
    const auto& M = forms().M;
    const auto& K = forms().K;
    return radial_integral(inner_radius(), r, [&](double rho) {
        const Eigen::VectorXd u = values_on_sphere(rho);
        const Eigen::VectorXd ur = radial_derivative(rho);
        return std::pow(rho, a + 2.0) * ur.dot(M * ur) + std::pow(rho, a) * u.dot(K * u);
    });
}

double ScalarField::volume_l2(double r) const {
    check_radius(r, "volume_l2");
    const double a = 1.0 - 2.0 * s();
    const auto& M = forms().M;
    return radial_integral(inner_radius(), r, [&](double rho) {
        const Eigen::VectorXd u = values_on_sphere(rho);
        return std::pow(rho, a + 2.0) * u.dot(M * u);
    });
}

double ScalarField::hardy_trace(double r) const {
    check_radius(r, "hardy_trace");
    const double a = 1.0 - 2.0 * s();
    const auto& B = forms().B;
    return radial_integral(inner_radius(), r, [&](double rho) {
        const Eigen::VectorXd u = values_on_sphere(rho);
        return std::pow(rho, a) * u.dot(B * u);
    });
}

double ScalarField::trace_potential(double r, const ThinFunction& g) const {
    check_radius(r, "trace_potential");
    return radial_integral(inner_radius(), r, [&](double rho) {
        const Eigen::VectorXd u = values_on_sphere(rho);
        return rho * equator_integral(mesh(), u, u,
                                      [&](double th) { return g(rho * std::cos(th), rho * std::sin(th)); });
    });
}

double ScalarField::evaluate(const Point3& z) const {
    const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
    check_radius(r, "evaluate");
    const auto [t, theta] = sphere_coordinates(z);
    return mesh().interpolate(values_on_sphere(r), t, theta);
}

// ---------------------------------------------------------------- ModalField

ModalField::ModalField(const EigenSystem& es, std::vector<std::pair<int, double>> coefficients)
    : ScalarField(es.forms), coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) throw DomainError("manufactured_field: empty coefficient list");
    for (const auto& [j, beta] : coeffs_) {
        if (j < 1 || j > es.size()) throw DomainError("manufactured_field: mode index out of range");
        if (std::isnan(es.gamma[j - 1])) throw DomainError("manufactured_field: mode below the spectrum floor");
        gammas_.push_back(es.gamma[j - 1]);
        betas_.push_back(beta);
        psis_.push_back(es.psi[j - 1]);
    }
    const int m = static_cast<int>(psis_.size());
    Mjk_.resize(m, m);
    Kjk_.resize(m, m);
    Bjk_.resize(m, m);
    for (int p = 0; p < m; ++p) {
        const Eigen::VectorXd Mp = forms().M * psis_[p];
        const Eigen::VectorXd Kp = forms().K * psis_[p];
        const Eigen::VectorXd Bp = forms().B * psis_[p];
        for (int q = 0; q < m; ++q) {
            Mjk_(p, q) = Mp.dot(psis_[q]);
            Kjk_(p, q) = Kp.dot(psis_[q]);
            Bjk_(p, q) = Bp.dot(psis_[q]);
        }
    }
}

Eigen::VectorXd ModalField::values_on_sphere(double r) const {
    check_radius(r, "values_on_sphere");
    Eigen::VectorXd u = Eigen::VectorXd::Zero(mesh().dof_count());
    for (std::size_t p = 0; p < psis_.size(); ++p) u += betas_[p] * std::pow(r, gammas_[p]) * psis_[p];
    return u;
}

Eigen::VectorXd ModalField::radial_derivative(double r) const {
    check_radius(r, "radial_derivative");
    Eigen::VectorXd u = Eigen::VectorXd::Zero(mesh().dof_count());
    for (std::size_t p = 0; p < psis_.size(); ++p) {
        if (gammas_[p] != 0.0) u += betas_[p] * gammas_[p] * std::pow(r, gammas_[p] - 1.0) * psis_[p];
    }
    return u;
}

double ModalField::bulk_energy(double r) const {
    check_radius(r, "bulk_energy");
    const double base = 2.0 - 2.0 * s();
    double total = 0.0;
    for (std::size_t p = 0; p < psis_.size(); ++p) {
        for (std::size_t q = 0; q < psis_.size(); ++q) {
            const double c = gammas_[p] * gammas_[q] * Mjk_(p, q) + Kjk_(p, q);
            if (c == 0.0) continue;
            total += betas_[p] * betas_[q] * c * power_integral(gammas_[p] + gammas_[q] + base, r);
        }
    }
    return total;
}

double ModalField::volume_l2(double r) const {
    check_radius(r, "volume_l2");
    const double base = 4.0 - 2.0 * s();
    double total = 0.0;
    for (std::size_t p = 0; p < psis_.size(); ++p)
        for (std::size_t q = 0; q < psis_.size(); ++q)
            total += betas_[p] * betas_[q] * Mjk_(p, q) * power_integral(gammas_[p] + gammas_[q] + base, r);
    return total;
}

double ModalField::hardy_trace(double r) const {
    check_radius(r, "hardy_trace");
    const double base = 2.0 - 2.0 * s();
    double total = 0.0;
    for (std::size_t p = 0; p < psis_.size(); ++p) {
        for (std::size_t q = 0; q < psis_.size(); ++q) {
            if (std::abs(Bjk_(p, q)) < 1e-300) continue;
            const double e = gammas_[p] + gammas_[q] + base;
            if (!(e > 0.0)) {
                throw NumericalError(
                    "hardy_trace: |x|^{-2s} |Tr U|^2 is not integrable at the vertex (trace does not vanish fast "
                    "enough)");
            }
            total += betas_[p] * betas_[q] * Bjk_(p, q) * std::pow(r, e) / e;
        }
    }
    return total;
}

std::shared_ptr<ModalField> manufactured_field(const EigenSystem& es,
                                               const std::vector<std::pair<int, double>>& coefficients) {
    return std::make_shared<ModalField>(es, coefficients);
}

// ---------------------------------------------------------------- GridField

GridField::GridField(std::shared_ptr<const AssembledForms> forms, std::vector<double> radii,
                     std::vector<Eigen::VectorXd> shell_values)
    : ScalarField(std::move(forms)), radii_(std::move(radii)), values_(std::move(shell_values)) {
    if (radii_.size() < 2 || radii_.size() != values_.size()) throw DomainError("GridField: need matching shells");
    for (std::size_t k = 0; k < radii_.size(); ++k) {
        if (!(radii_[k] > 0.0) || (k > 0 && !(radii_[k] > radii_[k - 1]))) {
            throw DomainError("GridField: radii must be positive and increasing");
        }
        if (values_[k].size() != mesh().dof_count()) throw DomainError("GridField: shell size does not match mesh");
    }
    auto build = [&](const SpMat& X) {
        std::vector<std::array<double, 3>> out(radii_.size() - 1);
        for (std::size_t k = 0; k + 1 < radii_.size(); ++k) {
            const Eigen::VectorXd Xa = X * values_[k];
            const Eigen::VectorXd Xb = X * values_[k + 1];
            out[k] = {values_[k].dot(Xa), values_[k].dot(Xb), values_[k + 1].dot(Xb)};
        }
        return out;
    };
    mform_ = build(this->forms().M);
    kform_ = build(this->forms().K);
    bform_ = build(this->forms().B);
}

int GridField::cell_of(double r) const {
    int k = static_cast<int>(std::upper_bound(radii_.begin(), radii_.end(), r) - radii_.begin()) - 1;
    return std::clamp(k, 0, static_cast<int>(radii_.size()) - 2);
}

Eigen::VectorXd GridField::values_on_sphere(double r) const {
    check_radius(r, "values_on_sphere");
    const int k = cell_of(r);
    const double w = std::clamp((r - radii_[k]) / (radii_[k + 1] - radii_[k]), 0.0, 1.0);
    return (1.0 - w) * values_[k] + w * values_[k + 1];
}

Eigen::VectorXd GridField::radial_derivative(double r) const {
    check_radius(r, "radial_derivative");
    // derivative of the cubic through the four shells around r (fewer on tiny grids)
    const int n = static_cast<int>(radii_.size());
    const int m = std::min(n, 4);
    const int first = std::clamp(cell_of(r) - 1, 0, n - m);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(values_[0].size());
    for (int a = first; a < first + m; ++a) {
        // l_a'(r) = sum_{b != a} 1/(r_a - r_b) prod_{c != a, b} (r - r_c)/(r_a - r_c)
        double w = 0.0;
        for (int b = first; b < first + m; ++b) {
            if (b == a) continue;
            double term = 1.0 / (radii_[a] - radii_[b]);
            for (int c = first; c < first + m; ++c)
                if (c != a && c != b) term *= (r - radii_[c]) / (radii_[a] - radii_[c]);
            w += term;
        }
        d += w * values_[a];
    }
    return d;
}

double GridField::cell_form(double r, double exponent, const std::vector<std::array<double, 3>>& form,
                            bool derivative) const {
    const auto& rule = quad::gauss_legendre(kRadialPoints);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < radii_.size(); ++k) {
        const double ra = radii_[k], rb = radii_[k + 1];
        if (r <= ra) break;
        const double hi = std::min(r, rb);
        const double len = rb - ra;
        double i00 = 0.0, i01 = 0.0, i11 = 0.0, i = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double rho = ra + (hi - ra) * rule.nodes[q];
            const double w = rule.weights[q] * (hi - ra) * std::pow(rho, exponent);
            const double p1 = (rho - ra) / len, p0 = 1.0 - p1;
            i00 += w * p0 * p0;
            i01 += w * p0 * p1;
            i11 += w * p1 * p1;
            i += w;
        }
        const auto& f = form[k];
        if (derivative) {
            total += i / (len * len) * (f[0] - 2.0 * f[1] + f[2]);
        } else {
            total += i00 * f[0] + 2.0 * i01 * f[1] + i11 * f[2];
        }
    }
    return total;
}

double GridField::bulk_energy(double r) const {
    check_radius(r, "bulk_energy");
    const double a = 1.0 - 2.0 * s();
    return core_ + cell_form(r, a + 2.0, mform_, true) + cell_form(r, a, kform_, false);
}

double GridField::volume_l2(double r) const {
    check_radius(r, "volume_l2");
    return cell_form(r, 3.0 - 2.0 * s(), mform_, false);
}

double GridField::hardy_trace(double r) const {
    check_radius(r, "hardy_trace");
    return cell_form(r, 1.0 - 2.0 * s(), bform_, false);
}

// ---------------------------------------------------------------- ScaledField

ScaledField::ScaledField(std::shared_ptr<const ScalarField> base, double tau, double divisor)
    : ScalarField(base->forms_ptr()), base_(std::move(base)), tau_(tau), divisor_(divisor) {
    if (!(tau > 0.0)) throw DomainError("ScaledField: tau must be positive");
    if (!(divisor > 0.0)) throw DomainError("ScaledField: divisor must be positive");
}

std::vector<double> ScaledField::radial_breakpoints() const {
    std::vector<double> b = base_->radial_breakpoints();
    for (double& x : b) x /= tau_;
    return b;
}

Eigen::VectorXd ScaledField::values_on_sphere(double r) const {
    return base_->values_on_sphere(tau_ * r) / divisor_;
}

Eigen::VectorXd ScaledField::radial_derivative(double r) const {
    return base_->radial_derivative(tau_ * r) * (tau_ / divisor_);
}

double ScaledField::bulk_energy(double r) const {
    return std::pow(tau_, 2.0 * s() - 2.0) * base_->bulk_energy(tau_ * r) / (divisor_ * divisor_);
}

double ScaledField::volume_l2(double r) const {
    return std::pow(tau_, 2.0 * s() - 4.0) * base_->volume_l2(tau_ * r) / (divisor_ * divisor_);
}

double ScaledField::hardy_trace(double r) const {
    return std::pow(tau_, 2.0 * s() - 2.0) * base_->hardy_trace(tau_ * r) / (divisor_ * divisor_);
}

double ScaledField::trace_potential(double r, const ThinFunction& g) const {
    const double tau = tau_;
    ThinFunction scaled = [&g, tau](double y1, double y2) { return g(y1 / tau, y2 / tau); };
    return base_->trace_potential(tau_ * r, scaled) / (tau_ * tau_ * divisor_ * divisor_);
}

// ---------------------------------------------------------------- CombinedField

CombinedField::CombinedField(std::shared_ptr<const ScalarField> u, double a, std::shared_ptr<const ScalarField> v,
                             double b)
    : ScalarField(u->forms_ptr()), u_(std::move(u)), v_(std::move(v)), a_(a), b_(b) {
    if (u_->mesh().dof_count() != v_->mesh().dof_count()) throw DomainError("CombinedField: meshes differ");
}

double CombinedField::inner_radius() const { return std::max(u_->inner_radius(), v_->inner_radius()); }

double CombinedField::outer_radius() const { return std::min(u_->outer_radius(), v_->outer_radius()); }

std::vector<double> CombinedField::radial_breakpoints() const {
    std::vector<double> b = u_->radial_breakpoints();
    const auto c = v_->radial_breakpoints();
    b.insert(b.end(), c.begin(), c.end());
    std::sort(b.begin(), b.end());
    return b;
}

Eigen::VectorXd CombinedField::values_on_sphere(double r) const {
    return a_ * u_->values_on_sphere(r) + b_ * v_->values_on_sphere(r);
}

Eigen::VectorXd CombinedField::radial_derivative(double r) const {
    return a_ * u_->radial_derivative(r) + b_ * v_->radial_derivative(r);
}

}  // namespace conefrac
