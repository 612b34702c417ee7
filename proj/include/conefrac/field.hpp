#pragma once

// Scalar fields U on the upper half ball B_1^+ (N = 2), described shell by
// shell through their values on the hemisphere mesh, and the perturbation h
// of the weighted Neumann condition.

#include "conefrac/cones.hpp"
#include "conefrac/sphercap.hpp"
#include "conefrac/spectral.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace conefrac {

/// h(x1, x2) on the thin space together with x . grad h.
struct Perturbation {
    std::function<double(double, double)> value;
    std::function<double(double, double)> radial_moment;
    bool is_zero = true;
    std::string description = "0";

    static Perturbation zero();
    static Perturbation constant(double c);
    double operator()(double x1, double x2) const { return is_zero ? 0.0 : value(x1, x2); }
    double moment(double x1, double x2) const { return is_zero ? 0.0 : radial_moment(x1, x2); }
};

using ThinFunction = std::function<double(double, double)>;

class ScalarField {
public:
    explicit ScalarField(std::shared_ptr<const AssembledForms> forms);
    virtual ~ScalarField() = default;

    const AssembledForms& forms() const { return *forms_; }
    std::shared_ptr<const AssembledForms> forms_ptr() const { return forms_; }
    const HemisphereMesh& mesh() const { return forms_->mesh; }
    double s() const { return forms_->s; }

    /// Radial range on which the field is defined; integrals start at inner_radius().
    virtual double inner_radius() const { return 0.0; }
    virtual double outer_radius() const { return 1.0; }
    /// Radii where the field is only piecewise smooth in r.
    virtual std::vector<double> radial_breakpoints() const { return {}; }

    /// Dof vector of U(r theta) on the hemisphere mesh.
    virtual Eigen::VectorXd values_on_sphere(double r) const = 0;
    /// Dof vector of dU/dr (r theta).
    virtual Eigen::VectorXd radial_derivative(double r) const = 0;

    /// int_{B_r^+} t^{1-2s} |grad U|^2 dz (over r >= inner_radius()).
    virtual double bulk_energy(double r) const;
    /// int_{B_r^+} t^{1-2s} U^2 dz.
    virtual double volume_l2(double r) const;
    /// int_{B'_r} |x|^{-2s} |Tr U|^2 dx.
    virtual double hardy_trace(double r) const;
    /// int_{B'_r} g(x) |Tr U|^2 dx.
    virtual double trace_potential(double r, const ThinFunction& g) const;

    /// Pointwise value by interpolation on the sphere of radius |z|.
    double evaluate(const Point3& z) const;

    /// int_a^b f(rho) d rho split at the breakpoints; a = 0 uses geometric pieces.
    double radial_integral(double a, double b, const std::function<double(double)>& f) const;

protected:
    void check_radius(double r, const char* what) const;

private:
    std::shared_ptr<const AssembledForms> forms_;
};

/// sum_j beta_j |z|^{gamma_j} psi_j(z / |z|) for modes of an eigensystem.
/// Energies use the closed forms of the radial powers.
class ModalField : public ScalarField {
public:
    /// coefficients: (one-based mode index, amplitude). Throws DomainError for
    /// an empty list or an invalid index.
    ModalField(const EigenSystem& es, std::vector<std::pair<int, double>> coefficients);

    const std::vector<std::pair<int, double>>& coefficients() const { return coeffs_; }
    const std::vector<double>& gammas() const { return gammas_; }

    Eigen::VectorXd values_on_sphere(double r) const override;
    Eigen::VectorXd radial_derivative(double r) const override;
    double bulk_energy(double r) const override;
    double volume_l2(double r) const override;
    /// Throws NumericalError when |x|^{-2s} Tr U^2 is not integrable at 0.
    double hardy_trace(double r) const override;

private:
    std::vector<std::pair<int, double>> coeffs_;
    std::vector<double> gammas_;
    std::vector<double> betas_;
    std::vector<Eigen::VectorXd> psis_;
    Eigen::MatrixXd Mjk_, Kjk_, Bjk_;
};

/// Field sampled on geometric shells r_0 < ... < r_{n-1}, linear in r between
/// shells (the finite element space of the extension solver).
class GridField : public ScalarField {
public:
    GridField(std::shared_ptr<const AssembledForms> forms, std::vector<double> radii,
              std::vector<Eigen::VectorXd> shell_values);

    const std::vector<double>& radii() const { return radii_; }
    const std::vector<Eigen::VectorXd>& shell_values() const { return values_; }

    double inner_radius() const override { return radii_.front(); }
    double outer_radius() const override { return radii_.back(); }
    std::vector<double> radial_breakpoints() const override { return radii_; }

    Eigen::VectorXd values_on_sphere(double r) const override;
    /// Slope of the containing cell; the mean of both slopes at an interior shell.
    Eigen::VectorXd radial_derivative(double r) const override;
    /// Includes the core term set by set_core_energy.
    double bulk_energy(double r) const override;
    double volume_l2(double r) const override;
    double hardy_trace(double r) const override;

    /// Energy (bulk minus kappa*lambda*Hardy) of a known extension inside the inner shell.
    void set_core_energy(double e) { core_ = e; }
    double core_energy() const { return core_; }

private:
    int cell_of(double r) const;
    // sum over cells of int rho^e phi_p phi_q times the shell quadratic forms
    double cell_form(double r, double exponent, const std::vector<std::array<double, 3>>& form, bool derivative) const;

    std::vector<double> radii_;
    std::vector<Eigen::VectorXd> values_;
    std::vector<std::array<double, 3>> mform_, kform_, bform_;
    double core_ = 0.0;
};

/// w(z) = U(tau z) / c.
class ScaledField : public ScalarField {
public:
    ScaledField(std::shared_ptr<const ScalarField> base, double tau, double divisor);

    double tau() const { return tau_; }
    double inner_radius() const override { return base_->inner_radius() / tau_; }
    double outer_radius() const override { return base_->outer_radius() / tau_; }
    std::vector<double> radial_breakpoints() const override;
    Eigen::VectorXd values_on_sphere(double r) const override;
    Eigen::VectorXd radial_derivative(double r) const override;
    double bulk_energy(double r) const override;
    double volume_l2(double r) const override;
    double hardy_trace(double r) const override;
    double trace_potential(double r, const ThinFunction& g) const override;

private:
    std::shared_ptr<const ScalarField> base_;
    double tau_;
    double divisor_;
};

/// a U + b V for fields on the same mesh; energies by radial quadrature.
class CombinedField : public ScalarField {
public:
    CombinedField(std::shared_ptr<const ScalarField> u, double a, std::shared_ptr<const ScalarField> v, double b);

    double inner_radius() const override;
    double outer_radius() const override;
    std::vector<double> radial_breakpoints() const override;
    Eigen::VectorXd values_on_sphere(double r) const override;
    Eigen::VectorXd radial_derivative(double r) const override;

private:
    std::shared_ptr<const ScalarField> u_, v_;
    double a_, b_;
};

/// Modal field of an eigensystem (the h = 0 superposition of homogeneous profiles).
std::shared_ptr<ModalField> manufactured_field(const EigenSystem& es,
                                               const std::vector<std::pair<int, double>>& coefficients);

}  // namespace conefrac
