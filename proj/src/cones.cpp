#include "conefrac/cones.hpp"

#include "conefrac/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace conefrac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

double bump(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

// sigma(u) on [0,1]; 0 below, 1 above. Satisfies 1 - sigma(u) = sigma(1 - u).
double sigma_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = bump(u);
    const double b = bump(1.0 - u);
    return a / (a + b);
}

// int_0^w sigma(v) dv for w in [0, 1/2].
double sigma_integral_small(double w) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    if (w <= 0.0) return 0.0;
    // Boost's tolerance is relative to the L1 norm; convert the absolute target.
    double err = 0.0, l1 = 0.0;
    GK::integrate(sigma_step, 0.0, w, 0, 0.0, &err, &l1);
    const double tol = std::clamp(1e-14 / std::max(l1, 1e-300), 1e-15, 1e-2);
    const double value = GK::integrate(sigma_step, 0.0, w, 15, tol, &err);
    if (err > 1e-14) throw NumericalError("smoothing_profile: quadrature did not reach 1e-14");
    return value;
}

}  // namespace

// ---------------------------------------------------------------- ConeProfile

ConeProfile::ConeProfile(double g_plus, double g_minus) : full_(false), g_plus_(g_plus), g_minus_(g_minus) {
    if (!std::isfinite(g_plus) || !std::isfinite(g_minus)) {
        throw DomainError("ConeProfile: g values must be finite");
    }
}

ConeProfile ConeProfile::full_plane() {
    ConeProfile c;
    c.full_ = true;
    return c;
}

ConeProfile ConeProfile::half_plane() { return ConeProfile(0.0, 0.0); }

ConeProfile ConeProfile::with_arc_length(double arc_length) {
    if (!(arc_length > 0.0 && arc_length < kTwoPi)) {
        throw DomainError("ConeProfile::with_arc_length: arc length must lie in (0, 2pi)");
    }
    const double g = std::tan(0.5 * (arc_length - std::numbers::pi));
    return ConeProfile(g, g);
}

double ConeProfile::M() const { return full_ ? 0.0 : std::max(std::abs(g_plus_), std::abs(g_minus_)); }

double ConeProfile::phi(double x1) const {
    if (full_) return std::numeric_limits<double>::infinity();
    return std::abs(x1) * g(x1);
}

double ConeProfile::phi_prime(double x1) const {
    if (full_) return 0.0;
    return x1 >= 0.0 ? g_plus_ : -g_minus_;
}

bool ConeProfile::contains(const Point2& x) const { return full_ || x[1] < phi(x[0]); }

bool ConeProfile::contains_closed(const Point2& x, double tol) const {
    return full_ || x[1] <= phi(x[0]) + tol * std::max(1.0, std::hypot(x[0], x[1]));
}

// ---------------------------------------------------------------- SphericalCap

SphericalCap::SphericalCap(double start, double length) : start_(wrap_angle(start)), length_(length) {
    if (!(length > 0.0) || length > kTwoPi + 1e-12) {
        throw DomainError("SphericalCap: arc length must lie in (0, 2pi]");
    }
    if (length_ > kTwoPi - 1e-12) {
        length_ = kTwoPi;
        start_ = 0.0;
    }
}

SphericalCap SphericalCap::full_circle() { return SphericalCap(0.0, kTwoPi); }

SphericalCap SphericalCap::half_circle() { return SphericalCap(std::numbers::pi, std::numbers::pi); }

bool SphericalCap::is_full() const { return length_ >= kTwoPi; }

bool SphericalCap::contains_angle(double theta, double tol) const {
    if (is_full()) return true;
    double d = wrap_angle(theta - start_);
    if (d > kTwoPi - tol) d = 0.0;
    return d < length_ - tol;
}

SphericalCap cap_of_cone(const ConeProfile& cone) {
    if (cone.is_full()) return SphericalCap::full_circle();
    // Boundary rays (1, g+) and (-1, g-); the cap runs counter-clockwise from
    // the left ray through 3pi/2 to the right ray.
    const double start = std::numbers::pi - std::atan(cone.g_minus());
    const double length = std::numbers::pi + std::atan(cone.g_plus()) + std::atan(cone.g_minus());
    if (!(length > 0.0)) throw DomainError("cap_of_cone: cone has empty interior");
    return SphericalCap(start, length);
}

double distance_to_boundary(const ConeProfile& cone, const Point2& x) {
    if (!cone.contains_closed(x)) throw DomainError("distance_to_boundary: point lies outside the closed cone");
    if (cone.is_full()) return std::numeric_limits<double>::infinity();
    auto ray_distance = [&](double dx, double dy) {
        const double len = std::hypot(dx, dy);
        dx /= len;
        dy /= len;
        const double proj = x[0] * dx + x[1] * dy;
        if (proj <= 0.0) return std::hypot(x[0], x[1]);
        return std::abs(x[0] * dy - x[1] * dx);
    };
    return std::min(ray_distance(1.0, cone.g_plus()), ray_distance(-1.0, cone.g_minus()));
}

// ---------------------------------------------------------------- smoothing

double smoothing_step(double tau) { return sigma_step(tau - 1.0); }

double smoothing_profile(int n, double t) {
    if (n < 1) throw DomainError("smoothing_profile: n must be >= 1");
    if (t < 0.0) throw DomainError("smoothing_profile: t must be nonnegative");
    const double n2 = static_cast<double>(n) * n;
    if (t <= 1.0 / n2) return 0.0;
    if (t >= 2.0 / n2) return t - 1.5 / n2;
    const double u = n2 * t - 1.0;
    if (u <= 0.5) return sigma_integral_small(u) / n2;
    // int_0^u sigma = u - 1/2 + int_0^{1-u} sigma by the symmetry of sigma
    return (u - 0.5 + sigma_integral_small(1.0 - u)) / n2;
}

double smoothing_profile_derivative(int n, double t) {
    if (n < 1) throw DomainError("smoothing_profile_derivative: n must be >= 1");
    const double n2 = static_cast<double>(n) * n;
    return smoothing_step(n2 * t);
}

double smoothing_defect(int n, double t) {
    if (n < 1) throw DomainError("smoothing_defect: n must be >= 1");
    if (t < 0.0) throw DomainError("smoothing_defect: t must be nonnegative");
    const double n2 = static_cast<double>(n) * n;
    if (t <= 1.0 / n2) return 0.0;
    if (t >= 2.0 / n2) return -1.5 / n2;
    const double u = n2 * t - 1.0;
    if (u <= 0.5) {
        // f - t f' = (I(u) - (1 + u) sigma(u)) / n^2
        return (sigma_integral_small(u) - (1.0 + u) * sigma_step(u)) / n2;
    }
    // with w = 1 - u: f - t f' = (-3/2 + I(w) + (2 - w) sigma(w)) / n^2
    const double w = 1.0 - u;
    return (-1.5 + (sigma_integral_small(w) + (2.0 - w) * sigma_step(w))) / n2;
}

// ---------------------------------------------------------------- SmoothedCone

int SmoothedCone::minimal_index(const ConeProfile& cone) {
    return std::max(1, static_cast<int>(std::ceil(6.0 * cone.M())));
}

SmoothedCone::SmoothedCone(ConeProfile cone, int n) : cone_(cone), n_(n) {
    if (cone_.is_full()) throw DomainError("SmoothedCone: the full plane has no boundary to smooth");
    if (n < minimal_index(cone_)) {
        throw DomainError("SmoothedCone: n = " + std::to_string(n) + " is below n0 = ceil(6M) = " +
                          std::to_string(minimal_index(cone_)));
    }
}

double SmoothedCone::psi(double x1) const {
    return 1.0 / n_ + smoothing_profile(n_, std::abs(x1)) * cone_.g(x1);
}

double SmoothedCone::psi_prime(double x1) const {
    const double sign = x1 >= 0.0 ? 1.0 : -1.0;
    return smoothing_profile_derivative(n_, std::abs(x1)) * sign * cone_.g(x1);
}

double starshape_margin(const SmoothedCone& sc, const Point2& p) {
    const double offset = p[1] - sc.psi(p[0]);
    if (std::abs(offset) > 1e-10) throw DomainError("starshape_margin: point is not on the boundary of C_n");
    // x2 - psi'(x1) x1 = offset + 1/n + g (f_n - |x1| f_n')
    return offset + 1.0 / sc.n() + sc.cone().g(p[0]) * smoothing_defect(sc.n(), std::abs(p[0]));
}

// ---------------------------------------------------------------- ApproxDomain

std::string to_string(OmegaRegion region) {
    switch (region) {
        case OmegaRegion::Interior: return "interior";
        case OmegaRegion::Sigma: return "sigma";
        case OmegaRegion::Tau: return "tau";
        case OmegaRegion::Gamma: return "gamma";
        case OmegaRegion::Exterior: return "exterior";
    }
    return "unknown";
}

ApproxDomain::ApproxDomain(SmoothedCone cone, double R0) : sc_(std::move(cone)), R0_(R0) {
    if (!(R0 > 0.0)) throw DomainError("ApproxDomain: R0 must be positive");
}

double ApproxDomain::level(const Point3& z) const {
    const double lift = z[2] > 0.0 ? smoothing_profile(sc_.n(), z[2]) : 0.0;
    return z[1] - sc_.psi(z[0]) - (sc_.n() / 3.0) * lift;
}

bool ApproxDomain::contains(const Point3& z) const {
    const double norm = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
    return z[2] > 0.0 && norm < R0_ && level(z) < 0.0;
}

OmegaRegion ApproxDomain::classify(const Point3& z, double tol) const {
    const double norm = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
    if (z[2] < -tol || norm > R0_ + tol) return OmegaRegion::Exterior;
    if (std::abs(z[2]) <= tol) {
        if (norm < R0_ - tol && sc_.contains({z[0], z[1]})) return OmegaRegion::Sigma;
        return OmegaRegion::Exterior;
    }
    const double G = level(z);
    if (std::abs(G) <= tol && norm < R0_ - tol) return OmegaRegion::Gamma;
    if (G < -tol) {
        if (std::abs(norm - R0_) <= tol) return OmegaRegion::Tau;
        if (norm < R0_) return OmegaRegion::Interior;
    }
    return OmegaRegion::Exterior;
}

Point3 ApproxDomain::graph_point(double x1, double t) const {
    return {x1, sc_.psi(x1) + (sc_.n() / 3.0) * smoothing_profile(sc_.n(), t), t};
}

double ApproxDomain::gamma_margin(const Point3& z) const {
    const int n = sc_.n();
    return level(z) + 1.0 / n + sc_.cone().g(z[0]) * smoothing_defect(n, std::abs(z[0])) +
           (n / 3.0) * smoothing_defect(n, z[2]);
}

double ApproxDomain::gamma_normal_product(const Point3& z) const {
    const int n = sc_.n();
    const double dp = sc_.psi_prime(z[0]);
    const double dt = (n / 3.0) * smoothing_profile_derivative(n, z[2]);
    return gamma_margin(z) / std::sqrt(dp * dp + 1.0 + dt * dt);
}

}  // namespace conefrac
