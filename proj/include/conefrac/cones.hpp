#pragma once

// Hypographical cones in the plane (N = 2), their equatorial caps, the
// distance to the cone boundary and the smoothed cones C_n / domains Omega_n
// whose boundaries are star-shaped with respect to the origin.

#include <array>
#include <string>

namespace conefrac {

using Point2 = std::array<double, 2>;
using Point3 = std::array<double, 3>;

/// C = {x2 < phi(x1)} with phi(x1) = |x1| g(sign x1), or the whole plane.
class ConeProfile {
public:
    /// Graph cone with g(+1) = g_plus and g(-1) = g_minus.
    ConeProfile(double g_plus, double g_minus);

    static ConeProfile full_plane();
    /// g = 0: the half-plane {x2 < 0}.
    static ConeProfile half_plane();
    /// Symmetric graph cone whose cap has the given arc length in (0, 2pi).
    static ConeProfile with_arc_length(double arc_length);

    bool is_full() const { return full_; }
    double g_plus() const { return g_plus_; }
    double g_minus() const { return g_minus_; }
    /// max |g| over S^0; zero for the full plane.
    double M() const;

    /// Value of the profile on S^0 (direction sign of x1; x1 = 0 uses g_plus).
    double g(double direction) const { return direction >= 0.0 ? g_plus_ : g_minus_; }
    /// 1-homogeneous graph function.
    double phi(double x1) const;
    /// Derivative of phi away from the origin.
    double phi_prime(double x1) const;

    bool contains(const Point2& x) const;
    bool contains_closed(const Point2& x, double tol = 1e-12) const;

private:
    ConeProfile() = default;
    bool full_ = false;
    double g_plus_ = 0.0;
    double g_minus_ = 0.0;
};

/// Circular arc [start, start + length) on S^1, angles in radians.
/// length == 2 pi encodes the whole circle (C = R^2).
class SphericalCap {
public:
    SphericalCap(double start, double length);

    static SphericalCap full_circle();
    /// Lower half circle [pi, 2 pi), the cap of the half-plane {x2 < 0}.
    static SphericalCap half_circle();

    double start() const { return start_; }
    double length() const { return length_; }
    double end() const { return start_ + length_; }
    bool is_full() const;

    /// Half-open membership: the start angle belongs to the cap, the end does not.
    bool contains_angle(double theta, double tol = 1e-12) const;

private:
    double start_;
    double length_;
};

/// omega = C intersected with S^1. Throws DomainError on non-finite profiles.
SphericalCap cap_of_cone(const ConeProfile& cone);

/// Euclidean distance from x to the boundary of C (+inf for the full plane).
/// Throws DomainError if x lies outside the closed cone.
double distance_to_boundary(const ConeProfile& cone, const Point2& x);

/// Fixed smooth step on [1, 2] used to build f_n: zeta(tau) = sigma(tau - 1),
/// sigma(u) = e(u) / (e(u) + e(1-u)), e(u) = exp(-1/u) for u > 0.
double smoothing_step(double tau);

/// f_n(t) = int_{1/n^2}^t zeta(n^2 sigma) d sigma; closed form outside
/// (1/n^2, 2/n^2), adaptive Gauss-Kronrod inside.
double smoothing_profile(int n, double t);
/// f_n'(t) = zeta(n^2 t).
double smoothing_profile_derivative(int n, double t);
/// f_n(t) - t f_n'(t), evaluated without cancellation; lies in [-3/(2n^2), 0].
double smoothing_defect(int n, double t);

/// The smoothed cone C_n = {x2 < psi_n(x1)}, psi_n(x1) = 1/n + f_n(|x1|) g(x1/|x1|).
class SmoothedCone {
public:
    /// Throws DomainError if n < max(1, ceil(6 M)).
    SmoothedCone(ConeProfile cone, int n);

    static int minimal_index(const ConeProfile& cone);

    const ConeProfile& cone() const { return cone_; }
    int n() const { return n_; }

    double psi(double x1) const;
    double psi_prime(double x1) const;
    bool contains(const Point2& x) const { return x[1] < psi(x[0]); }

    /// Point of the boundary graph above x1.
    Point2 boundary_point(double x1) const { return {x1, psi(x1)}; }

private:
    ConeProfile cone_;
    int n_;
};

/// grad F(x) . x with F(x) = x2 - psi_n(x1) at a boundary point of C_n; the
/// lower bound 3/(4n) certifies star-shapedness. Throws DomainError if the
/// point is not on the graph within 1e-10.
double starshape_margin(const SmoothedCone& sc, const Point2& boundary_point);

enum class OmegaRegion { Interior, Sigma, Tau, Gamma, Exterior };

std::string to_string(OmegaRegion region);

/// Omega_n = {(x1, x2, t) : x2 < psi_n(x1) + (n/3) f_n(t)} intersected with the
/// upper half ball of radius R0, with boundary pieces sigma_n (flat part on
/// t = 0), tau_n (spherical lid) and gamma_n (the curved graph).
class ApproxDomain {
public:
    ApproxDomain(SmoothedCone cone, double R0);

    const SmoothedCone& smoothed() const { return sc_; }
    double R0() const { return R0_; }

    /// G(z) = x2 - psi_n(x1) - (n/3) f_n(t).
    double level(const Point3& z) const;
    bool contains(const Point3& z) const;
    OmegaRegion classify(const Point3& z, double tol = 1e-10) const;

    /// Point of the graph {G = 0} with prescribed (x1, t).
    Point3 graph_point(double x1, double t) const;

    /// z . (-psi_n'(x1), 1, -(n/3) f_n'(t)); bounded below by 1/(4n) on gamma_n.
    double gamma_margin(const Point3& z) const;
    /// z . nu(z) with the unit outward normal (the margin divided by |grad G|).
    double gamma_normal_product(const Point3& z) const;

private:
    SmoothedCone sc_;
    double R0_;
};

}  // namespace conefrac
