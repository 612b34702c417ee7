#pragma once

#include <functional>
#include <vector>

namespace conefrac::quad {

/// Nodes and weights of a one-dimensional rule on [0, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [0, 1]. Cached; thread safe.
const Rule& gauss_legendre(int n);

/// n-point Gauss rule for the weight x^a on [0, 1] (a > -1), via Golub-Welsch
/// on the Jacobi recurrence. Exact for x^a times polynomials of degree 2n-1.
const Rule& gauss_jacobi_left(int n, double a);

/// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
double integrate(const std::function<double(double)>& f, double a, double b, int n = 16);

/// Integral of f over [a, b] after splitting into geometrically growing
/// pieces from a towards b, each integrated with Gauss-Legendre. Suited to
/// integrands with power-law behaviour at a small positive left end.
double integrate_geometric(const std::function<double(double)>& f, double a, double b, int pieces, int n = 12);

}  // namespace conefrac::quad
