#include "conefrac/quadrature.hpp"

#include "conefrac/error.hpp"
#include "conefrac/params.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace conefrac::quad {

namespace {

// Golub-Welsch for the Jacobi weight (1-x)^alpha (1+x)^beta on [-1, 1],
// returned mapped to [0, 1] with the weight rescaled to x^beta (alpha = 0)
// or to 1 (alpha = beta = 0).
Rule golub_welsch_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw DomainError("quadrature: rule size must be positive");
    const double ab = alpha + beta;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double kk = k;
        if (k == 0) {
            J(0, 0) = (beta - alpha) / (ab + 2.0);
        } else {
            J(k, k) = (beta * beta - alpha * alpha) / ((2.0 * kk + ab) * (2.0 * kk + ab + 2.0));
        }
        if (k + 1 < n) {
            const double m = kk + 1.0;
            const double num = 4.0 * m * (m + alpha) * (m + beta) * (m + ab);
            const double den = std::pow(2.0 * m + ab, 2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0);
            const double off = std::sqrt(num / den);
            J(k, k + 1) = off;
            J(k + 1, k) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
    const double mu0 = std::pow(2.0, ab + 1.0) * lanczos_gamma(alpha + 1.0) * lanczos_gamma(beta + 1.0) /
                       lanczos_gamma(ab + 2.0);
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Map xi in [-1,1] to x = (1 + xi)/2; (1+xi)^beta = 2^beta x^beta, d xi = 2 dx.
    const double scale = std::pow(2.0, -beta - alpha - 1.0);
    for (int i = 0; i < n; ++i) {
        const double v0 = eig.eigenvectors()(0, i);
        rule.nodes[i] = 0.5 * (1.0 + eig.eigenvalues()(i));
        rule.weights[i] = mu0 * v0 * v0 * scale;
    }
    return rule;
}

std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

const Rule& gauss_legendre(int n) {
    static std::map<int, std::unique_ptr<Rule>> cache;
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<Rule>(golub_welsch_jacobi(n, 0.0, 0.0))).first;
    return *it->second;
}

const Rule& gauss_jacobi_left(int n, double a) {
    if (!(a > -1.0)) throw DomainError("gauss_jacobi_left: exponent must exceed -1");
    static std::map<std::pair<int, double>, std::unique_ptr<Rule>> cache;
    std::lock_guard<std::mutex> lock(cache_mutex());
    const auto key = std::make_pair(n, a);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<Rule>(golub_welsch_jacobi(n, 0.0, a))).first;
    return *it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int n) {
    const Rule& rule = gauss_legendre(n);
    const double h = b - a;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(a + h * rule.nodes[i]);
    return sum * h;
}

double integrate_geometric(const std::function<double(double)>& f, double a, double b, int pieces, int n) {
    if (!(a > 0.0 && b > a)) throw DomainError("integrate_geometric: need 0 < a < b");
    const double q = std::pow(b / a, 1.0 / pieces);
    double sum = 0.0;
    double lo = a;
    for (int i = 0; i < pieces; ++i) {
        const double hi = (i + 1 == pieces) ? b : lo * q;
        sum += integrate(f, lo, hi, n);
        lo = hi;
    }
    return sum;
}

}  // namespace conefrac::quad
