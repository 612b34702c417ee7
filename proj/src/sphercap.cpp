#include "conefrac/sphercap.hpp"

#include "conefrac/error.hpp"
#include "conefrac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace conefrac {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kCellPoints = 32;
constexpr int kJacobiPoints = 24;

double wrap(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

// int_{ta}^{tb} (sin t)^a F(t) dt. The first cell starts at t = 0 where the
// weight behaves like t^a; it is integrated with the Jacobi rule for x^a and
// the smooth remainder (sin t / t)^a.
double weighted_cell_integral(double ta, double tb, double a, bool first, const std::function<double(double)>& F) {
    const double h = tb - ta;
    double sum = 0.0;
    if (first) {
        const auto& rule = quad::gauss_jacobi_left(kJacobiPoints, a);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double t = h * rule.nodes[q];
            const double ratio = std::sin(t) / t;
            sum += rule.weights[q] * std::pow(ratio, a) * F(t);
        }
        return sum * std::pow(h, a + 1.0);
    }
    const auto& rule = quad::gauss_legendre(kCellPoints);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double t = ta + h * rule.nodes[q];
        sum += rule.weights[q] * std::pow(std::sin(t), a) * F(t);
    }
    return sum * h;
}

SpMat restrict_matrix(const SpMat& A, const HemisphereMesh& mesh) {
    const int n = static_cast<int>(mesh.retained().size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(A.nonZeros());
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            const int r = mesh.reduced_index(static_cast<int>(it.row()));
            const int c = mesh.reduced_index(static_cast<int>(it.col()));
            if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
        }
    }
    SpMat out(n, n);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

}  // namespace

// ---------------------------------------------------------------- mesh

HemisphereMesh::HemisphereMesh(int n_t, int n_theta, double s, SphericalCap cap, double grading)
    : n_t_(n_t), n_theta_(n_theta), s_(s), grading_(grading), cap_(cap) {
    if (n_t < 4 || n_theta < 4) throw DomainError("build_mesh: n_t and n_theta must be at least 4");
    if (!(grading >= 1.0)) throw DomainError("build_mesh: grading must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("build_mesh: s must lie in (0, 1)");
    if (!(cap.length() > 0.0)) throw DomainError("build_mesh: cap arc has zero length");
    t_nodes_.resize(n_t + 1);
    for (int i = 0; i < n_t; ++i) t_nodes_[i] = kHalfPi * std::pow(static_cast<double>(i) / n_t, grading);
    t_nodes_[n_t] = kHalfPi;
    theta_nodes_.resize(n_theta);
    for (int j = 0; j < n_theta; ++j) theta_nodes_[j] = kTwoPi * j / n_theta;
    omega_.resize(n_theta);
    for (int j = 0; j < n_theta; ++j) omega_[j] = cap_.contains_angle(theta_nodes_[j]) ? 1 : 0;
    reduced_index_.assign(dof_count(), -1);
    for (int d = 0; d < dof_count(); ++d) {
        if (d < n_theta_ && !omega_[d]) continue;
        reduced_index_[d] = static_cast<int>(retained_.size());
        retained_.push_back(d);
    }
}

double HemisphereMesh::theta_step() const { return kTwoPi / n_theta_; }

double HemisphereMesh::t_of(int dof) const { return dof == pole() ? kHalfPi : t_nodes_[dof / n_theta_]; }

double HemisphereMesh::theta_of(int dof) const { return dof == pole() ? 0.0 : theta_nodes_[dof % n_theta_]; }

int HemisphereMesh::robin_count() const { return static_cast<int>(std::count(omega_.begin(), omega_.end(), 1)); }

double HemisphereMesh::interpolate(const Eigen::VectorXd& f, double t, double theta) const {
    if (f.size() != dof_count()) throw DomainError("interpolate: vector size does not match the mesh");
    t = std::clamp(t, 0.0, kHalfPi);
    int i = static_cast<int>(std::upper_bound(t_nodes_.begin(), t_nodes_.end(), t) - t_nodes_.begin()) - 1;
    i = std::clamp(i, 0, n_t_ - 1);
    const double ht = t_nodes_[i + 1] - t_nodes_[i];
    const double a = (t - t_nodes_[i]) / ht;
    const double u = wrap(theta) / theta_step();
    int j = static_cast<int>(std::floor(u));
    const double b = u - j;
    j = std::min(j, n_theta_ - 1);
    const double lower = (1.0 - b) * f[node(i, j)] + b * f[node(i, j + 1)];
    double upper;
    if (i + 1 == n_t_) {
        upper = f[pole()];
    } else {
        upper = (1.0 - b) * f[node(i + 1, j)] + b * f[node(i + 1, j + 1)];
    }
    return (1.0 - a) * lower + a * upper;
}

Eigen::VectorXd HemisphereMesh::equator_values(const Eigen::VectorXd& f) const { return f.head(n_theta_); }

Eigen::VectorXd HemisphereMesh::sample(const std::function<double(double, double)>& f) const {
    Eigen::VectorXd out(dof_count());
    for (int d = 0; d < dof_count(); ++d) out[d] = f(t_of(d), theta_of(d));
    return out;
}

HemisphereMesh build_mesh(int n_t, int n_theta, double s, const SphericalCap& cap, double grading) {
    return HemisphereMesh(n_t, n_theta, s, cap, grading);
}

// ---------------------------------------------------------------- moments

CellMoments cell_moments(const HemisphereMesh& mesh, int ring) {
    if (ring < 0 || ring >= mesh.n_t()) throw DomainError("cell_moments: ring index out of range");
    const double a = 1.0 - 2.0 * mesh.s();
    const double ta = mesh.t_nodes()[ring];
    const double tb = mesh.t_nodes()[ring + 1];
    const double h = tb - ta;
    const bool first = ring == 0;
    const bool last = ring + 1 == mesh.n_t();
    auto L = [&](int k, double t) { return k == 0 ? (tb - t) / h : (t - ta) / h; };

    CellMoments cm;
    const double wc = weighted_cell_integral(ta, tb, a, first, [](double t) { return std::cos(t); });
    cm.weight_integral = wc;
    for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
            const double sign = (p == q) ? 1.0 : -1.0;
            cm.stiffness[p][q] = sign * wc / (h * h);
            cm.mass[p][q] = weighted_cell_integral(ta, tb, a, first,
                                                   [&](double t) { return std::cos(t) * L(p, t) * L(q, t); });
        }
    }
    if (last) {
        // L0 = u / h with u = pi/2 - t, and cos t = sin u.
        cm.metric[0][0] = weighted_cell_integral(ta, tb, a, false, [&](double t) {
            const double u = kHalfPi - t;
            return (u / h) * (u / h) / std::sin(u);
        });
    } else {
        for (int p = 0; p < 2; ++p) {
            for (int q = 0; q < 2; ++q) {
                cm.metric[p][q] = weighted_cell_integral(ta, tb, a, first,
                                                         [&](double t) { return L(p, t) * L(q, t) / std::cos(t); });
            }
        }
    }
    return cm;
}

// ---------------------------------------------------------------- assembly

Eigen::VectorXd AssembledForms::restrict_to_retained(const Eigen::VectorXd& full) const {
    Eigen::VectorXd out(mesh.retained().size());
    for (std::size_t k = 0; k < mesh.retained().size(); ++k) out[k] = full[mesh.retained()[k]];
    return out;
}

Eigen::VectorXd AssembledForms::extend_from_retained(const Eigen::VectorXd& reduced) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.dof_count());
    for (std::size_t k = 0; k < mesh.retained().size(); ++k) out[mesh.retained()[k]] = reduced[k];
    return out;
}

AssembledForms assemble(const HemisphereMesh& mesh, const ProblemParams& params) {
    if (std::abs(params.s() - mesh.s()) > 1e-14) throw DomainError("assemble: mesh was built for a different s");
    const int nth = mesh.n_theta();
    const double ht = mesh.theta_step();
    const double tm[2][2] = {{ht / 3.0, ht / 6.0}, {ht / 6.0, ht / 3.0}};
    const double ts[2][2] = {{1.0 / ht, -1.0 / ht}, {-1.0 / ht, 1.0 / ht}};

    std::vector<Eigen::Triplet<double>> kt;
    std::vector<Eigen::Triplet<double>> mt;
    kt.reserve(static_cast<std::size_t>(mesh.n_t()) * nth * 16);
    mt.reserve(static_cast<std::size_t>(mesh.n_t()) * nth * 16);
    for (int i = 0; i < mesh.n_t(); ++i) {
        const CellMoments cm = cell_moments(mesh, i);
        const bool last = i + 1 == mesh.n_t();
        for (int j = 0; j < nth; ++j) {
            int local[2][2];
            for (int b = 0; b < 2; ++b) {
                local[0][b] = mesh.node(i, j + b);
                local[1][b] = last ? mesh.pole() : mesh.node(i + 1, j + b);
            }
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    for (int c = 0; c < 2; ++c) {
                        for (int d = 0; d < 2; ++d) {
                            const double kv = cm.stiffness[a][c] * tm[b][d] + cm.metric[a][c] * ts[b][d];
                            const double mv = cm.mass[a][c] * tm[b][d];
                            kt.emplace_back(local[a][b], local[c][d], kv);
                            mt.emplace_back(local[a][b], local[c][d], mv);
                        }
                    }
                }
            }
        }
    }
    std::vector<Eigen::Triplet<double>> bt;
    for (int j = 0; j < nth; ++j) {
        const int n0 = mesh.node(0, j);
        const int n1 = mesh.node(0, j + 1);
        bt.emplace_back(n0, n0, ht / 3.0);
        bt.emplace_back(n1, n1, ht / 3.0);
        bt.emplace_back(n0, n1, ht / 6.0);
        bt.emplace_back(n1, n0, ht / 6.0);
    }
    const int n = mesh.dof_count();
    AssembledForms forms{mesh, params.s(), SpMat(n, n), SpMat(n, n), SpMat(n, n), {}, {}, {}};
    forms.K.setFromTriplets(kt.begin(), kt.end());
    forms.M.setFromTriplets(mt.begin(), mt.end());
    forms.B.setFromTriplets(bt.begin(), bt.end());
    forms.K_r = restrict_matrix(forms.K, mesh);
    forms.M_r = restrict_matrix(forms.M, mesh);
    forms.B_r = restrict_matrix(forms.B, mesh);
    for (int k = 0; k < forms.M_r.rows(); ++k) {
        if (!(forms.M_r.coeff(k, k) > 0.0)) throw NumericalError("assemble: degenerate cell produced a singular mass");
    }
    return forms;
}

// ---------------------------------------------------------------- integrals

double weighted_surface_integral(const AssembledForms& forms, const Eigen::VectorXd& f) {
    if (f.size() != forms.M.rows()) throw DomainError("weighted_surface_integral: dimension mismatch");
    return (forms.M * f).sum();
}

double weighted_inner(const AssembledForms& forms, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
    if (f.size() != forms.M.rows() || g.size() != forms.M.rows()) {
        throw DomainError("weighted_inner: dimension mismatch");
    }
    return f.dot(forms.M * g);
}

double boundary_integral(const HemisphereMesh& mesh, const Eigen::VectorXd& f) {
    if (f.size() != mesh.dof_count()) throw DomainError("boundary_integral: dimension mismatch");
    const int nth = mesh.n_theta();
    const double ht = mesh.theta_step();
    const double a = mesh.cap().start();
    const double b = a + mesh.cap().length();
    double total = 0.0;
    for (int j = 0; j < nth; ++j) {
        const double f0 = f[mesh.node(0, j)];
        const double f1 = f[mesh.node(0, j + 1)];
        const double s0 = mesh.theta_nodes()[j];
        for (int shift = 0; shift < 2; ++shift) {
            const double lo = std::max(s0 + shift * kTwoPi, a);
            const double hi = std::min(s0 + ht + shift * kTwoPi, b);
            if (hi <= lo) continue;
            const double u0 = (lo - s0 - shift * kTwoPi) / ht;
            const double u1 = (hi - s0 - shift * kTwoPi) / ht;
            const double v0 = f0 + (f1 - f0) * u0;
            const double v1 = f0 + (f1 - f0) * u1;
            total += 0.5 * (v0 + v1) * (hi - lo);
        }
    }
    return total;
}

double equator_integral(const HemisphereMesh& mesh, const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                        const std::function<double(double)>& weight) {
    if (f.size() != mesh.dof_count() || g.size() != mesh.dof_count()) {
        throw DomainError("equator_integral: dimension mismatch");
    }
    const auto& rule = quad::gauss_legendre(4);
    const double ht = mesh.theta_step();
    double total = 0.0;
    for (int j = 0; j < mesh.n_theta(); ++j) {
        const double f0 = f[mesh.node(0, j)], f1 = f[mesh.node(0, j + 1)];
        const double g0 = g[mesh.node(0, j)], g1 = g[mesh.node(0, j + 1)];
        if (f0 == 0.0 && f1 == 0.0) continue;
        if (g0 == 0.0 && g1 == 0.0) continue;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double u = rule.nodes[q];
            const double theta = mesh.theta_nodes()[j] + u * ht;
            total += rule.weights[q] * ht * weight(theta) * (f0 + (f1 - f0) * u) * (g0 + (g1 - g0) * u);
        }
    }
    return total;
}

}  // namespace conefrac
