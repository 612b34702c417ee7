#include "conefrac/spectral.hpp"

#include "conefrac/error.hpp"
#include "conefrac/hardy.hpp"
#include "conefrac/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace conefrac {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

struct RawPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;  // retained dofs, M-orthonormal columns
    double residual = 0.0;
    std::string method;
};

RawPairs dense_solve(const SpMat& A, const SpMat& M, int k) {
    const Eigen::MatrixXd Ad = Eigen::MatrixXd(A);
    const Eigen::MatrixXd Md = Eigen::MatrixXd(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Ad, Md);
    if (ges.info() != Eigen::Success) throw NumericalError("solve_eigs: dense generalized eigensolver failed");
    RawPairs out;
    out.values = ges.eigenvalues().head(k);
    out.vectors = ges.eigenvectors().leftCols(k);
    const double a_norm = Ad.cwiseAbs().rowwise().sum().maxCoeff();
    const double m_norm = Md.cwiseAbs().rowwise().sum().maxCoeff();
    double worst = 0.0;
    for (int i = 0; i < k; ++i) {
        const Eigen::VectorXd x = out.vectors.col(i);
        const Eigen::VectorXd r = Ad * x - out.values[i] * (Md * x);
        const double scale = (a_norm + std::abs(out.values[i]) * m_norm) * x.norm();
        worst = std::max(worst, r.norm() / std::max(scale, 1e-300));
    }
    out.residual = worst;
    out.method = "dense";
    return out;
}

// Two passes of modified Gram-Schmidt in the M inner product; columns that
// collapse below 1e-10 of their original length are dropped.
Eigen::MatrixXd m_orthonormalize(const Eigen::MatrixXd& V, const SpMat& M, const Eigen::MatrixXd& against) {
    std::vector<Eigen::VectorXd> kept;
    std::vector<Eigen::VectorXd> kept_m;
    const Eigen::MatrixXd MA = against.cols() > 0 ? Eigen::MatrixXd(M * against) : Eigen::MatrixXd();
    for (int c = 0; c < V.cols(); ++c) {
        Eigen::VectorXd v = V.col(c);
        const double original = std::sqrt(std::max(v.dot(M * v), 0.0));
        if (original == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
            if (against.cols() > 0) v -= against * (MA.transpose() * v);
            for (std::size_t q = 0; q < kept.size(); ++q) v -= kept[q] * kept_m[q].dot(v);
        }
        Eigen::VectorXd mv = M * v;
        const double nrm = std::sqrt(std::max(v.dot(mv), 0.0));
        if (nrm <= 1e-10 * original) continue;
        kept.push_back(v / nrm);
        kept_m.push_back(mv / nrm);
    }
    Eigen::MatrixXd out(V.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = kept[c];
    return out;
}

// Restarted block Krylov iteration for T = (A - sigma M)^{-1} M with
// Rayleigh-Ritz on span{X, T X, T^2 X}.
RawPairs krylov_solve(const SpMat& A, const SpMat& M, int k, double sigma, const EigenOptions& opt) {
    const int n = static_cast<int>(A.rows());
    const int block = std::min(n, k + std::max(6, k / 2));
    const SpMat S = A - sigma * M;
    Eigen::SimplicialLDLT<SpMat> ldlt(S);
    if (ldlt.info() != Eigen::Success) throw NumericalError("solve_eigs: factorization of the shifted pencil failed");

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd X(n, block);
    for (int c = 0; c < block; ++c)
        for (int r = 0; r < n; ++r) X(r, c) = dist(rng);
    X = m_orthonormalize(X, M, Eigen::MatrixXd());

    RawPairs out;
    out.method = "block-krylov";
    double worst = 0.0;
    double best = std::numeric_limits<double>::infinity();
    int best_iter = 0;
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        const Eigen::MatrixXd TX = ldlt.solve(Eigen::MatrixXd(M * X));
        if (iter > 0) {
            worst = 0.0;
            for (int i = 0; i < k; ++i) {
                const Eigen::VectorXd z = X.col(i) - (out.values[i] - sigma) * TX.col(i);
                worst = std::max(worst, std::sqrt(std::max(z.dot(M * z), 0.0)));
            }
            // Accept a residual that has stopped improving at round-off level.
            if (worst < best) {
                best = worst;
                best_iter = iter;
            }
            const bool stalled = iter - best_iter >= 10 && best < 1e3 * opt.residual_tolerance;
            if (worst < opt.residual_tolerance || stalled) {
                out.vectors = X.leftCols(k);
                out.values.conservativeResize(k);
                out.residual = worst;
                return out;
            }
        }
        Eigen::MatrixXd V1 = m_orthonormalize(TX, M, X);
        Eigen::MatrixXd basis(n, X.cols() + V1.cols());
        basis << X, V1;
        Eigen::MatrixXd V2 = m_orthonormalize(ldlt.solve(Eigen::MatrixXd(M * V1)), M, basis);
        Eigen::MatrixXd V(n, basis.cols() + V2.cols());
        V << basis, V2;
        Eigen::MatrixXd H = V.transpose() * (A * V);
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        const int keep = std::min<int>(block, static_cast<int>(V.cols()));
        X = V * es.eigenvectors().leftCols(keep);
        out.values = es.eigenvalues().head(keep);
    }
    std::ostringstream msg;
    msg << "solve_eigs: block Krylov iteration did not converge in " << opt.max_iterations
        << " iterations (residual " << worst << ", tolerance " << opt.residual_tolerance << ")";
    throw NumericalError(msg.str());
}

}  // namespace

std::vector<int> EigenSystem::group_members(int j) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (group[i] == group[j]) out.push_back(i);
    return out;
}

EigenSystem solve_eigs(const AssembledForms& forms, const ProblemParams& params, int k, const EigenOptions& options) {
    return solve_eigs(std::make_shared<const AssembledForms>(forms), params, k, options);
}

EigenSystem solve_eigs(std::shared_ptr<const AssembledForms> forms, const ProblemParams& params, int k,
                       const EigenOptions& options) {
    if (!forms) throw DomainError("solve_eigs: no assembled forms");
    if (k < 1) throw DomainError("solve_eigs: k must be positive");
    if (std::abs(params.s() - forms->s) > 1e-14) throw DomainError("solve_eigs: forms were assembled for a different s");
    const int n = static_cast<int>(forms->M_r.rows());
    if (k > n) throw DomainError("solve_eigs: k exceeds the number of retained dofs");

    EigenSystem es{params, forms, {}, {}, {}, {}, {}, {}, 0.0};
    if (params.lambda() > 0.0) {
        double limit = options.hardy_limit;
        if (std::isnan(limit)) limit = hardy_constant(*forms, params).lambda_star;
        if (params.lambda() >= limit) {
            std::ostringstream msg;
            msg.precision(10);
            msg << "lambda = " << params.lambda() << " is not below the Hardy constant Lambda_num = " << limit
                << " of the cap";
            if (!options.allow_inadmissible) throw DomainError("solve_eigs: " + msg.str());
            es.warnings.push_back(msg.str() + "; the spectrum may reach below -((N-2s)/2)^2");
        }
    }

    const SpMat A = forms->K_r - (params.lambda() * params.kappa()) * forms->B_r;
    const double c2 = params.half_gap() * params.half_gap();
    RawPairs raw = n <= options.dense_limit ? dense_solve(A, forms->M_r, k)
                                            : krylov_solve(A, forms->M_r, k, -1.01 * c2, options);
    es.method = raw.method;
    es.max_residual = raw.residual;

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(forms->mesh.dof_count());
    int group_id = 0;
    for (int i = 0; i < k; ++i) {
        const double mu = raw.values[i];
        Eigen::VectorXd psi = forms->extend_from_retained(raw.vectors.col(i));
        const double mean = ones.dot(forms->M * psi);
        double sign = 1.0;
        if (std::abs(mean) >= 1e-8) {
            sign = mean > 0.0 ? 1.0 : -1.0;
        } else {
            Eigen::Index arg = 0;
            psi.cwiseAbs().maxCoeff(&arg);
            sign = psi[arg] > 0.0 ? 1.0 : -1.0;
        }
        psi *= sign;
        if (i == 0 || std::abs(mu - es.mu.back()) > options.group_tolerance * (1.0 + std::abs(mu))) ++group_id;
        es.mu.push_back(mu);
        es.psi.push_back(std::move(psi));
        es.group.push_back(group_id);
        if (mu + c2 > -1e-12) {
            es.gamma.push_back(gamma_from_mu(std::max(mu, -c2), params));
        } else {
            es.gamma.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    if (!es.mu.empty() && es.mu.front() <= -c2) {
        es.warnings.push_back("first eigenvalue lies at or below the spectrum floor -((N-2s)/2)^2");
    }
    return es;
}

std::vector<double> oracle_full_circle_1d(const ProblemParams& params, int k, int n_t, double grading) {
    if (k < 0) throw DomainError("oracle_full_circle_1d: azimuthal index must be nonnegative");
    if (n_t < 4) throw DomainError("oracle_full_circle_1d: need at least 4 cells");
    const double a = params.weight_exponent();
    std::vector<double> t(n_t + 1);
    for (int i = 0; i <= n_t; ++i) t[i] = kHalfPi * std::pow(static_cast<double>(i) / n_t, grading);
    t[n_t] = kHalfPi;

    const int n = n_t + 1;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    const auto& gl = quad::gauss_legendre(40);
    const auto& gj = quad::gauss_jacobi_left(40, a);
    const double k2 = static_cast<double>(k) * k;
    for (int i = 0; i < n_t; ++i) {
        const double ta = t[i], tb = t[i + 1], h = tb - ta;
        double loc_k[2][2] = {{0, 0}, {0, 0}};
        double loc_m[2][2] = {{0, 0}, {0, 0}};
        const auto& rule = i == 0 ? gj : gl;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double x = rule.nodes[q];
            const double tt = ta + h * x;
            double w;
            if (i == 0) {
                w = rule.weights[q] * std::pow(h, a + 1.0) * std::pow(std::sin(tt) / tt, a);
            } else {
                w = rule.weights[q] * h * std::pow(std::sin(tt), a);
            }
            const double L[2] = {1.0 - x, x};
            const double dL[2] = {-1.0 / h, 1.0 / h};
            const double c = std::cos(tt);
            for (int p = 0; p < 2; ++p) {
                for (int r = 0; r < 2; ++r) {
                    loc_k[p][r] += w * c * dL[p] * dL[r];
                    loc_m[p][r] += w * c * L[p] * L[r];
                    if (k > 0) {
                        // c = sin(pi/2 - t) stays accurate near the pole
                        loc_k[p][r] += w * k2 * L[p] * L[r] / std::sin(kHalfPi - tt);
                    }
                }
            }
        }
        for (int p = 0; p < 2; ++p) {
            for (int r = 0; r < 2; ++r) {
                K(i + p, i + r) += loc_k[p][r];
                M(i + p, i + r) += loc_m[p][r];
            }
        }
    }
    K(0, 0) -= params.kappa() * params.lambda();
    const int m = k > 0 ? n - 1 : n;  // Dirichlet at the pole for k >= 1
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(K.topLeftCorner(m, m), M.topLeftCorner(m, m),
                                                                  Eigen::EigenvaluesOnly);
    if (ges.info() != Eigen::Success) throw NumericalError("oracle_full_circle_1d: eigensolver failed");
    std::vector<double> out(ges.eigenvalues().data(), ges.eigenvalues().data() + m);
    return out;
}

std::pair<double, double> sphere_coordinates(const Point3& z) {
    const double rho = std::hypot(z[0], z[1]);
    return {std::atan2(z[2], rho), std::atan2(z[1], z[0])};
}

std::function<double(const Point3&)> homogeneous_profile(const EigenSystem& es, int j) {
    if (j < 1 || j > es.size()) throw DomainError("homogeneous_profile: mode index out of range");
    const double gamma = es.gamma[j - 1];
    if (std::isnan(gamma)) throw DomainError("homogeneous_profile: eigenvalue below the spectrum floor");
    auto forms = es.forms;
    Eigen::VectorXd psi = es.psi[j - 1];
    return [forms, psi, gamma](const Point3& z) {
        const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
        if (r == 0.0) {
            if (gamma > 0.0) return 0.0;
            if (gamma == 0.0) return psi[forms->mesh.pole()];
            throw DomainError("homogeneous_profile: evaluation at the origin of a profile with gamma < 0");
        }
        const auto [t, theta] = sphere_coordinates(z);
        return std::pow(r, gamma) * forms->mesh.interpolate(psi, t, theta);
    };
}

}  // namespace conefrac
