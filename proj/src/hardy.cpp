#include "conefrac/hardy.hpp"

#include "conefrac/error.hpp"
#include "conefrac/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <numbers>

namespace conefrac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SpMat select(const SpMat& A, const std::vector<int>& rows_map, int nr, const std::vector<int>& cols_map, int nc) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            const int r = rows_map[it.row()];
            const int c = cols_map[it.col()];
            if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
        }
    }
    SpMat out(nr, nc);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

}  // namespace

HardyResult hardy_constant(const AssembledForms& forms, const ProblemParams& params) {
    const HemisphereMesh& mesh = forms.mesh;
    const int n = static_cast<int>(mesh.retained().size());
    // Boundary block: retained equator dofs (exactly the omega nodes).
    std::vector<int> gamma_map(n, -1), inner_map(n, -1);
    std::vector<int> gamma_dofs;
    int ng = 0, ni = 0;
    for (int r = 0; r < n; ++r) {
        const int dof = mesh.retained()[r];
        if (dof < mesh.n_theta()) {
            gamma_map[r] = ng++;
            gamma_dofs.push_back(dof);
        } else {
            inner_map[r] = ni++;
        }
    }
    if (ng == 0) throw DomainError("hardy_constant: the cap contains no equator node");

    const double c2 = params.half_gap() * params.half_gap();
    const SpMat A = forms.K_r + c2 * forms.M_r;
    const SpMat Aii = select(A, inner_map, ni, inner_map, ni);
    const SpMat Aig = select(A, inner_map, ni, gamma_map, ng);
    const Eigen::MatrixXd Agg = Eigen::MatrixXd(select(A, gamma_map, ng, gamma_map, ng));
    const Eigen::MatrixXd Bgg = Eigen::MatrixXd(select(forms.B_r, gamma_map, ng, gamma_map, ng));

    Eigen::SimplicialLDLT<SpMat> ldlt(Aii);
    if (ldlt.info() != Eigen::Success) throw NumericalError("hardy_constant: A = K + c^2 M is numerically singular");
    const Eigen::MatrixXd X = ldlt.solve(Eigen::MatrixXd(Aig));  // A_II^{-1} A_IG
    Eigen::MatrixXd S = Agg - Eigen::MatrixXd(Aig.transpose()) * X;
    S = 0.5 * (S + S.transpose()).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(S, params.kappa() * Bgg);
    if (ges.info() != Eigen::Success) throw NumericalError("hardy_constant: boundary eigenproblem failed");

    HardyResult res;
    res.lambda_star = ges.eigenvalues()[0];
    res.mesh_level = mesh.n_t();
    res.n_theta = mesh.n_theta();
    Eigen::VectorXd vg = ges.eigenvectors().col(0);
    const Eigen::VectorXd vi = -X * vg;
    Eigen::VectorXd reduced(n);
    for (int r = 0; r < n; ++r) reduced[r] = gamma_map[r] >= 0 ? vg[gamma_map[r]] : vi[inner_map[r]];
    Eigen::VectorXd full = forms.extend_from_retained(reduced);
    const double bnorm = std::sqrt(full.dot(forms.B * full));
    full /= bnorm;
    if (full.head(mesh.n_theta()).sum() < 0.0) full = -full;
    res.minimizer = std::move(full);
    return res;
}

HardyResult hardy_constant_with_estimate(const ProblemParams& params, const SphericalCap& cap, int n_t, int n_theta,
                                         double grading) {
    const HemisphereMesh fine = build_mesh(n_t, n_theta, params.s(), cap, grading);
    HardyResult res = hardy_constant(assemble(fine, params), params);
    if (n_t / 2 >= 4 && n_theta / 2 >= 4) {
        const HemisphereMesh coarse = build_mesh(n_t / 2, n_theta / 2, params.s(), cap, grading);
        const double lc = hardy_constant(assemble(coarse, params), params).lambda_star;
        res.richardson = 2.0 * res.lambda_star - lc;
        res.error_bar = std::abs(res.lambda_star - lc);
    }
    return res;
}

SphericalCap symmetric_cap(double arc_length) {
    if (!(arc_length > 0.0) || arc_length > kTwoPi + 1e-12) {
        throw DomainError("symmetric_cap: arc length must lie in (0, 2pi]");
    }
    if (arc_length >= kTwoPi - 1e-12) return SphericalCap::full_circle();
    return SphericalCap(1.5 * std::numbers::pi - 0.5 * arc_length, arc_length);
}

HardyScan hardy_scan(const std::vector<double>& arc_lengths, const ProblemParams& params, const MeshSpec& mesh,
                     int threads, bool with_estimate) {
    if (arc_lengths.empty()) throw DomainError("hardy_scan: no arc lengths given");
    for (std::size_t i = 0; i < arc_lengths.size(); ++i) {
        if (!(arc_lengths[i] > 0.0) || arc_lengths[i] > kTwoPi + 1e-12) {
            throw DomainError("hardy_scan: arc lengths must lie in (0, 2pi]");
        }
        if (i > 0 && !(arc_lengths[i] > arc_lengths[i - 1])) {
            throw DomainError("hardy_scan: arc lengths must be strictly increasing");
        }
    }
    HardyScan scan;
    scan.rows.resize(arc_lengths.size());
    parallel_for(static_cast<int>(arc_lengths.size()), threads, [&](int i) {
        const SphericalCap cap = symmetric_cap(arc_lengths[i]);
        HardyResult r;
        if (with_estimate) {
            r = hardy_constant_with_estimate(params, cap, mesh.n_t, mesh.n_theta, mesh.grading);
        } else {
            r = hardy_constant(assemble(build_mesh(mesh.n_t, mesh.n_theta, params.s(), cap, mesh.grading), params),
                               params);
        }
        scan.rows[i] = {arc_lengths[i], r.lambda_star, r.mesh_level, r.richardson};
    });
    for (std::size_t i = 1; i < scan.rows.size(); ++i) {
        if (!(scan.rows[i - 1].lambda_star - scan.rows[i].lambda_star > 1e-6)) scan.strictly_decreasing = false;
    }
    return scan;
}

double radial_hardy_quotient(const std::vector<double>& r, const std::vector<double>& f, const ProblemParams& params) {
    if (r.size() != f.size() || r.size() < 2) throw DomainError("radial_hardy_quotient: mismatched or short grid");
    const double e_num = params.N() + 1.0 - 2.0 * params.s();
    const double e_den = params.N() - 1.0 - 2.0 * params.s();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double h = r[i + 1] - r[i];
        if (!(h > 0.0)) throw DomainError("radial_hardy_quotient: grid must be increasing");
        const double d = (f[i + 1] - f[i]) / h;
        num += 0.5 * (std::pow(r[i], e_num) + std::pow(r[i + 1], e_num)) * d * d * h;
        const double g0 = f[i] == 0.0 ? 0.0 : std::pow(r[i], e_den) * f[i] * f[i];
        const double g1 = f[i + 1] == 0.0 ? 0.0 : std::pow(r[i + 1], e_den) * f[i + 1] * f[i + 1];
        den += 0.5 * (g0 + g1) * h;
    }
    if (!(den > 0.0)) throw DomainError("radial_hardy_quotient: zero denominator");
    return num / den;
}

}  // namespace conefrac
