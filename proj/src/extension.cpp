#include "conefrac/extension.hpp"

#include "conefrac/error.hpp"
#include "conefrac/hardy.hpp"
#include "conefrac/quadrature.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace conefrac {

namespace {

constexpr char kMagic[8] = {'C', 'F', 'F', 'I', 'E', 'L', 'D', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T value) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(bytes, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    char bytes[sizeof(T)];
    is.read(bytes, sizeof(T));
    if (!is) throw Error("read_field: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

HalfBallGrid make_half_ball_grid(std::shared_ptr<const AssembledForms> forms, int n_r, double r_min) {
    if (!forms) throw DomainError("make_half_ball_grid: no angular forms");
    if (n_r < 3) throw DomainError("make_half_ball_grid: need at least 3 shells");
    if (!(r_min > 0.0 && r_min < 1.0)) throw DomainError("make_half_ball_grid: r_min must lie in (0, 1)");
    HalfBallGrid g;
    g.forms = std::move(forms);
    g.radii.resize(n_r);
    const double q = std::pow(1.0 / r_min, 1.0 / (n_r - 1));
    for (int k = 0; k < n_r; ++k) g.radii[k] = r_min * std::pow(q, k);
    g.radii.back() = 1.0;
    return g;
}

ExtensionResult solve_extension(const HalfBallGrid& grid, const ProblemParams& params, const Perturbation& h,
                                const Eigen::VectorXd& lid, const ExtensionOptions& options) {
    const AssembledForms& forms = *grid.forms;
    const HemisphereMesh& mesh = forms.mesh;
    if (params.N() != 2) throw DomainError("solve_extension: only N = 2 is discretized");
    if (std::abs(params.s() - forms.s) > 1e-14) throw DomainError("solve_extension: forms assembled for another s");
    if (lid.size() != mesh.dof_count()) throw DomainError("solve_extension: lid data does not match the mesh");
    if (params.lambda() > 0.0) {
        double limit = options.hardy_limit;
        if (std::isnan(limit)) limit = hardy_constant(forms, params).lambda_star;
        if (params.lambda() >= limit) {
            std::ostringstream os;
            os.precision(10);
            os << "solve_extension: inadmissible lambda = " << params.lambda() << " >= Lambda_num = " << limit;
            throw DomainError(os.str());
        }
    }
    const int nd = mesh.dof_count();
    const int nr = grid.n_r();
    const double a = params.weight_exponent();
    const double kappa = params.kappa();
    const long long total = static_cast<long long>(nd) * nr;
    auto gid = [nd](int k, int d) { return static_cast<long long>(k) * nd + d; };

    // Dirichlet data.
    std::vector<char> fixed(total, 0);
    Eigen::VectorXd xd = Eigen::VectorXd::Zero(total);
    Eigen::VectorXd lid_data = lid;
    for (int j = 0; j < mesh.n_theta(); ++j)
        if (!mesh.in_omega(j)) lid_data[mesh.node(0, j)] = 0.0;
    for (int k = 0; k < nr; ++k) {
        for (int j = 0; j < mesh.n_theta(); ++j) {
            if (!mesh.in_omega(j)) fixed[gid(k, mesh.node(0, j))] = 1;
        }
    }
    for (int d = 0; d < nd; ++d) {
        fixed[gid(nr - 1, d)] = 1;
        xd[gid(nr - 1, d)] = lid_data[d];
    }
    ExtensionResult result;
    result.inner_condition = "neumann";
    Eigen::VectorXd inner = Eigen::VectorXd::Zero(nd);
    double core = 0.0;
    if (h.is_zero && options.modes != nullptr) {
        const EigenSystem& es = *options.modes;
        if (es.mesh().dof_count() != nd) throw DomainError("solve_extension: eigensystem lives on another mesh");
        const Eigen::VectorXd Mlid = forms.M * lid_data;
        for (int j = 0; j < es.size(); ++j) {
            if (std::isnan(es.gamma[j])) continue;
            const double c = es.psi[j].dot(Mlid) * std::pow(grid.r_min(), es.gamma[j]);
            inner += c * es.psi[j];
            // r^(N+1-2s) u.M u_r at r_min for the modal core sum c r^gamma psi
            core += c * c * es.gamma[j] * std::pow(grid.r_min(), params.N() - 2.0 * params.s());
        }
        for (int d = 0; d < nd; ++d) {
            fixed[gid(0, d)] = 1;
            xd[gid(0, d)] = inner[d];
        }
        for (int j = 0; j < mesh.n_theta(); ++j)
            if (!mesh.in_omega(j)) xd[gid(0, mesh.node(0, j))] = 0.0;
        result.inner_condition = "dirichlet-modal";
    }

    std::vector<long long> free_index(total, -1);
    long long nfree = 0;
    for (long long g = 0; g < total; ++g)
        if (!fixed[g]) free_index[g] = nfree++;

    const auto& rule = quad::gauss_legendre(10);
    const auto& eq_rule = quad::gauss_legendre(4);
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfree);
    auto add = [&](long long row, long long col, double v) {
        const long long fr = free_index[row];
        if (fr < 0 || v == 0.0) return;
        const long long fc = free_index[col];
        if (fc >= 0) {
            trip.emplace_back(static_cast<int>(fr), static_cast<int>(fc), v);
        } else {
            rhs[fr] -= v * xd[col];
        }
    };
    trip.reserve(static_cast<std::size_t>(forms.K.nonZeros()) * 4 * (nr - 1));
    const double ht = mesh.theta_step();
    for (int k = 0; k + 1 < nr; ++k) {
        const double ra = grid.radii[k], rb = grid.radii[k + 1], len = rb - ra;
        double kr[2][2] = {{0, 0}, {0, 0}}, mr[2][2] = {{0, 0}, {0, 0}};
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double rho = ra + len * rule.nodes[q];
            const double w = rule.weights[q] * len;
            const double phi[2] = {1.0 - rule.nodes[q], rule.nodes[q]};
            const double dphi[2] = {-1.0 / len, 1.0 / len};
            for (int p = 0; p < 2; ++p) {
                for (int r = 0; r < 2; ++r) {
                    kr[p][r] += w * std::pow(rho, a + 2.0) * dphi[p] * dphi[r];
                    mr[p][r] += w * std::pow(rho, a) * phi[p] * phi[r];
                }
            }
        }
        for (int p = 0; p < 2; ++p) {
            for (int r = 0; r < 2; ++r) {
                const int kp = k + p, kq = k + r;
                for (int o = 0; o < forms.M.outerSize(); ++o) {
                    for (SpMat::InnerIterator it(forms.M, o); it; ++it)
                        add(gid(kp, static_cast<int>(it.row())), gid(kq, static_cast<int>(it.col())),
                            kr[p][r] * it.value());
                }
                for (int o = 0; o < forms.K.outerSize(); ++o) {
                    for (SpMat::InnerIterator it(forms.K, o); it; ++it)
                        add(gid(kp, static_cast<int>(it.row())), gid(kq, static_cast<int>(it.col())),
                            mr[p][r] * it.value());
                }
                if (params.lambda() != 0.0) {
                    for (int o = 0; o < forms.B.outerSize(); ++o) {
                        for (SpMat::InnerIterator it(forms.B, o); it; ++it)
                            add(gid(kp, static_cast<int>(it.row())), gid(kq, static_cast<int>(it.col())),
                                -kappa * params.lambda() * mr[p][r] * it.value());
                    }
                }
            }
        }
        if (!h.is_zero) {
            // -kappa int rho h(rho, theta) phi_p phi_q L_a L_b on the equator
            for (int j = 0; j < mesh.n_theta(); ++j) {
                const int nodes[2] = {mesh.node(0, j), mesh.node(0, j + 1)};
                double loc[2][2][2][2] = {};
                for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                    const double rho = ra + len * rule.nodes[q];
                    const double wr = rule.weights[q] * len * rho;
                    const double phi[2] = {1.0 - rule.nodes[q], rule.nodes[q]};
                    for (std::size_t e = 0; e < eq_rule.nodes.size(); ++e) {
                        const double u = eq_rule.nodes[e];
                        const double th = mesh.theta_nodes()[j] + ht * u;
                        const double w = wr * eq_rule.weights[e] * ht * h(rho * std::cos(th), rho * std::sin(th));
                        const double L[2] = {1.0 - u, u};
                        for (int p = 0; p < 2; ++p)
                            for (int r = 0; r < 2; ++r)
                                for (int b = 0; b < 2; ++b)
                                    for (int c = 0; c < 2; ++c) loc[p][r][b][c] += w * phi[p] * phi[r] * L[b] * L[c];
                    }
                }
                for (int p = 0; p < 2; ++p)
                    for (int r = 0; r < 2; ++r)
                        for (int b = 0; b < 2; ++b)
                            for (int c = 0; c < 2; ++c)
                                add(gid(k + p, nodes[b]), gid(k + r, nodes[c]), -kappa * loc[p][r][b][c]);
            }
        }
    }
    SpMat A(static_cast<int>(nfree), static_cast<int>(nfree));
    A.setFromTriplets(trip.begin(), trip.end());
    trip.clear();
    trip.shrink_to_fit();

    // Initial guess: lid data scaled radially by the first order when known.
    double g0 = 0.0;
    if (options.modes != nullptr && options.modes->size() > 0 && !std::isnan(options.modes->gamma[0])) {
        g0 = options.modes->gamma[0];
    }
    Eigen::VectorXd guess(nfree);
    for (int k = 0; k < nr; ++k)
        for (int d = 0; d < nd; ++d) {
            const long long f = free_index[gid(k, d)];
            if (f >= 0) guess[f] = std::pow(grid.radii[k], g0) * lid_data[d];
        }

    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(options.tolerance);
    cg.setMaxIterations(options.max_iterations);
    cg.compute(A);
    if (cg.info() != Eigen::Success) throw NumericalError("solve_extension: preconditioner setup failed");
    const Eigen::VectorXd x = cg.solveWithGuess(rhs, guess);
    result.iterations = static_cast<int>(cg.iterations());
    result.residual = cg.error();
    if (cg.info() != Eigen::Success) {
        std::ostringstream os;
        os << "solve_extension: conjugate gradients stopped after " << cg.iterations()
           << " iterations with relative residual " << cg.error() << " (tolerance " << options.tolerance << ")";
        throw NumericalError(os.str());
    }
    std::vector<Eigen::VectorXd> shells(nr, Eigen::VectorXd::Zero(nd));
    for (int k = 0; k < nr; ++k)
        for (int d = 0; d < nd; ++d) {
            const long long g = gid(k, d);
            shells[k][d] = free_index[g] >= 0 ? x[free_index[g]] : xd[g];
        }
    auto field = std::make_shared<GridField>(grid.forms, grid.radii, std::move(shells));
    field->set_core_energy(core);
    result.field = field;
    return result;
}

void write_field(const std::string& path, const GridField& field, const ProblemParams& params) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("write_field: cannot open " + path);
    const HemisphereMesh& mesh = field.mesh();
    os.write(kMagic, 8);
    put<std::uint32_t>(os, kVersion);
    put<std::int32_t>(os, params.N());
    put<std::int32_t>(os, static_cast<std::int32_t>(field.radii().size()));
    put<std::int32_t>(os, mesh.n_t());
    put<std::int32_t>(os, mesh.n_theta());
    put<double>(os, params.s());
    put<double>(os, params.lambda());
    put<double>(os, field.radii().front());
    put<double>(os, mesh.grading());
    put<double>(os, mesh.cap().start());
    put<double>(os, mesh.cap().length());
    for (const auto& shell : field.shell_values())
        for (Eigen::Index d = 0; d < shell.size(); ++d) put<double>(os, shell[d]);
    if (!os) throw Error("write_field: write failed for " + path);
}

LoadedField read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("read_field: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) throw Error("read_field: bad magic in " + path);
    if (get<std::uint32_t>(is) != kVersion) throw Error("read_field: unsupported version");
    LoadedField out;
    FieldFileHeader& h = out.header;
    h.N = get<std::int32_t>(is);
    h.n_r = get<std::int32_t>(is);
    h.n_t = get<std::int32_t>(is);
    h.n_theta = get<std::int32_t>(is);
    h.s = get<double>(is);
    h.lambda = get<double>(is);
    h.r_min = get<double>(is);
    h.grading = get<double>(is);
    h.cap_start = get<double>(is);
    h.cap_length = get<double>(is);
    if (h.N != 2 || h.n_r < 3 || h.n_t < 4 || h.n_theta < 4) throw Error("read_field: inconsistent header");
    const ProblemParams params(h.N, h.s, h.lambda);
    const HemisphereMesh mesh = build_mesh(h.n_t, h.n_theta, h.s, SphericalCap(h.cap_start, h.cap_length), h.grading);
    auto forms = std::make_shared<const AssembledForms>(assemble(mesh, params));
    const HalfBallGrid grid = make_half_ball_grid(forms, h.n_r, h.r_min);
    std::vector<Eigen::VectorXd> shells(h.n_r, Eigen::VectorXd(mesh.dof_count()));
    for (auto& shell : shells)
        for (Eigen::Index d = 0; d < shell.size(); ++d) shell[d] = get<double>(is);
    out.field = std::make_shared<GridField>(forms, grid.radii, std::move(shells));
    return out;
}

}  // namespace conefrac
