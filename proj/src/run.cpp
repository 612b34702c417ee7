#include "conefrac/run.hpp"

#include "conefrac/almgren.hpp"
#include "conefrac/extension.hpp"
#include "conefrac/hardy.hpp"
#include "conefrac/spectral.hpp"
#include "conefrac/svg.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace conefrac {

namespace {

using nlohmann::json;

std::string hex(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// JSON cannot hold NaN or infinity.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

struct Context {
    const RunConfig& config;
    const RunOptions& options;
    ProblemParams params;
    int nt, ntheta, nr;
    std::filesystem::path dir;
    RunResult result;

    std::string path(const std::string& name) {
        result.artifacts.push_back(name);
        return (dir / name).string();
    }

    std::shared_ptr<const AssembledForms> forms() const {
        const HemisphereMesh mesh = build_mesh(nt, ntheta, config.s, config.cap(), config.grading);
        return std::make_shared<const AssembledForms>(assemble(mesh, params));
    }

    EigenOptions eigen_options() const {
        EigenOptions o;
        o.allow_inadmissible = config.allow_inadmissible;
        return o;
    }
};

int scaled(int n, int level) {
    const double v = std::ldexp(static_cast<double>(n), level);
    if (v < 4.0 || v != std::floor(v))
        throw ConfigError("mesh level " + std::to_string(level) + " turns " + std::to_string(n) +
                          " cells into a non-integer or fewer than 4");
    return static_cast<int>(v);
}

json eigen_json(const EigenSystem& es) {
    json j;
    j["mu"] = numbers(es.mu);
    j["gamma"] = numbers(es.gamma);
    j["multiplicity_group"] = es.group;
    j["method"] = es.method;
    j["max_residual"] = number(es.max_residual);
    j["warnings"] = es.warnings;
    return j;
}

void write_eigen_csv(Context& ctx, const EigenSystem& es) {
    std::vector<std::vector<double>> rows;
    for (int j = 0; j < es.size(); ++j)
        rows.push_back({static_cast<double>(j + 1), es.mu[j], es.gamma[j], static_cast<double>(es.group[j])});
    write_csv(ctx.path("eigenvalues.csv"), {"j", "mu", "gamma", "multiplicity_group"}, rows);
}

// ---------------------------------------------------------------- eig

void task_eig(Context& ctx) {
    const auto forms = ctx.forms();
    const EigenSystem es = solve_eigs(forms, ctx.params, ctx.config.k, ctx.eigen_options());
    write_eigen_csv(ctx, es);
    const double floor = -ctx.params.half_gap() * ctx.params.half_gap();
    PlotSpec plot;
    plot.title = "Spherical eigenvalues";
    plot.xlabel = "j";
    plot.ylabel = "mu_j";
    PlotSeries series;
    series.label = "mu_j";
    series.line = false;
    series.markers = true;
    for (int j = 0; j < es.size(); ++j) {
        series.x.push_back(j + 1);
        series.y.push_back(es.mu[j]);
    }
    plot.series.push_back(series);
    plot.reference_y.push_back({floor, "-((N-2s)/2)^2"});
    write_svg(ctx.path("eigen_ladder.svg"), plot);
    json& s = ctx.result.summary;
    s = eigen_json(es);
    s["spectrum_floor"] = floor;
    s["above_floor"] = std::all_of(es.mu.begin(), es.mu.end(), [&](double m) { return m > floor; });
}

// ---------------------------------------------------------------- hardy, scan

void task_hardy(Context& ctx) {
    const SphericalCap cap = ctx.config.cap();
    const HardyResult hr = hardy_constant_with_estimate(ctx.params, cap, ctx.nt, ctx.ntheta, ctx.config.grading);
    write_csv(ctx.path("hardy.csv"), {"arc_length", "lambda_star", "mesh_level", "richardson_estimate"},
              {{cap.length(), hr.lambda_star, static_cast<double>(hr.mesh_level), hr.richardson}});
    json& s = ctx.result.summary;
    s["arc_length"] = cap.length();
    s["lambda_star"] = hr.lambda_star;
    s["richardson_estimate"] = number(hr.richardson);
    s["error_bar"] = number(hr.error_bar);
    s["mesh_level"] = hr.mesh_level;
    s["full_space_constant"] = hardy_constant_full_space(ctx.params);
}

void task_scan(Context& ctx) {
    const HardyScan scan =
        hardy_scan(ctx.config.arcs, ctx.params, MeshSpec{ctx.nt, ctx.ntheta, ctx.config.grading}, ctx.options.threads);
    std::vector<std::vector<double>> rows;
    PlotSeries series;
    series.label = "Lambda";
    series.markers = true;
    for (const auto& r : scan.rows) {
        rows.push_back({r.arc_length, r.lambda_star, static_cast<double>(r.mesh_level), r.richardson});
        series.x.push_back(r.arc_length);
        series.y.push_back(r.lambda_star);
    }
    write_csv(ctx.path("hardy_scan.csv"), {"arc_length", "lambda_star", "mesh_level", "richardson_estimate"}, rows);
    PlotSpec plot;
    plot.title = "Hardy constant against cap arc length";
    plot.xlabel = "arc length";
    plot.ylabel = "Lambda";
    plot.series.push_back(series);
    const double full = hardy_constant_full_space(ctx.params);
    plot.reference_y.push_back({full, "full space"});
    write_svg(ctx.path("hardy_scan.svg"), plot);
    json& s = ctx.result.summary;
    s["arc_length"] = numbers(series.x);
    s["lambda_star"] = numbers(series.y);
    s["strictly_decreasing"] = scan.strictly_decreasing;
    s["full_space_constant"] = full;
    if (!scan.strictly_decreasing) throw NumericalError("hardy scan is not strictly decreasing");
}

// ---------------------------------------------------------------- extension helpers

Eigen::VectorXd lid_data(const Context& ctx, const EigenSystem& es) {
    if (!ctx.config.lid) return es.psi[0];
    const Expression& e = *ctx.config.lid;
    return es.mesh().sample([&](double t, double theta) { return e.evaluate(Bindings::sphere(t, theta)); });
}

ExtensionResult solve_configured(Context& ctx, const EigenSystem& es, const Perturbation& h) {
    const HalfBallGrid grid = make_half_ball_grid(es.forms, ctx.nr, ctx.config.rmin);
    ExtensionOptions o;
    o.tolerance = ctx.config.tolerance;
    o.modes = &es;
    return solve_extension(grid, ctx.params, h, lid_data(ctx, es), o);
}

int modes_needed(const RunConfig& c) {
    int m = c.k;
    for (const auto& [j, _] : c.modes) m = std::max(m, j + 1);
    return m;
}

// ---------------------------------------------------------------- solve-ext

void task_solve_ext(Context& ctx) {
    const auto forms = ctx.forms();
    const EigenSystem es = solve_eigs(forms, ctx.params, ctx.config.k, ctx.eigen_options());
    const Perturbation h = ctx.config.perturbation();
    const ExtensionResult ext = solve_configured(ctx, es, h);
    write_field(ctx.path("field.bin"), *ext.field, ctx.params);
    std::vector<std::vector<double>> rows;
    for (double r : ext.field->radii()) rows.push_back({r, compute_H(*ext.field, r)});
    write_csv(ctx.path("shells.csv"), {"r", "H"}, rows);
    json& s = ctx.result.summary;
    s["iterations"] = ext.iterations;
    s["residual"] = ext.residual;
    s["inner_condition"] = ext.inner_condition;
    s["n_r"] = ext.field->radii().size();
    s["r_min"] = ext.field->inner_radius();
    s["gamma_1"] = number(es.gamma[0]);
}

// ---------------------------------------------------------------- frequency

std::vector<double> geometric(double lo, double hi, int count) {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    v.back() = hi;
    return v;
}

void task_frequency(Context& ctx) {
    const RunConfig& c = ctx.config;
    const auto forms = ctx.forms();
    const EigenSystem es = solve_eigs(forms, ctx.params, modes_needed(c), ctx.eigen_options());
    const Perturbation h = c.perturbation();
    json& s = ctx.result.summary;

    std::shared_ptr<const ScalarField> field;
    double r_lo = c.r_lo;
    double tau_lo = 0.1 * c.r_lo;
    if (c.field == "manufactured") {
        field = manufactured_field(es, c.modes);
        s["field"] = "manufactured";
    } else {
        const ExtensionResult ext = solve_configured(ctx, es, h);
        field = ext.field;
        r_lo = std::max(r_lo, 10.0 * c.rmin);
        tau_lo = 2.0 * c.rmin;
        s["field"] = "solve";
        s["inner_condition"] = ext.inner_condition;
        s["cg_iterations"] = ext.iterations;
    }
    if (!(r_lo < c.R0)) throw ConfigError("task.r_lo must stay below R0 (10 rmin = " + std::to_string(r_lo) + ")");

    // Frequency trace.
    const FrequencyTrace ft = frequency_trace(*field, ctx.params, h, default_radii(c.R0, c.radii, r_lo), c.R0);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < ft.radii.size(); ++i) rows.push_back({ft.radii[i], ft.H[i], ft.D[i], ft.Ncal[i]});
    write_csv(ctx.path("frequency.csv"), {"r", "H", "D", "Ncal"}, rows);

    // Blow-up and dominant group.
    const double tau = std::max(c.tau, field->inner_radius() * 1.0000001);
    const BlowupSnapshot snap = blowup(field, tau);
    const DominantGroup dg = dominant_group(snap, es);
    const int j0 = dg.j0;
    const double off = off_group_projection(snap, es, j0);

    // Fourier coefficients and beta.
    std::vector<double> taus = geometric(tau_lo, 0.95, 80);
    for (double R : c.beta_R) taus.push_back(R);
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end(), [](double a, double b) { return std::abs(a - b) < 1e-12 * b; }),
               taus.end());
    const FourierTrace four = fourier_coeffs(*field, es, taus, ctx.params, h);
    rows.clear();
    for (std::size_t i = 0; i < four.taus.size(); ++i)
        for (std::size_t m = 0; m < four.modes.size(); ++m)
            rows.push_back({four.taus[i], static_cast<double>(four.modes[m]), four.phi[m][i], four.upsilon[m][i]});
    write_csv(ctx.path("fourier.csv"), {"tau", "j", "phi_j", "Upsilon_j"}, rows);

    const double gamma0 = es.gamma[j0 - 1];
    std::vector<double> beta_j0;
    rows.clear();
    for (double R : c.beta_R) {
        const std::vector<double> b = beta_coefficients(four, gamma0, R, ctx.params);
        for (std::size_t m = 0; m < b.size(); ++m) rows.push_back({R, static_cast<double>(four.modes[m]), b[m]});
        beta_j0.push_back(b[j0 - 1]);
    }
    write_csv(ctx.path("beta.csv"), {"R", "j", "beta_j"}, rows);
    const auto [bmin, bmax] = std::minmax_element(beta_j0.begin(), beta_j0.end());
    double mean = 0.0;
    for (double b : beta_j0) mean += b / beta_j0.size();
    const double spread = mean != 0.0 ? (*bmax - *bmin) / std::abs(mean) : 0.0;

    // Pohozaev and H' diagnostics at five radii.
    rows.clear();
    bool all_satisfied = true;
    for (double r : geometric(r_lo, c.R0, 5)) {
        const PohozaevResult p = pohozaev_check(*field, ctx.params, h, r, 1e-2);
        const double hp = check_H_prime_identity(*field, ctx.params, h, r);
        all_satisfied = all_satisfied && p.satisfied;
        rows.push_back({r, p.lhs, p.rhs, p.satisfied ? 1.0 : 0.0, p.identity_residual, hp});
    }
    write_csv(ctx.path("pohozaev.csv"), {"r", "lhs", "rhs", "satisfied", "identity_residual", "H_prime_residual"},
              rows);

    PlotSpec plot;
    plot.title = "Frequency function";
    plot.xlabel = "r";
    plot.ylabel = "N(r)";
    plot.log_x = true;
    PlotSeries series;
    series.label = "N(r)";
    series.markers = true;
    series.x = ft.radii;
    series.y = ft.Ncal;
    plot.series.push_back(series);
    plot.reference_y.push_back({gamma0, "gamma_j0"});
    write_svg(ctx.path("frequency.svg"), plot);

    s["gamma_hat"] = number(ft.gamma_hat);
    s["gamma_error"] = number(ft.gamma_error);
    s["fit_model"] = ft.fit_model;
    s["delta"] = number(ft.delta);
    s["R0"] = ft.R0;
    s["p"] = ctx.params.p();
    s["j0"] = j0;
    s["j0_tie"] = dg.tie;
    s["gamma_j0"] = number(gamma0);
    s["mu_j0"] = es.mu[j0 - 1];
    s["beta_R"] = numbers(c.beta_R);
    s["beta"] = numbers(beta_j0);
    s["betah_R_spread"] = spread;
    s["tau"] = tau;
    s["off_group_projection"] = off;
    s["pohozaev_satisfied"] = all_satisfied;
}

// ---------------------------------------------------------------- smooth-cone

void task_smooth_cone(Context& ctx) {
    const RunConfig& c = ctx.config;
    const auto cone = c.cone();
    if (!cone) throw ConfigError("smooth-cone needs a graph cone; preset 'full' has no boundary");
    const SmoothedCone sc(*cone, c.n);
    const int n = c.n;
    double min_star = std::numeric_limits<double>::infinity();
    double min_incl = min_star;
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < c.samples; ++i) {
        const double x1 = c.samples == 1 ? 0.0 : -1.0 + 2.0 * i / (c.samples - 1);
        const Point2 b = sc.boundary_point(x1);
        const double m = starshape_margin(sc, b);
        const double incl = sc.psi(x1) - cone->phi(x1);
        min_star = std::min(min_star, m);
        min_incl = std::min(min_incl, incl);
        rows.push_back({b[0], b[1], m, incl});
    }
    write_csv(ctx.path("smooth_cone.csv"), {"x1", "x2", "starshape_margin", "inclusion_margin"}, rows);

    const ApproxDomain ad(sc, c.R0);
    double min_gamma = std::numeric_limits<double>::infinity();
    double min_normal = min_gamma;
    rows.clear();
    const int side = std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(c.samples)))));
    for (int a = 0; a < side; ++a) {
        for (int b = 1; b <= side; ++b) {
            const double x1 = -0.5 * c.R0 + c.R0 * a / (side - 1);
            const double t = 0.5 * c.R0 * b / side;
            const Point3 z = ad.graph_point(x1, t);
            if (ad.classify(z) != OmegaRegion::Gamma) continue;
            const double g = ad.gamma_margin(z);
            const double nu = ad.gamma_normal_product(z);
            min_gamma = std::min(min_gamma, g);
            min_normal = std::min(min_normal, nu);
            rows.push_back({z[0], z[1], z[2], g, nu});
        }
    }
    write_csv(ctx.path("gamma_n.csv"), {"x1", "x2", "t", "margin", "normal_product"}, rows);

    json& s = ctx.result.summary;
    s["n"] = n;
    s["n0"] = SmoothedCone::minimal_index(*cone);
    s["samples"] = c.samples;
    s["min_starshape_margin"] = min_star;
    s["starshape_bound"] = 3.0 / (4.0 * n);
    s["starshape_ok"] = min_star >= 3.0 / (4.0 * n);
    s["min_inclusion_margin"] = min_incl;
    s["inclusion_ok"] = min_incl >= 3.0 / (4.0 * n);
    s["gamma_samples"] = rows.size();
    s["min_gamma_margin"] = number(min_gamma);
    s["gamma_bound"] = 1.0 / (4.0 * n);
    s["gamma_ok"] = rows.empty() || min_gamma >= 1.0 / (4.0 * n);
    s["min_gamma_normal_product"] = number(min_normal);
}

template <class E>
[[noreturn]] void rethrow_with_context(const std::string& task, const E& e) {
    throw E("task " + task + ": " + e.what());
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    char buf[40];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            os << (i ? "," : "") << buf;
        }
        os << "\n";
    }
}

RunResult run(const RunConfig& config, const RunOptions& options) {
    const std::filesystem::path dir(options.out_dir);
    std::filesystem::create_directories(dir);
    Context ctx{config,
                options,
                config.params(),
                scaled(config.nt, options.mesh_level),
                scaled(config.ntheta, options.mesh_level),
                scaled(config.nr, options.mesh_level),
                dir,
                {}};
    try {
        if (config.task == "eig") task_eig(ctx);
        else if (config.task == "hardy") task_hardy(ctx);
        else if (config.task == "scan") task_scan(ctx);
        else if (config.task == "solve-ext") task_solve_ext(ctx);
        else if (config.task == "frequency") task_frequency(ctx);
        else if (config.task == "smooth-cone") task_smooth_cone(ctx);
        else throw ConfigError("unknown task '" + config.task + "'");
    } catch (const ConfigError& e) {
        rethrow_with_context(config.task, e);
    } catch (const DomainError& e) {
        rethrow_with_context(config.task, e);
    } catch (const NumericalError& e) {
        rethrow_with_context(config.task, e);
    }

    ctx.result.summary["task"] = config.task;
    {
        std::ofstream os(ctx.path("summary.json"));
        os << ctx.result.summary.dump(2) << "\n";
    }
    json m;
    m["tool"] = "conefrac";
    m["version"] = version_string;
    m["task"] = config.task;
    m["config_hash"] = "fnv1a64:" + hex(config.hash());
    m["config"] = config.canonical();
    m["mesh"] = {{"nt", ctx.nt},
                 {"ntheta", ctx.ntheta},
                 {"nr", ctx.nr},
                 {"grading", config.grading},
                 {"rmin", config.rmin},
                 {"mesh_level", options.mesh_level}};
    const EigenOptions eo;
    m["tolerances"] = {{"eigen_residual", eo.residual_tolerance},
                       {"eigen_group", eo.group_tolerance},
                       {"eigen_dense_limit", eo.dense_limit},
                       {"cg_relative_residual", config.tolerance},
                       {"pohozaev_relative", 1e-2}};
    m["lid"] = config.lid_text;
    m["threads"] = options.threads;
    m["deterministic"] = options.threads == 1;
    m["versions"] = {{"conefrac", version_string},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"boost", BOOST_LIB_VERSION},
                     {"compiler", __VERSION__}};
    ctx.result.artifacts.push_back("manifest.json");
    m["artifacts"] = ctx.result.artifacts;
    std::ofstream os((dir / "manifest.json").string());
    os << m.dump(2) << "\n";
    return ctx.result;
}

}  // namespace conefrac
