#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wcpl/asymptotics.hpp"
#include "wcpl/bounds.hpp"
#include "wcpl/config.hpp"
#include "wcpl/eigensolver.hpp"
#include "wcpl/potentials.hpp"
#include "wcpl/results.hpp"
#include "wcpl/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitChecks = 4;

using ordered_json = nlohmann::ordered_json;

struct CommonArgs {
    std::string config_path;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<double> alpha;
    bool timestamps = false;
};

struct Session {
    wcpl::ExperimentConfig cfg;
    wcpl::Experiment ex;
    wcpl::Provenance prov;
    std::string out_dir;
};

Session open_session(const CommonArgs& args) {
    Session s;
    s.cfg = wcpl::load_config(args.config_path);
    if (args.seed) s.cfg.solver.seed = *args.seed;
    s.ex = wcpl::build_experiment(s.cfg);
    s.prov.config_hash = s.cfg.hash;
    s.prov.version = wcpl::kVersion;
    s.prov.seed = s.cfg.solver.seed;
    s.prov.timestamps = args.timestamps;
    s.out_dir = args.out_dir ? *args.out_dir : s.cfg.outputs.directory;
    std::filesystem::create_directories(s.out_dir);
    return s;
}

ordered_json provenance_json(const wcpl::Provenance& prov) {
    ordered_json j;
    j["config_hash"] = wcpl::hash_hex(prov.config_hash);
    j["version"] = prov.version;
    j["seed"] = prov.seed;
    return j;
}

void write_json(const std::string& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

int cmd_make_potential(const CommonArgs& args) {
    const Session s = open_session(args);
    if (s.cfg.problem.potential == "zero" || s.cfg.problem.potential == "file") {
        std::cerr << "make-potential: config must set V = smooth_tail or glued\n";
        return kExitConfig;
    }
    wcpl::PotentialTable table;
    table.p = s.cfg.problem.p;
    table.dim = s.cfg.problem.dim;
    const wcpl::RadialGrid g =
        wcpl::make_grid(s.cfg.problem.dim, s.cfg.grid.r_max, s.cfg.grid.cells,
                        s.cfg.grid.grading, s.cfg.grid.ratio);
    table.r = g.r;
    table.value.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        table.value[i] = s.ex.spec.V.value(g.r[i]);
    const std::string path = s.out_dir + "/potential.tsv";
    std::vector<std::string> comments = {
        "config-hash=" + wcpl::hash_hex(s.prov.config_hash) + " version=" +
        s.prov.version + " seed=" + std::to_string(s.prov.seed)};
    if (s.prov.timestamps) {
        std::time_t now = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[64];
        std::strftime(buf, sizeof buf, "generated=%Y-%m-%dT%H:%M:%SZ", &tm);
        comments.emplace_back(buf);
    }
    wcpl::write_potential_table(path, table, comments);
    std::cout << "wrote " << path << " (" << table.r.size() << " rows)\n";
    return kExitOk;
}

int solve_rows(const Session& s, const std::vector<double>& alphas, int jobs,
               const std::string& csv_name) {
    wcpl::CurveCsv csv(s.out_dir + "/" + csv_name, s.prov);
    std::vector<wcpl::SpectralResult> rows(alphas.size());
    std::vector<std::string> errors(alphas.size());

    const auto solve_one = [&](std::size_t i) {
        try {
            wcpl::ProblemSpec spec = s.ex.spec;
            spec.alpha = alphas[i];
            const wcpl::ExtrapolationResult ext = wcpl::solve_with_domain_extrapolation(
                spec, s.ex.r_schedule, s.ex.policy, s.cfg.solver);
            rows[i] = ext.final();
        } catch (const wcpl::SolverFailure& e) {
            errors[i] = e.what();
        }
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < alphas.size(); ++i) solve_one(i);
    } else {
        std::vector<std::future<void>> pending;
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            pending.push_back(std::async(std::launch::async, solve_one, i));
            if (pending.size() >= static_cast<std::size_t>(jobs)) {
                pending.front().get();
                pending.erase(pending.begin());
            }
        }
        for (auto& f : pending) f.get();
    }

    bool solver_trouble = false;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!errors[i].empty()) {
            std::cerr << "alpha=" << alphas[i] << ": " << errors[i] << '\n';
            solver_trouble = true;
            continue;
        }
        csv.append(rows[i]);
        if (!rows[i].converged) solver_trouble = true;
    }
    return solver_trouble ? kExitSolver : kExitOk;
}

int cmd_ground_state(const CommonArgs& args) {
    const Session s = open_session(args);
    std::vector<double> alphas;
    if (args.alpha) {
        alphas.push_back(*args.alpha);
    } else if (s.cfg.sweep.present) {
        alphas = s.cfg.sweep.alphas;
        std::sort(alphas.begin(), alphas.end());
    } else {
        std::cerr << "ground-state: pass --alpha or provide a [sweep] block\n";
        return kExitConfig;
    }
    const int code = solve_rows(s, alphas, args.jobs, "ground_state.csv");
    if (code == kExitOk)
        std::cout << "wrote " << s.out_dir << "/ground_state.csv\n";
    return code;
}

// Extrapolates lambda/alpha to alpha -> 0 from the two smallest sweep
// points, assuming a leading linear correction in alpha.
double richardson_ratio_limit(const std::vector<double>& alphas,
                              const std::vector<double>& lambdas) {
    std::size_t i1 = 0;
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (alphas[i] < alphas[i1]) i1 = i;
    std::size_t i2 = i1 == 0 ? 1 : 0;
    for (std::size_t i = 0; i < alphas.size(); ++i)
        if (i != i1 && alphas[i] < alphas[i2]) i2 = i;
    const double a1 = alphas[i1], a2 = alphas[i2];
    const double r1 = lambdas[i1] / a1, r2 = lambdas[i2] / a2;
    const double s = a2 / a1;
    return (s * r1 - r2) / (s - 1.0);
}

ordered_json fit_report(const Session& s, const std::vector<double>& alphas,
                        const std::vector<double>& lambdas) {
    const wcpl::Regime regime = s.ex.spec.regime();

    ordered_json j;
    j["provenance"] = provenance_json(s.prov);
    j["regime"] = wcpl::regime_name(regime);

    // Fewer than two negative eigenvalues means there is no decay law to
    // fit. That is the expected outcome when the coupling integral of W is
    // not positive (the eigenvalue stays at zero for small alpha), so
    // report a zero model and check the curve against it.
    std::size_t decaying = 0;
    double worst = 0.0;
    for (const double l : lambdas) {
        if (l < 0.0) ++decaying;
        worst = std::max(worst, std::fabs(l));
    }
    if (decaying < 2) {
        j["model"] = "zero";
        j["exponent"] = nullptr;
        j["constant"] = 0.0;
        j["r2"] = nullptr;
        j["window"] = {*std::min_element(alphas.begin(), alphas.end()),
                       *std::max_element(alphas.begin(), alphas.end())};
        j["samples"] = lambdas.size();
        j["predicted_exponent"] = nullptr;
        j["predicted_constant"] = 0.0;
        j["pass"] = worst <= 1e-5;
        return j;
    }

    const wcpl::RadialGrid quad_grid =
        wcpl::make_grid(s.ex.spec.dim, s.cfg.grid.r_max, s.cfg.grid.cells,
                        s.cfg.grid.grading, s.cfg.grid.ratio);
    const wcpl::Prediction pred = wcpl::predict(s.ex.spec, quad_grid);

    bool pass = false;
    if (regime == wcpl::Regime::dim_above_p2) {
        const wcpl::AsymptoticFit power = wcpl::fit_power(alphas, lambdas);
        const double limit = richardson_ratio_limit(alphas, lambdas);
        j["model"] = "linear_limit";
        j["exponent"] = power.exponent;
        j["constant"] = limit;
        j["r2"] = power.r_squared;
        j["window"] = {power.alpha_min, power.alpha_max};
        j["samples"] = power.samples;
        j["predicted_exponent"] = pred.exponent;
        j["predicted_constant"] = pred.constant;
        pass = pred.constant < 0.0 &&
               std::fabs(limit - pred.constant) <= 0.10 * std::fabs(pred.constant) &&
               !power.regime_violation;
    } else if (regime == wcpl::Regime::dim_equal_p2) {
        const wcpl::AsymptoticFit logfit = wcpl::fit_log_corrected(alphas, lambdas);
        const wcpl::AsymptoticFit pinned =
            wcpl::fit_power_pinned(alphas, lambdas, pred.exponent);
        const wcpl::AsymptoticFit free_power = wcpl::fit_power(alphas, lambdas);
        j["model"] = logfit.model;
        j["exponent"] = logfit.exponent;
        j["constant"] = logfit.constant;
        j["r2"] = logfit.r_squared;
        j["window"] = {logfit.alpha_min, logfit.alpha_max};
        j["samples"] = logfit.samples;
        j["predicted_exponent"] = pred.exponent;
        j["predicted_constant"] = nullptr;
        j["power_model_r2"] = pinned.r_squared;
        j["free_power_exponent"] = free_power.exponent;
        pass = logfit.spread < 0.25 && logfit.r_squared > pinned.r_squared &&
               !logfit.regime_violation;
    } else {
        const wcpl::AsymptoticFit power = wcpl::fit_power(alphas, lambdas);
        j["model"] = power.model;
        j["exponent"] = power.exponent;
        j["constant"] = power.constant;
        j["r2"] = power.r_squared;
        j["window"] = {power.alpha_min, power.alpha_max};
        j["samples"] = power.samples;
        j["predicted_exponent"] = pred.exponent;
        j["predicted_constant"] = nullptr;
        // Exponent tolerance by regime: +-0.15 for p=2 superlinear windows,
        // +-0.20 for degenerate (p != 2) solves, 15% relative below the
        // dimension threshold where the predicted power grows quickly.
        double tol = 0.15;
        if (regime == wcpl::Regime::dim_between && s.ex.spec.p != 2.0) tol = 0.20;
        if (regime == wcpl::Regime::dim_below_p) tol = 0.15 * pred.exponent;
        pass = power.window_valid && power.r_squared >= 0.98 &&
               std::fabs(power.exponent - pred.exponent) <= tol &&
               !power.regime_violation;
    }
    j["pass"] = pass;
    return j;
}

void print_fit_line(const ordered_json& j) {
    std::cout << "fit: model=" << j["model"].get<std::string>();
    if (!j["exponent"].is_null())
        std::cout << " exponent=" << j["exponent"].get<double>();
    std::cout << " constant=" << j["constant"].get<double>()
              << " pass=" << (j["pass"].get<bool>() ? "true" : "false") << '\n';
}

int cmd_sweep(const CommonArgs& args) {
    const Session s = open_session(args);
    if (!s.cfg.sweep.present) {
        std::cerr << "sweep: config needs a [sweep] block\n";
        return kExitConfig;
    }

    std::optional<wcpl::CurveCsv> csv;
    if (s.cfg.outputs.csv) csv.emplace(s.out_dir + "/curve.csv", s.prov);
    bool solver_trouble = false;
    const auto stream_row = [&](const wcpl::SpectralResult& res) {
        if (csv) csv->append(res);
        if (!res.converged) solver_trouble = true;
        std::cout << "alpha=" << wcpl::fmt17(res.alpha)
                  << " lambda=" << wcpl::fmt17(res.lambda) << " R=" << res.r_max
                  << (res.converged ? "" : " [not converged]") << '\n';
    };

    std::vector<wcpl::SpectralResult> curve;
    try {
        curve = wcpl::lambda_curve(s.ex.spec, s.cfg.sweep.alphas, s.ex.policy,
                                   s.cfg.solver, stream_row);
    } catch (const wcpl::SolverFailure& e) {
        std::cerr << "sweep: " << e.what() << '\n';
        return kExitSolver;
    }
    if (solver_trouble) return kExitSolver;

    std::vector<double> alphas, lambdas;
    for (const wcpl::SpectralResult& res : curve) {
        alphas.push_back(res.alpha);
        lambdas.push_back(res.lambda);
    }
    if (s.cfg.outputs.dat)
        wcpl::write_plot_dat(s.out_dir + "/curve.dat", s.prov, alphas, lambdas);

    const ordered_json j = fit_report(s, alphas, lambdas);
    if (s.cfg.outputs.json) write_json(s.out_dir + "/fit.json", j);
    print_fit_line(j);
    return j["pass"].get<bool>() ? kExitOk : kExitChecks;
}

int cmd_fit(const CommonArgs& args) {
    const Session s = open_session(args);
    const std::string csv_path = s.out_dir + "/curve.csv";
    std::ifstream in(csv_path);
    if (!in) {
        std::cerr << "fit: cannot open " << csv_path << " (run sweep first)\n";
        return kExitConfig;
    }
    std::vector<double> alphas, lambdas;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("alpha,", 0) == 0) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 2) continue;
        alphas.push_back(std::stod(fields[0]));
        lambdas.push_back(std::stod(fields[1]));
    }
    if (alphas.size() < 2) {
        std::cerr << "fit: " << csv_path << " has fewer than two usable rows\n";
        return kExitConfig;
    }
    const ordered_json j = fit_report(s, alphas, lambdas);
    if (s.cfg.outputs.json) write_json(s.out_dir + "/fit.json", j);
    print_fit_line(j);
    return j["pass"].get<bool>() ? kExitOk : kExitChecks;
}

void supersolution_rows(double p, int dim, std::vector<wcpl::BoundsRow>& rows) {
    for (const double lambda : {-1e-2, -1e-3}) {
        struct FamilyCase {
            const char* name;
            wcpl::Supersolution s;
            double r_lo;
        };
        std::vector<FamilyCase> cases;
        {
            wcpl::Supersolution slow = wcpl::slow_decay_supersolution(p, dim, lambda);
            cases.push_back({"supersolution_slow", slow, 2.0});
            wcpl::Supersolution fast = wcpl::fast_decay_supersolution(p, dim, lambda);
            // factor = 0 means valid on all of r > 0; start the sampling at a
            // small positive radius rather than at the r^{-nu} singularity.
            const double factor =
                std::max(wcpl::validity_radius_factor(p, dim, lambda), 1e-3);
            cases.push_back({"supersolution_fast", fast, factor / fast.mu});
            const double beta = wcpl::smallest_valid_beta(p, dim, lambda, 2.0);
            wcpl::Supersolution scaled =
                wcpl::scaled_decay_supersolution(p, dim, lambda, beta);
            cases.push_back({"supersolution_scaled", scaled, 2.0});
        }
        for (const FamilyCase& fc : cases) {
            std::vector<double> radii;
            const double r_hi = 1000.0;
            for (int k = 0; k < 200; ++k)
                radii.push_back(fc.r_lo *
                                std::pow(r_hi / fc.r_lo, k / 199.0));
            double worst_residual = -1e300;
            double worst_gap = 0.0;
            for (const wcpl::ResidualSample& smp :
                 wcpl::supersolution_residual(fc.s, radii)) {
                worst_residual = std::max(worst_residual, smp.closed);
                worst_gap = std::max(worst_gap, smp.relative_gap);
            }
            char param[96];
            std::snprintf(param, sizeof param, "lambda=%g beta=%g r>=%.3g",
                          lambda, fc.s.beta, fc.r_lo);
            rows.push_back({fc.name, p, dim, 0.0, param, worst_residual, 1e-10,
                            worst_residual <= 1e-10});
            std::snprintf(param, sizeof param, "lambda=%g two-path", lambda);
            rows.push_back({std::string(fc.name) + "_paths", p, dim, 0.0, param,
                            worst_gap, 1e-8, worst_gap <= 1e-8});
        }
    }
}

void capacity_rows(double p, int dim, std::vector<wcpl::BoundsRow>& rows) {
    for (const double R : {2.0, 4.0, 8.0}) {
        const wcpl::CapacityProblem cp{p, dim, R};
        const double closed = wcpl::capacity_closed_form(cp);
        const double discrete = wcpl::capacity_discrete_min(cp, 4096);
        const double gap = std::fabs(discrete - closed) / closed;
        char param[32];
        std::snprintf(param, sizeof param, "R=%g", R);
        rows.push_back(
            {"capacity_closed_vs_discrete", p, dim, 0.0, param, gap, 1e-3,
             gap <= 1e-3});
    }
    std::vector<double> lr, lv;
    for (const double R : {64.0, 128.0, 256.0, 512.0}) {
        const wcpl::CapacityProblem cp{p, dim, R};
        lr.push_back(std::log(R));
        lv.push_back(std::log(wcpl::capacity_closed_form(cp)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(lr.size());
    for (std::size_t i = 0; i < lr.size(); ++i) {
        sx += lr[i];
        sy += lv[i];
        sxx += lr[i] * lr[i];
        sxy += lr[i] * lv[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const wcpl::CapacityProblem cp{p, dim, 2.0};
    const double target = -cp.nu() * (p - 1.0);
    rows.push_back({"capacity_decay_slope", p, dim, 0.0, "R=64..512",
                    std::fabs(slope - target), 0.05,
                    std::fabs(slope - target) <= 0.05});
}

void gamma_rows(std::vector<wcpl::BoundsRow>& rows) {
    const double gamma_euler = 0.57721566490153286;
    const double small = wcpl::incomplete_gamma_zero(0.01);
    const double small_err = std::fabs(small + std::log(0.01) + gamma_euler);
    rows.push_back({"gamma_small_x_asymptotic", 0.0, 0, 0.0, "x=0.01", small_err,
                    0.02, small_err < 0.02});

    const double x = 1.0;
    const double series = wcpl::incomplete_gamma_zero(std::nextafter(x, 0.0));
    const double fraction = wcpl::incomplete_gamma_zero(x);
    const double gap = std::fabs(series - fraction);
    rows.push_back({"gamma_branch_agreement", 0.0, 0, 0.0, "x=1", gap, 1e-10,
                    gap <= 1e-10});
}

int cmd_verify_bounds(const CommonArgs& args) {
    const Session s = open_session(args);
    std::vector<wcpl::BoundsRow> rows;
    supersolution_rows(s.cfg.problem.p, s.cfg.problem.dim, rows);
    capacity_rows(s.cfg.problem.p, s.cfg.problem.dim, rows);
    gamma_rows(rows);

    const std::string path = s.out_dir + "/bounds.csv";
    wcpl::write_bounds_csv(path, s.prov, rows);
    bool all = true;
    for (const wcpl::BoundsRow& row : rows) {
        if (!row.pass) {
            all = false;
            std::cerr << "FAIL " << row.check_name << " " << row.parameter
                      << " value=" << row.value << " threshold=" << row.threshold
                      << '\n';
        }
    }
    std::cout << "wrote " << path << " (" << rows.size() << " checks, "
              << (all ? "all pass" : "FAILURES") << ")\n";
    return all ? kExitOk : kExitChecks;
}

int cmd_criticality_check(const CommonArgs& args) {
    const Session s = open_session(args);
    wcpl::ProblemSpec spec = s.ex.spec;
    spec.alpha = 0.0;

    wcpl::CurveCsv csv(s.out_dir + "/criticality.csv", s.prov);
    std::vector<double> lambdas;
    try {
        for (const double R : s.ex.r_schedule) {
            const wcpl::RadialGrid g = wcpl::grid_for_radius(s.ex.policy, spec.dim, R);
            const wcpl::SpectralResult res =
                wcpl::solve_ground_state(spec, g, s.cfg.solver);
            csv.append(res);
            lambdas.push_back(res.lambda);
            std::cout << "R=" << R << " lambda=" << wcpl::fmt17(res.lambda) << '\n';
        }
    } catch (const wcpl::SolverFailure& e) {
        std::cerr << "criticality-check: " << e.what() << '\n';
        return kExitSolver;
    }

    bool pass = std::fabs(lambdas.back()) <= 1e-5;
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (lambdas[i] > lambdas[i - 1] + 1e-10) pass = false;
    std::cout << "criticality: lambda(0)=" << wcpl::fmt17(lambdas.back())
              << " pass=" << (pass ? "true" : "false") << '\n';
    return pass ? kExitOk : kExitChecks;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weak-coupling eigenvalue toolkit for radial quasilinear problems"};
    app.require_subcommand(1);

    CommonArgs args;
    const auto add_common = [&](CLI::App* sub, bool with_alpha) {
        sub->add_option("--config", args.config_path, "experiment config file")
            ->required();
        sub->add_option("--jobs", args.jobs, "parallel workers for independent solves");
        sub->add_option("--seed", args.seed, "override [solver] seed");
        sub->add_option("--out", args.out_dir, "override [outputs] directory");
        sub->add_flag("--timestamps", args.timestamps,
                      "stamp output headers with the generation time");
        if (with_alpha)
            sub->add_option("--alpha", args.alpha, "coupling strength for this run");
    };

    CLI::App* make_potential =
        app.add_subcommand("make-potential", "tabulate the critical potential");
    add_common(make_potential, false);
    CLI::App* ground_state =
        app.add_subcommand("ground-state", "solve the minimizer at one alpha");
    add_common(ground_state, true);
    CLI::App* sweep =
        app.add_subcommand("sweep", "trace lambda(alpha) and fit its decay law");
    add_common(sweep, false);
    CLI::App* fit = app.add_subcommand("fit", "re-fit a previously written curve.csv");
    add_common(fit, false);
    CLI::App* verify_bounds = app.add_subcommand(
        "verify-bounds", "check closed-form inequalities and special functions");
    add_common(verify_bounds, false);
    CLI::App* criticality = app.add_subcommand(
        "criticality-check", "verify lambda(0) = 0 on the radius schedule");
    add_common(criticality, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (make_potential->parsed()) return cmd_make_potential(args);
        if (ground_state->parsed()) return cmd_ground_state(args);
        if (sweep->parsed()) return cmd_sweep(args);
        if (fit->parsed()) return cmd_fit(args);
        if (verify_bounds->parsed()) return cmd_verify_bounds(args);
        if (criticality->parsed()) return cmd_criticality_check(args);
    } catch (const wcpl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const wcpl::SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
