// SPDX-License-Identifier: MIT
//
// jsde: scalar jump-diffusion SDE simulation, strong-convergence measurement,
// and mean-square stability analysis from one typed config file.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical error, 4 I/O
// error, 1 anything else.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jsde/config.hpp"
#include "jsde/csv.hpp"
#include "jsde/experiments.hpp"
#include "jsde/increments.hpp"
#include "jsde/linear_kernel.hpp"
#include "jsde/stability.hpp"
#include "jsde/version.hpp"

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct RunContext {
    jsde::RunConfig config;
    jsde::ProblemBundle bundle;
    jsde::SchemeSpec scheme;
    std::filesystem::path out_dir;
    std::vector<std::string> outputs;  // file names written, for the manifest
};

std::string theta_cell(const jsde::SchemeSpec& scheme) {
    return jsde::format_double(jsde::scheme_uses_theta(scheme.kind) ? scheme.theta : 0.0);
}

void write_output(RunContext& ctx, const std::string& name, const std::string& content) {
    jsde::write_text_file((ctx.out_dir / name).string(), content);
    ctx.outputs.push_back(name);
}

void run_path(RunContext& ctx) {
    if (!ctx.config.path) {
        throw jsde::ConfigError("command 'path' needs a [path] section");
    }
    const auto& ps = *ctx.config.path;
    const jsde::IncrementGrid grid =
        jsde::make_increment_grid(jsde::RandomSource{ctx.config.seed, 0}, ps.steps, 1, ps.dt,
                                  ctx.bundle.problem.lambda);
    const jsde::Trajectory traj =
        jsde::integrate_path(ctx.bundle.problem, ctx.scheme, grid, 1);
    std::string csv = "t,y\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        csv += jsde::csv_line({jsde::format_double(traj.times[i]),
                               jsde::format_double(traj.states[i])});
    }
    write_output(ctx, "path.csv", csv);
    if (traj.diverged_at) {
        std::cout << "path diverged at step " << *traj.diverged_at << " of " << ps.steps
                  << "\n";
    } else {
        std::cout << "path: " << ps.steps << " steps, terminal value "
                  << jsde::format_double(traj.states.back()) << "\n";
    }
}

void run_converge(RunContext& ctx) {
    if (!ctx.config.converge) {
        throw jsde::ConfigError("command 'converge' needs a [converge] section");
    }
    jsde::ConvergenceConfig cc = *ctx.config.converge;
    cc.seed = ctx.config.seed;
    cc.threads = ctx.config.threads;
    const jsde::ConvergenceReport report =
        jsde::run_convergence(ctx.bundle.problem, ctx.scheme, cc);
    std::string csv = "scheme,theta,dt,rmse,stderr,diverged_frac\n";
    for (const auto& row : report.rows) {
        csv += jsde::csv_line({jsde::scheme_name(ctx.scheme.kind), theta_cell(ctx.scheme),
                               jsde::format_double(row.dt), jsde::format_double(row.rmse),
                               jsde::format_double(row.mc_stderr),
                               jsde::format_double(row.diverged_frac)});
    }
    const double order = report.fit ? report.fit->order : kNan;
    const double residual = report.fit ? report.fit->residual : kNan;
    csv += jsde::csv_line({"order", jsde::format_double(order), jsde::format_double(residual)});
    write_output(ctx, "convergence.csv", csv);
    if (report.fit) {
        std::cout << "observed order " << jsde::format_double(report.fit->order)
                  << " (rms log residual " << jsde::format_double(report.fit->residual)
                  << ") over " << report.rows.size() << " step sizes\n";
    } else {
        std::cout << "order fit skipped: fewer than 3 usable step sizes\n";
    }
}

// Closed-form certification row for one step size; factor is NaN when the
// scheme has no exact one-step factor, threshold NaN when no closed-form
// bound applies.
struct AnalyticRow {
    double factor = kNan;
    double threshold = kNan;
    bool certified = false;
};

AnalyticRow analytic_row(const jsde::LinearJumpSde& lin, const jsde::SchemeSpec& scheme,
                         double dt) {
    AnalyticRow row;
    switch (scheme.kind) {
        case jsde::SchemeKind::ExplicitEuler:
        case jsde::SchemeKind::Stm: {
            const double theta =
                scheme.kind == jsde::SchemeKind::ExplicitEuler ? 0.0 : scheme.theta;
            row.factor = jsde::stm_amplification(lin.a, lin.b, lin.c, lin.lambda, theta, dt);
            row.certified = row.factor < 1.0;
            break;
        }
        case jsde::SchemeKind::Cstm: {
            row.factor =
                jsde::cstm_amplification(lin.a, lin.b, lin.c, lin.lambda, scheme.theta, dt);
            try {
                row.threshold =
                    jsde::cstm_max_stable_dt(lin.a, lin.b, lin.c, lin.lambda, scheme.theta);
            } catch (const std::domain_error&) {
                // Equation itself not mean-square stable: no threshold exists.
            }
            row.certified = row.factor < 1.0;
            break;
        }
        case jsde::SchemeKind::SemiTamed:
        case jsde::SchemeKind::CompensatedSemiTamed:
            row.factor = jsde::semi_tamed_linear_amplification(lin.a, lin.b, lin.c,
                                                               lin.lambda, dt);
            row.threshold = jsde::semi_tamed_linear_max_dt(lin.a, lin.b, lin.c, lin.lambda);
            row.certified = row.factor < 1.0;
            break;
        case jsde::SchemeKind::Tamed: {
            const jsde::TamedCertification cert =
                jsde::tamed_linear_max_dt(lin.a, lin.b, lin.c, lin.lambda);
            row.threshold = cert.max_dt;
            row.certified = dt < cert.max_dt;
            break;
        }
        default:
            throw jsde::ConfigError("no analytic certification for " +
                                    jsde::scheme_name(scheme.kind));
    }
    return row;
}

void run_analytic(RunContext& ctx) {
    if (!ctx.bundle.problem.linear) {
        throw jsde::ConfigError("analytic stability requires the linear test equation");
    }
    const jsde::LinearJumpSde& lin = *ctx.bundle.problem.linear;
    std::string csv = "scheme,theta,dt,factor,threshold,certified\n";
    if (ctx.config.stability) {
        for (const double dt : ctx.config.stability->dts) {
            const AnalyticRow row = analytic_row(lin, ctx.scheme, dt);
            csv += jsde::csv_line({jsde::scheme_name(ctx.scheme.kind), theta_cell(ctx.scheme),
                                   jsde::format_double(dt), jsde::format_double(row.factor),
                                   jsde::format_double(row.threshold),
                                   row.certified ? "1" : "0"});
        }
    }
    write_output(ctx, "analytic.csv", csv);

    const double l = jsde::linear_l(lin.a, lin.b, lin.c, lin.lambda);
    std::cout << "l = " << jsde::format_double(l) << "\n";
    std::cout << "semi-tamed max stable dt = "
              << jsde::format_double(
                     jsde::semi_tamed_linear_max_dt(lin.a, lin.b, lin.c, lin.lambda))
              << "\n";
    const jsde::TamedCertification cert =
        jsde::tamed_linear_max_dt(lin.a, lin.b, lin.c, lin.lambda);
    std::cout << "tamed certified dt bound = " << jsde::format_double(cert.max_dt)
              << (cert.case_tag != 0 ? " (case " + std::to_string(cert.case_tag) + ")" : "")
              << "\n";
}

void run_stability(RunContext& ctx, bool analytic) {
    if (analytic) {
        run_analytic(ctx);
        return;
    }
    if (!ctx.config.stability) {
        throw jsde::ConfigError("command 'stability' needs a [stability] section");
    }
    jsde::StabilityConfig sc = ctx.config.stability->config;
    sc.seed = ctx.config.seed;
    sc.threads = ctx.config.threads;
    const jsde::StabilityReport report = jsde::run_stability_sweep(
        ctx.bundle.problem, ctx.scheme, ctx.config.stability->dts, sc);

    std::string series_csv = "scheme,theta,dt,t,mean_square\n";
    std::string summary_csv = "scheme,theta,dt,classification,rate\n";
    for (const auto& s : report.series) {
        for (const auto& pt : s.points) {
            series_csv += jsde::csv_line({jsde::scheme_name(ctx.scheme.kind),
                                          theta_cell(ctx.scheme), jsde::format_double(s.dt),
                                          jsde::format_double(pt.t),
                                          jsde::format_double(pt.mean_square)});
        }
        summary_csv += jsde::csv_line({jsde::scheme_name(ctx.scheme.kind),
                                       theta_cell(ctx.scheme), jsde::format_double(s.dt),
                                       jsde::classification_name(s.result.label),
                                       jsde::format_double(s.result.rate)});
        std::cout << "dt = " << jsde::format_double(s.dt) << ": "
                  << jsde::classification_name(s.result.label) << " (rate "
                  << jsde::format_double(s.result.rate) << ")\n";
    }
    write_output(ctx, "stability_series.csv", series_csv);
    write_output(ctx, "stability_summary.csv", summary_csv);
}

void run_amplification(RunContext& ctx) {
    if (!ctx.config.amplification) {
        throw jsde::ConfigError("command 'amplification' needs an [amplification] section");
    }
    if (!ctx.bundle.problem.linear) {
        throw jsde::ConfigError("amplification validation requires the linear test equation");
    }
    jsde::AmplificationConfig ac = ctx.config.amplification->config;
    ac.seed = ctx.config.seed;
    ac.threads = ctx.config.threads;
    const jsde::AmplificationResult res = jsde::run_amplification_validation(
        *ctx.bundle.problem.linear, ctx.scheme, ctx.config.amplification->dt, ac);
    std::string csv = "scheme,theta,dt,predicted,empirical,stderr,z\n";
    csv += jsde::csv_line({jsde::scheme_name(ctx.scheme.kind), theta_cell(ctx.scheme),
                           jsde::format_double(res.dt), jsde::format_double(res.predicted),
                           jsde::format_double(res.empirical),
                           jsde::format_double(res.std_error), jsde::format_double(res.z)});
    write_output(ctx, "amplification.csv", csv);
    std::cout << "one-step factor: predicted " << jsde::format_double(res.predicted)
              << ", empirical " << jsde::format_double(res.empirical) << ", z = "
              << jsde::format_double(res.z) << "\n";
}

void write_manifest(const RunContext& ctx, const std::string& command, double wall_seconds) {
    nlohmann::ordered_json manifest;
    manifest["command"] = command;
    manifest["version"] = std::string(jsde::kVersion);
    manifest["seed"] = ctx.config.seed;
    manifest["threads"] = ctx.config.threads;
    manifest["kernel"] = jsde::kernel_isa_name(jsde::active_kernel_isa());
    manifest["wall_time_seconds"] = wall_seconds;
    nlohmann::ordered_json echo = nlohmann::ordered_json::object();
    for (const auto& [section, key, value] : ctx.config.echo) {
        const std::string group = section.empty() ? "(top)" : section;
        echo[group][key] = value;
    }
    manifest["config"] = echo;
    manifest["outputs"] = ctx.outputs;
    jsde::write_text_file((ctx.out_dir / "run_manifest.json").string(),
                          manifest.dump(2) + "\n");
}

int run_command(const std::string& command, bool stability_analytic,
                const std::string& config_path, const std::optional<std::uint64_t>& seed,
                const std::optional<std::size_t>& threads,
                const std::optional<std::string>& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    RunContext ctx{jsde::load_config_file(config_path), {}, {}, {}, {}};
    if (seed) {
        ctx.config.seed = *seed;
    }
    if (threads) {
        if (*threads == 0) {
            throw jsde::ConfigError("--threads must be at least 1");
        }
        ctx.config.threads = *threads;
    }
    if (out_dir) {
        ctx.config.out_dir = *out_dir;
    }
    ctx.out_dir = ctx.config.out_dir;
    ctx.bundle = jsde::make_bundle(ctx.config);
    ctx.scheme = jsde::make_scheme_spec(ctx.config, ctx.bundle);

    if (command == "path") {
        run_path(ctx);
    } else if (command == "converge") {
        run_converge(ctx);
    } else if (command == "stability") {
        run_stability(ctx, stability_analytic);
    } else if (command == "amplification") {
        run_amplification(ctx);
    } else {  // "analytic"
        run_analytic(ctx);
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(ctx, command, wall);
    std::cout << "wrote " << ctx.outputs.size() << " file(s) + run_manifest.json to "
              << ctx.out_dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scalar jump-diffusion SDE schemes, convergence and stability experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::uint64_t seed_value = 0;
    std::size_t threads_value = 1;
    std::string out_value;
    CLI::Option* config_opt =
        app.add_option("--config", config_path, "path to the run configuration file");
    CLI::Option* seed_opt =
        app.add_option("--seed", seed_value, "override the top-level seed");
    CLI::Option* threads_opt =
        app.add_option("--threads", threads_value, "override the top-level thread count");
    CLI::Option* out_opt = app.add_option("--out", out_value, "override the output directory");

    app.add_subcommand("path", "simulate one trajectory and write path.csv");
    app.add_subcommand("converge", "strong-convergence sweep; writes convergence.csv");
    CLI::App* stability_cmd =
        app.add_subcommand("stability", "mean-square stability sweep; writes series + summary");
    bool stability_analytic = false;
    stability_cmd->add_flag("--analytic", stability_analytic,
                            "closed-form certification instead of Monte Carlo");
    app.add_subcommand("amplification", "validate one-step factors; writes amplification.csv");
    app.add_subcommand("analytic", "closed-form stability summary; writes analytic.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (config_opt->count() == 0) {
        std::cerr << "config error: --config is required\n";
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run_command(command, stability_analytic, config_path,
                           seed_opt->count() ? std::optional<std::uint64_t>(seed_value)
                                             : std::nullopt,
                           threads_opt->count() ? std::optional<std::size_t>(threads_value)
                                                : std::nullopt,
                           out_opt->count() ? std::optional<std::string>(out_value)
                                            : std::nullopt);
    } catch (const jsde::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const jsde::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const jsde::SolverError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
