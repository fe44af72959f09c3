#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "servo/artifacts.hpp"
#include "servo/config.hpp"
#include "servo/pso.hpp"
#include "servo/sim.hpp"

namespace {

using servo::CompareResult;
using servo::ExperimentConfig;
using servo::ExperimentSetup;
using servo::ReportSpec;
using servo::RunResult;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
};

ExperimentConfig load_config(const CommonArgs& args) {
    ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = servo::parse_config_file(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (args.workers) cfg.workers = *args.workers;
    return cfg;
}

std::filesystem::path prepare_out_dir(const CommonArgs& args, const ExperimentConfig& cfg) {
    const std::filesystem::path dir = args.out_dir.empty() ? cfg.out_dir : args.out_dir;
    std::filesystem::create_directories(dir);
    return dir;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_metrics(const char* label, const RunResult& run) {
    std::cout << label << ": ise=" << run.metrics.ise << " rmse=" << run.metrics.rmse
              << " final_error=" << run.metrics.final_error
              << (run.truncated ? " (truncated)" : "") << "\n";
}

int cmd_simulate(const CommonArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(args);
    const ExperimentSetup setup = servo::make_setup(cfg);
    const auto out = prepare_out_dir(args, cfg);

    const RunResult run =
        servo::run_closed_loop(setup.plant, setup.encoding.decode(setup.encoding.encode_baseline()),
                               setup.sim, setup.trajectory);
    servo::write_text_file((out / "trajectory.csv").string(), servo::trajectory_csv(run.rows));

    ReportSpec rs;
    rs.command = "simulate";
    rs.seed = cfg.seed;
    rs.arms = {{"run", &run}};
    rs.artifacts = {"trajectory.csv", "report.txt"};
    rs.config = &cfg;
    servo::write_text_file((out / "report.txt").string(), servo::report_text(rs));

    print_metrics("run", run);
    std::cout << "artifacts: " << out.string() << "/{trajectory.csv,report.txt}\n";
    std::cout << "wall_clock_s: " << seconds_since(t0) << "\n";
    return 0;
}

int cmd_optimize(const CommonArgs& args, bool selftest) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(args);
    const auto out = prepare_out_dir(args, cfg);

    if (selftest) {
        // Sphere in 2-D: the standard sanity check with a known optimum at 0.
        servo::PsoConfig pc;
        pc.dims = 2;
        pc.n_particles = 30;
        pc.bounds = {{-5.0, 5.0}, {-5.0, 5.0}};
        pc.max_iters = 200;
        pc.stall_tol = 0.0;  // run the full budget; the point is the final value
        pc.seed = cfg.seed;
        pc.workers = cfg.workers;
        const servo::PsoResult res = servo::optimize(
            [](std::span<const double> x) {
                double s = 0.0;
                for (double v : x) s += v * v;
                return s;
            },
            pc);

        servo::write_text_file((out / "convergence.csv").string(),
                               servo::convergence_csv(&res));
        ReportSpec rs;
        rs.command = "optimize";
        rs.seed = cfg.seed;
        rs.pso = &res;
        rs.selftest_gbest = res.best_fitness;
        rs.artifacts = {"convergence.csv", "report.txt"};
        servo::write_text_file((out / "report.txt").string(), servo::report_text(rs));

        std::cout << "selftest gbest: " << res.best_fitness
                  << (res.best_fitness <= 1e-6 ? " (converged)" : " (NOT converged)") << "\n";
        std::cout << "wall_clock_s: " << seconds_since(t0) << "\n";
        return 0;
    }

    ExperimentSetup setup = servo::make_setup(cfg);
    const CompareResult cr = servo::compare_experiment(setup);

    const ExperimentConfig best_cfg =
        servo::fold_candidate(cfg, setup.encoding, cr.best_candidate);
    servo::write_text_file((out / "best.ini").string(), servo::to_ini(best_cfg));
    servo::write_text_file((out / "convergence.csv").string(),
                           servo::convergence_csv(cr.pso_ran ? &cr.pso : nullptr));

    ReportSpec rs;
    rs.command = "optimize";
    rs.seed = cfg.seed;
    rs.arms = {{"baseline", &cr.baseline}};
    if (cr.pso_ran) {
        rs.arms.emplace_back("optimized", &cr.optimized);
        rs.ise_ratio = cr.ratio;
        rs.pso = &cr.pso;
    }
    rs.artifacts = {"best.ini", "convergence.csv", "report.txt"};
    rs.config = &cfg;
    servo::write_text_file((out / "report.txt").string(), servo::report_text(rs));

    print_metrics("baseline", cr.baseline);
    if (cr.pso_ran) {
        print_metrics("optimized", cr.optimized);
        std::cout << "ise_ratio: " << cr.ratio << " after " << cr.pso.iterations
                  << " iterations\n";
    }
    std::cout << "artifacts: " << out.string() << "/{best.ini,convergence.csv,report.txt}\n";
    std::cout << "wall_clock_s: " << seconds_since(t0) << "\n";
    return 0;
}

int cmd_compare(const CommonArgs& args, bool skip_pso) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(args);
    const auto out = prepare_out_dir(args, cfg);

    ExperimentSetup setup = servo::make_setup(cfg);
    setup.skip_pso = skip_pso;
    const CompareResult cr = servo::compare_experiment(setup);

    servo::write_text_file((out / "baseline.csv").string(),
                           servo::trajectory_csv(cr.baseline.rows));
    ReportSpec rs;
    rs.command = "compare";
    rs.seed = cfg.seed;
    rs.arms = {{"baseline", &cr.baseline}};
    rs.artifacts = {"baseline.csv"};
    rs.config = &cfg;
    if (cr.pso_ran) {
        servo::write_text_file((out / "optimized.csv").string(),
                               servo::trajectory_csv(cr.optimized.rows));
        servo::write_text_file((out / "convergence.csv").string(),
                               servo::convergence_csv(&cr.pso));
        servo::write_text_file((out / "plot.svg").string(),
                               servo::compare_svg(cr.baseline.rows, cr.optimized.rows));
        rs.arms.emplace_back("optimized", &cr.optimized);
        rs.ise_ratio = cr.ratio;
        rs.pso = &cr.pso;
        rs.artifacts = {"baseline.csv", "optimized.csv", "convergence.csv", "plot.svg"};
    }
    rs.artifacts.push_back("report.txt");
    servo::write_text_file((out / "report.txt").string(), servo::report_text(rs));

    print_metrics("baseline", cr.baseline);
    if (cr.pso_ran) {
        print_metrics("optimized", cr.optimized);
        std::cout << "ise_ratio: " << cr.ratio << " after " << cr.pso.iterations
                  << " iterations (stop: "
                  << (cr.pso.stop == servo::PsoStop::stall ? "stall" : "max_iters") << ")\n";
    }
    std::cout << "artifacts: " << out.string() << "/\n";
    std::cout << "wall_clock_s: " << seconds_since(t0) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear pneumatic servo simulation with indirect adaptive fuzzy control\n"
                 "and particle-swarm tuning of the controller parameters."};
    app.require_subcommand(1);

    const std::string footer =
        "Config file keys (INI format; every key optional, defaults shown):\n\n" +
        servo::config_reference();
    app.footer(footer);

    CommonArgs sim_args, opt_args, cmp_args;
    bool selftest = false, skip_pso = false;

    auto add_common = [&](CLI::App* sub, CommonArgs& a, bool with_workers) {
        sub->add_option("--config", a.config_path, "experiment config file (INI)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", a.out_dir, "artifact directory (default: output.dir key)");
        sub->add_option("--seed", a.seed, "override pso.seed");
        if (with_workers)
            sub->add_option("--workers", a.workers,
                            "override pso.workers (fitness threads; 0 = one per core)");
        sub->footer(footer);
    };

    CLI::App* sim = app.add_subcommand("simulate", "run one closed-loop arm, write "
                                                   "trajectory.csv and report.txt");
    add_common(sim, sim_args, false);

    CLI::App* opt = app.add_subcommand(
        "optimize", "tune the controller with PSO, write best.ini, convergence.csv, report.txt");
    add_common(opt, opt_args, true);
    opt->add_flag("--selftest", selftest, "run the 2-D sphere benchmark instead");

    CLI::App* cmp = app.add_subcommand(
        "compare", "baseline vs PSO-tuned arm, write CSVs, plot.svg and report.txt");
    add_common(cmp, cmp_args, true);
    cmp->add_flag("--skip-pso", skip_pso, "emit only the baseline artifacts");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_args);
        if (opt->parsed()) return cmd_optimize(opt_args, selftest);
        if (cmp->parsed()) return cmd_compare(cmp_args, skip_pso);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
