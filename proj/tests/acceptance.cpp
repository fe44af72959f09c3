// Acceptance gate for the toolkit: one self-contained check per release
// criterion, each printing a single PASS/FAIL line with its evidence and
// timing. Exit status is the number of failed criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "servo/artifacts.hpp"
#include "servo/config.hpp"
#include "servo/controller.hpp"
#include "servo/fuzzy.hpp"
#include "servo/plant.hpp"
#include "servo/pso.hpp"
#include "servo/rk4.hpp"
#include "servo/sim.hpp"

using namespace servo;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Timer {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

  private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int digits = 3) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

void report(int idx, const std::string& label, bool ok, const std::string& detail) {
    std::cout << "criterion " << idx << " (" << label << "): " << (ok ? "PASS" : "FAIL") << " ("
              << detail << ")\n";
    if (!ok) ++g_failures;
}

// ---------------------------------------------------------------- 1: PSO

double sphere(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double rosenbrock(std::span<const double> x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
}

bool velocity_position_examples(std::string& why) {
    PsoConfig pc;
    pc.dims = 2;
    pc.n_particles = 1;
    pc.bounds = {{-10.0, 10.0}, {-10.0, 10.0}};
    pc.v_max = {100.0, 100.0};

    const std::vector<double> r_a{0.77, 0.31};
    const std::vector<double> r_b{0.52, 0.93};

    // Pure inertia: zero coefficients leave the velocity untouched.
    pc.w = 1.0;
    pc.c1 = 0.0;
    pc.c2 = 0.0;
    Particle p{{0.0, 0.0}, {0.3, -0.7}, {1.0, 2.0}, 0.0};
    std::vector<double> gb{3.0, 4.0};
    if (update_velocity(p, gb, pc, r_a, r_b) != std::vector<double>{0.3, -0.7}) {
        why = "inertia-only example";
        return false;
    }

    // Coincident particle/pbest/gbest: both attraction terms vanish.
    pc.w = 0.5;
    pc.c1 = 1.0;
    pc.c2 = 1.0;
    Particle q{{1.0, 1.0}, {0.4, -0.2}, {1.0, 1.0}, 0.0};
    gb = {1.0, 1.0};
    if (update_velocity(q, gb, pc, r_a, r_b) != std::vector<double>{0.2, -0.1}) {
        why = "coincident-points example";
        return false;
    }

    // Hand-computed value: 0.5*2 + 1*1*(1-0) + 1*1*(3-0) = 5.
    PsoConfig one;
    one.dims = 1;
    one.n_particles = 1;
    one.bounds = {{-10.0, 10.0}};
    one.v_max = {100.0};
    one.w = 0.5;
    one.c1 = 1.0;
    one.c2 = 1.0;
    const std::vector<double> r1{1.0};
    Particle h{{0.0}, {2.0}, {1.0}, 0.0};
    gb = {3.0};
    if (update_velocity(h, gb, one, r1, r1) != std::vector<double>{5.0}) {
        why = "hand velocity example";
        return false;
    }
    one.v_max = {4.0};
    if (update_velocity(h, gb, one, r1, r1) != std::vector<double>{4.0}) {
        why = "velocity clamp example";
        return false;
    }

    // Position updates: zero velocity, plain addition, bound clamp.
    Particle m{{1.0, 1.0}, {0.0, 0.0}, {1.0, 1.0}, 0.0};
    std::vector<double> zero{0.0, 0.0};
    update_position(m, zero, pc);
    if (m.position != std::vector<double>{1.0, 1.0}) {
        why = "zero-velocity position example";
        return false;
    }
    std::vector<double> dv{0.5, -2.0};
    update_position(m, dv, pc);
    if (m.position != std::vector<double>{1.5, -1.0}) {
        why = "vector-addition position example";
        return false;
    }
    Particle at_bound{{10.0, 0.0}, {0.0, 0.0}, {10.0, 0.0}, 0.0};
    std::vector<double> push{0.5, 1.0};
    update_position(at_bound, push, pc);
    if (at_bound.position != std::vector<double>{10.0, 1.0} ||
        at_bound.velocity != std::vector<double>{0.0, 1.0}) {
        why = "bound-clamp position example";
        return false;
    }
    return true;
}

void criterion_pso() {
    const Timer timer;
    std::string why;
    const bool examples_ok = velocity_position_examples(why);

    int sphere_pass = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        PsoConfig pc;
        pc.dims = 2;
        pc.n_particles = 30;
        pc.bounds = {{-5.0, 5.0}, {-5.0, 5.0}};
        pc.max_iters = 200;
        pc.stall_tol = 0.0;  // use the full budget; the claim is about 200 iterations
        pc.seed = seed;
        if (optimize(sphere, pc).best_fitness <= 1e-6) ++sphere_pass;
    }

    int rosen_pass = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        PsoConfig pc;
        pc.dims = 2;
        pc.n_particles = 40;
        pc.bounds = {{-2.0, 2.0}, {-2.0, 2.0}};
        pc.max_iters = 500;
        pc.stall_tol = 0.0;
        pc.seed = seed;
        if (optimize(rosenbrock, pc).best_fitness <= 1e-2) ++rosen_pass;
    }

    const double elapsed = timer.seconds();
    const bool ok = examples_ok && sphere_pass == 10 && rosen_pass >= 8 && elapsed < 5.0;
    std::ostringstream d;
    d << "unit examples " << (examples_ok ? "exact" : ("FAILED: " + why)) << "; sphere "
      << sphere_pass << "/10 <= 1e-6; rosenbrock " << rosen_pass << "/10 <= 1e-2 (need >= 8); "
      << fmt(elapsed) << " s < 5 s";
    report(1, "PSO kernel", ok, d.str());
}

// -------------------------------------------------- 2: fuzzy basis laws

void criterion_fuzzy() {
    const Timer timer;
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    // Partition of unity over randomized uniform partitions, sampled
    // inside and slightly outside each universe (inputs clamp).
    double max_pou = 0.0;
    std::vector<double> degs;
    for (int rep = 0; rep < 20; ++rep) {
        const double lo = -10.0 + 20.0 * u01(eng);
        const double span = 0.5 + 10.0 * u01(eng);
        const int count = 2 + static_cast<int>(u01(eng) * 9.0);
        const LinguisticVariable var = uniform_partition("v", lo, lo + span, count);
        for (int k = 0; k < 250; ++k) {
            const double x = lo - 0.1 * span + 1.2 * span * u01(eng);
            var.degrees(x, degs);
            double sum = 0.0;
            for (double d : degs) sum += d;
            max_pou = std::max(max_pou, std::abs(sum - 1.0));
        }
    }

    // Basis normalization on the production-shaped two-input grid.
    const std::vector<LinguisticVariable> vars{uniform_partition("y", 0.0, 20.0, 10),
                                               uniform_partition("de", -5.0, 5.0, 10)};
    const RuleBase rb = RuleBase::complete_grid_shared(vars, 14);
    const ThetaVector theta_c = ThetaVector::uniform(14, 4.25, -50.0, 50.0);
    double max_norm = 0.0;
    double min_entry = 0.0;
    double max_const = 0.0;
    std::vector<double> basis;
    std::vector<double> in(2);
    for (int k = 0; k < 5000; ++k) {
        in[0] = -2.0 + 26.0 * u01(eng);
        in[1] = -6.0 + 12.0 * u01(eng);
        fuzzy_basis(in, rb, basis);
        double sum = 0.0;
        for (double b : basis) {
            sum += b;
            min_entry = std::min(min_entry, b);
        }
        max_norm = std::max(max_norm, std::abs(sum - 1.0));
        max_const = std::max(max_const, std::abs(approximate(theta_c, basis) - 4.25));
    }

    // Constant reproduction is bit-exact where a single rule fires: at
    // every MF peak of a one-input grid the basis is a unit vector.
    const LinguisticVariable single = uniform_partition("x", 0.0, 1.0, 5);
    const RuleBase rb1 = RuleBase::complete_grid({single});
    const ThetaVector theta_1 = ThetaVector::uniform(5, 4.25, -50.0, 50.0);
    bool peaks_exact = true;
    for (const TriangularMF& mf : single.mfs) {
        const std::array<double, 1> at_peak{mf.b};
        if (approximate(theta_1, fuzzy_basis(at_peak, rb1)) != 4.25) peaks_exact = false;
    }

    const double elapsed = timer.seconds();
    const bool ok = max_pou <= 1e-12 && max_norm <= 1e-12 && min_entry >= 0.0 &&
                    max_const <= 1e-12 && peaks_exact && elapsed < 1.0;
    std::ostringstream d;
    d << "partition-of-unity dev " << fmt(max_pou) << ", basis-sum dev " << fmt(max_norm)
      << " (tol 1e-12, 1e4 samples); constant reproduction: peak-exact "
      << (peaks_exact ? "yes" : "NO") << ", randomized dev " << fmt(max_const) << "; "
      << fmt(elapsed) << " s < 1 s";
    report(2, "fuzzy basis laws", ok, d.str());
}

// ----------------------------------------------- 3: plant / integrator

void criterion_integrator() {
    const Timer timer;

    // Order check on y' = -y over [0, 1]: halving dt must cut the error
    // by about 2^4.
    auto decay_error = [](double dt) {
        std::array<double, 1> y{1.0};
        const int steps = static_cast<int>(std::lround(1.0 / dt));
        for (int i = 0; i < steps; ++i)
            y = rk4_step<1>(y, dt, [](const std::array<double, 1>& s) {
                return std::array<double, 1>{-s[0]};
            });
        return std::abs(y[0] - std::exp(-1.0));
    };
    std::array<double, 4> errs{};
    double dt = 0.1;
    for (int h = 0; h < 4; ++h) {
        errs[h] = decay_error(dt);
        dt /= 2.0;
    }
    bool ratios_ok = true;
    std::ostringstream ratios;
    for (int h = 0; h < 3; ++h) {
        const double r = errs[h] / errs[h + 1];
        ratios_ok = ratios_ok && r >= 12.0 && r <= 20.0;
        ratios << (h ? ", " : "") << fmt(r, 4);
    }

    // Force-balance equilibrium must not drift over 1e4 steps.
    const PlantParams plant;
    const PlantState eq{0.0, 0.0, 3e5, 3e5};
    PlantState s = eq;
    double max_dev = 0.0;
    for (int i = 0; i < 10000; ++i) {
        s = step(s, 0.0, 1e-3, plant).state;
        max_dev = std::max({max_dev, std::abs(s.x - eq.x), std::abs(s.v - eq.v),
                            std::abs(s.P1 - eq.P1), std::abs(s.P2 - eq.P2)});
    }

    const double elapsed = timer.seconds();
    const bool ok = ratios_ok && max_dev <= 1e-12 && elapsed < 1.0;
    std::ostringstream d;
    d << "halving ratios [" << ratios.str() << "] in [12, 20]; fixed-point drift "
      << fmt(max_dev) << " <= 1e-12 over 1e4 steps; " << fmt(elapsed) << " s < 1 s";
    report(3, "plant integrator", ok, d.str());
}

// ---------------------------------------------- 4: controller algebra

void criterion_controller() {
    const Timer timer;
    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    const std::vector<LinguisticVariable> vars{uniform_partition("y", 0.0, 20.0, 10),
                                               uniform_partition("de", -5.0, 5.0, 10)};
    const RuleBase rb = RuleBase::complete_grid_shared(vars, 14);

    ControllerConfig cfg;
    cfg.u_max = 1e9;  // the identity is about the unsaturated law

    // Residual of the certainty-equivalence law under random estimates,
    // errors and feedforward terms.
    double max_resid = 0.0;
    std::vector<double> basis;
    std::vector<double> in(2), e(2), vf(14), vg(14);
    for (int k = 0; k < 10000; ++k) {
        in[0] = 20.0 * u01(eng);
        in[1] = -5.0 + 10.0 * u01(eng);
        fuzzy_basis(in, rb, basis);
        for (double& v : vf) v = -50.0 + 100.0 * u01(eng);
        for (double& v : vg) v = 0.5 + 99.5 * u01(eng);
        const ControllerState state{ThetaVector{vf, std::vector<double>(14, -50.0),
                                                std::vector<double>(14, 50.0)},
                                    ThetaVector{vg, std::vector<double>(14, 0.05),
                                                std::vector<double>(14, 100.0)}};
        e[0] = -5.0 + 10.0 * u01(eng);
        e[1] = -5.0 + 10.0 * u01(eng);
        const double y_des_n = -10.0 + 20.0 * u01(eng);

        const ControlResult res = control_law(state, basis, basis, e, y_des_n, cfg);
        double k_dot_e = 0.0;
        for (std::size_t i = 0; i < 2; ++i) k_dot_e += cfg.K[i] * e[i];
        const double g_used = std::max(res.g_hat, cfg.g_min);
        max_resid = std::max(max_resid,
                             std::abs(g_used * res.u + res.f_hat - y_des_n - k_dot_e));
    }

    // Perfect estimates reduce the loop to e'' = -K^T (e, e'): with
    // K = (4, 4) the error is gone to microscopic levels by t = 10.
    const std::vector<double> K{4.0, 4.0};
    const std::vector<double> e0{1.0, 0.0};
    const auto traj = closed_form_check(K, e0, 1e-3, 10.0);
    const auto& last = traj.back();
    const double final_norm = std::hypot(last[0], last[1]);

    const double elapsed = timer.seconds();
    const bool ok = max_resid <= 1e-12 && final_norm <= 1e-3;
    std::ostringstream d;
    d << "law residual " << fmt(max_resid) << " <= 1e-12 over 1e4 draws; perfect-model |e(10)| "
      << fmt(final_norm) << " <= 1e-3 with K = (4, 4); " << fmt(elapsed) << " s";
    report(4, "controller algebra", ok, d.str());
}

// ------------------------------------------- 5: tuned-vs-baseline gap

void criterion_comparison() {
    const Timer timer;
    bool ok = true;
    std::ostringstream d;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentConfig cfg;
        cfg.seed = seed;
        const CompareResult cr = compare_experiment(make_setup(cfg));
        const bool lower = cr.optimized.metrics.ise < cr.baseline.metrics.ise;
        const bool ratio_ok = cr.ratio >= 1.5;
        const bool final_ok =
            cr.optimized.metrics.final_error <= 0.5 * cr.baseline.metrics.final_error;
        ok = ok && lower && ratio_ok && final_ok;
        d << "seed " << seed << ": ratio " << fmt(cr.ratio, 4)
          << (lower && ratio_ok && final_ok ? "" : " [FAIL]") << (seed < 5 ? ", " : "");
    }
    const double elapsed = timer.seconds();
    ok = ok && elapsed < 300.0;
    d << "; all need ISE_opt < ISE_base, ratio >= 1.5, final_opt <= 0.5*final_base; "
      << fmt(elapsed, 4) << " s < 300 s";
    report(5, "optimized vs baseline", ok, d.str());
}

// ------------------------------------------------ 6: trajectory anchor

void criterion_trajectory() {
    const TrajectorySpec spec;
    const double start = desired(spec, 0.0).y;
    const double end = desired(spec, spec.t_final).y;
    const bool ok = start == 9.0 && end > 15.0;
    std::ostringstream d;
    d << "desired(0) = " << fmt(start, 17) << " (exact 9), desired(" << fmt(spec.t_final) << ") = "
      << fmt(end, 17) << " > 15";
    report(6, "trajectory anchor", ok, d.str());
}

// ----------------------------------------------------- 7: determinism

void criterion_determinism() {
    const Timer timer;
    const fs::path root =
        fs::temp_directory_path() / ("servo_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);

    auto run = [&](const std::string& dir, const std::string& extra) {
        const std::string cmd = std::string(SERVO_CLI_PATH) + " compare --out " +
                                (root / dir).string() + extra + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    const bool ran = run("a", "") && run("b", "") && run("c", " --workers 4");

    bool identical = ran;
    std::string first_diff;
    if (ran) {
        for (const char* name : {"report.txt", "baseline.csv", "optimized.csv", "convergence.csv",
                                 "plot.svg"}) {
            const std::string a = read_text_file((root / "a" / name).string());
            if (a != read_text_file((root / "b" / name).string()) ||
                a != read_text_file((root / "c" / name).string())) {
                identical = false;
                if (first_diff.empty()) first_diff = name;
            }
        }
    }
    fs::remove_all(root);

    const double elapsed = timer.seconds();
    std::ostringstream d;
    if (!ran)
        d << "CLI compare run failed";
    else if (!identical)
        d << "artifact mismatch: " << first_diff;
    else
        d << "5 artifacts byte-identical across rerun and workers 1 vs 4";
    d << "; " << fmt(elapsed, 4) << " s";
    report(7, "determinism", ran && identical, d.str());
}

// ---------------------------------------------- 8: bounded adaptation

void criterion_boundedness() {
    const Timer timer;
    std::mt19937_64 eng(99);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    const ControllerConfig cfg;
    ControllerState state = make_controller_state(14, 14, 0.0, 60.0, cfg);

    long violations = 0;
    double min_g_eff = std::numeric_limits<double>::infinity();
    std::vector<double> bf(14), bg(14), e(2);
    auto simplex = [&](std::vector<double>& b) {
        double sum = 0.0;
        for (double& v : b) {
            v = u01(eng);
            sum += v;
        }
        if (sum == 0.0) {
            b[0] = 1.0;
            sum = 1.0;
        }
        for (double& v : b) v /= sum;
    };

    for (long k = 0; k < 1000000; ++k) {
        simplex(bf);
        simplex(bg);
        e[0] = -10.0 + 20.0 * u01(eng);
        e[1] = -10.0 + 20.0 * u01(eng);
        const double u = -10.0 + 20.0 * u01(eng);
        state = adapt(state, e, bf, bg, u, 1e-3, cfg);

        for (double v : state.theta_f.values)
            if (std::abs(v) > cfg.theta_f_bound) ++violations;
        for (double v : state.theta_g.values)
            if (v < cfg.theta_g_lo || v > cfg.theta_g_hi) ++violations;
        const double g_eff = std::max(approximate(state.theta_g, bg), cfg.g_min);
        min_g_eff = std::min(min_g_eff, g_eff);
        if (g_eff < cfg.g_min) ++violations;
    }

    const double elapsed = timer.seconds();
    const bool ok = violations == 0;
    std::ostringstream d;
    d << violations << " violations over 1e6 fuzz steps (theta_f within +-"
      << fmt(cfg.theta_f_bound) << ", theta_g in [" << fmt(cfg.theta_g_lo) << ", "
      << fmt(cfg.theta_g_hi) << "], effective g >= " << fmt(cfg.g_min) << ", min seen "
      << fmt(min_g_eff, 6) << "); " << fmt(elapsed, 4) << " s";
    report(8, "bounded adaptation", ok, d.str());
}

}  // namespace

int main() {
    std::cout << "acceptance run: 8 criteria\n";
    criterion_pso();
    criterion_fuzzy();
    criterion_integrator();
    criterion_controller();
    criterion_comparison();
    criterion_trajectory();
    criterion_determinism();
    criterion_boundedness();
    std::cout << "acceptance: " << (8 - g_failures) << "/8 criteria passed\n";
    return g_failures == 0 ? 0 : 1;
}
