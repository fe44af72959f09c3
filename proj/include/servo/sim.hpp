#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "servo/controller.hpp"
#include "servo/fuzzy.hpp"
#include "servo/plant.hpp"
#include "servo/pso.hpp"

namespace servo {

/// Added to the fitness of runs that truncate (end stop or pressure
/// fault) so the swarm is repelled from infeasible candidates.
inline constexpr double kTruncationPenalty = 1e6;

struct TrajectorySpec {
    double y0 = 9.0;
    double y1 = 15.5;
    double t_final = 10.0;

    void validate() const;
};

struct Desired {
    double y = 0.0;
    double dy = 0.0;
    double ddy = 0.0;
};

/// Quintic smoothstep from y0 to y1 over [0, t_final]; first and second
/// derivatives vanish at both ends. Throws for t outside [0, t_final].
Desired desired(const TrajectorySpec& spec, double t);

/// Optional force disturbance amplitude*sin(2*pi*frequency*t) on the
/// piston, for robustness probes.
struct DisturbanceSpec {
    double amplitude = 0.0;
    double frequency = 0.0;
};

struct SimConfig {
    double dt = 1e-3;
    double t_final = 10.0;
    std::size_t log_every = 10;
    PlantState initial{0.0, 10.0, 3.52e5, 3.0e5};
    DisturbanceSpec disturbance;

    void validate() const;
};

// Row flag bits: control events of this sample plus integrator events of
// the step that produced it.
inline constexpr unsigned kFlagGuard = 1u;
inline constexpr unsigned kFlagSaturated = 2u;
inline constexpr unsigned kFlagPressureClamp = 4u;
inline constexpr unsigned kFlagEndStop = 8u;

struct TrajectoryRow {
    double t = 0.0;
    double y_des = 0.0;
    double y = 0.0;
    double u = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double theta_f_norm = 0.0;
    double theta_g_norm = 0.0;
    double P1 = 0.0;
    double P2 = 0.0;
    double x = 0.0;
    unsigned flags = 0;
};

struct Metrics {
    double ise = 0.0;
    double iae = 0.0;
    double rmse = 0.0;
    double max_abs_error = 0.0;
    double final_error = 0.0;
};

/// Trapezoidal ISE/IAE over an un-decimated error stream sampled every
/// dt; RMSE uses the stream's own duration. Throws on an empty stream.
Metrics metrics(std::span<const double> e, double dt);

/// Everything the closed loop needs on the controller side.
struct ControllerSetup {
    ControllerConfig config;
    ControllerState init_state;
    RuleBase rules_f;
    RuleBase rules_g;
};

struct RunResult {
    std::vector<TrajectoryRow> rows;
    Metrics metrics;
    ControllerState final_state;
    std::vector<double> error_stream;  ///< e1 at every integrator step
    bool truncated = false;            ///< end stop ended the run early
    bool pressure_clamped = false;
};

/// One closed-loop run: read output, build the error vector (output
/// derivative from a first-order filter with tau = 10*dt), apply the
/// certainty-equivalence law, step the plant, adapt. Deterministic.
RunResult run_closed_loop(const PlantParams& plant, const ControllerSetup& setup,
                          const SimConfig& sim, const TrajectorySpec& spec);

struct InputVarDef {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
};

/// Maps between PSO candidate vectors and controller setups. The
/// candidate is the concatenation of the tuned blocks, in order:
/// [theta_f | theta_g | one universe scale per input | K].
struct CandidateEncoding {
    ControllerConfig base_config;
    std::vector<InputVarDef> inputs;
    std::size_t input_mfs = 10;
    std::size_t output_mfs = 14;  ///< shared centers; 0 = one per rule
    std::vector<double> base_theta_f;
    std::vector<double> base_theta_g;
    bool tune_theta_f = true;
    bool tune_theta_g = true;
    bool tune_scales = true;
    bool tune_K = true;
    Interval scale_bounds{0.2, 5.0};
    Interval k_bounds{0.1, 50.0};

    void validate() const;
    /// Theta dimension implied by the MF layout.
    std::size_t theta_dim() const;
    /// Total candidate length over the tuned blocks.
    std::size_t dims() const;
    std::vector<Interval> bounds() const;
    /// The candidate that reproduces the baseline setup exactly.
    std::vector<double> encode_baseline() const;
    ControllerSetup decode(std::span<const double> candidate) const;
};

/// Decode, run, and score: ISE plus the truncation penalty when the run
/// faulted. Finite for every in-bounds candidate; thread-safe.
double fitness_from_candidate(std::span<const double> candidate, const CandidateEncoding& encoding,
                              const PlantParams& plant, const SimConfig& sim,
                              const TrajectorySpec& spec);

/// Full experiment description; pso.dims/bounds/initial_guess are
/// derived from the encoding by compare_experiment.
struct ExperimentSetup {
    PlantParams plant;
    SimConfig sim;
    TrajectorySpec trajectory;
    CandidateEncoding encoding;
    PsoConfig pso;
    bool skip_pso = false;  ///< also triggered by pso.max_iters == 0
};

struct CompareResult {
    RunResult baseline;
    RunResult optimized;
    PsoResult pso;  ///< default-constructed when the swarm was skipped
    bool pso_ran = false;
    std::vector<double> baseline_candidate;
    std::vector<double> best_candidate;
    double ratio = 1.0;  ///< baseline ISE / optimized ISE
};

/// Baseline arm (decoded baseline candidate) vs PSO-tuned arm. With PSO
/// skipped the optimized arm is the baseline itself and ratio is 1.
CompareResult compare_experiment(const ExperimentSetup& setup);

}  // namespace servo
