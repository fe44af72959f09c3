#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace servo {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Swarm hyperparameters. v_max may be left empty to default to
/// 0.2*(hi - lo) per dimension; `workers` 0 means one thread per
/// hardware core. Results depend only on the config (and seed), never
/// on the worker count.
struct PsoConfig {
    std::size_t n_particles = 30;
    std::size_t dims = 0;
    double w = 0.72;
    double c1 = 1.49;
    double c2 = 1.49;
    std::vector<Interval> bounds;
    std::size_t max_iters = 100;
    std::size_t stall_iters = 25;
    double stall_tol = 1e-8;  ///< relative window improvement; 0 disables
    std::uint64_t seed = 1;
    std::vector<double> v_max;
    unsigned workers = 1;
    std::vector<double> initial_guess;  ///< optional particle-0 start

    void validate() const;
    /// Copy with v_max defaulted where empty.
    PsoConfig resolved() const;
};

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> pbest;
    double pbest_fitness = 0.0;
};

struct Swarm {
    std::vector<Particle> particles;
    std::vector<double> gbest;
    double gbest_fitness = 0.0;
    std::size_t iteration = 0;
    std::vector<double> history;  ///< gbest_fitness per evaluation round
};

/// Lower is better; must return finite values for in-bounds positions
/// and be safe to call from several threads at once.
using FitnessFunction = std::function<double(std::span<const double>)>;

/// w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x) per dimension, clamped to
/// [-v_max, v_max]. r1/r2 are per-dimension draws in [0,1]; config must
/// carry a resolved v_max.
std::vector<double> update_velocity(const Particle& p, std::span<const double> gbest,
                                    const PsoConfig& config, std::span<const double> r1,
                                    std::span<const double> r2);

/// x += v, clamped to bounds; velocity components are zeroed in clamped
/// dimensions. Mutates position and velocity.
void update_position(Particle& p, std::span<const double> new_velocity, const PsoConfig& config);

/// Evaluates every particle's current position (possibly concurrently),
/// applies strict-improvement pbest updates, and recomputes gbest with
/// lowest-index tie-break. Returns the mean fitness of the round.
/// Throws std::domain_error naming the position on non-finite fitness.
double evaluate_swarm(Swarm& swarm, const FitnessFunction& fitness, unsigned workers);

enum class PsoStop { max_iters, stall };

struct PsoResult {
    std::vector<double> best_position;
    double best_fitness = 0.0;
    std::vector<double> history;       ///< gbest after init + each iteration
    std::vector<double> mean_history;  ///< swarm mean per the same rounds
    std::size_t iterations = 0;        ///< update iterations executed
    PsoStop stop = PsoStop::max_iters;
};

/// Full swarm run: uniform init in bounds (particle 0 optionally pinned
/// to initial_guess), then velocity/position updates until max_iters or
/// the relative gbest improvement over the last stall_iters rounds drops
/// below stall_tol. Reproducible from the seed for any worker count.
PsoResult optimize(const FitnessFunction& fitness, const PsoConfig& config);

}  // namespace servo
