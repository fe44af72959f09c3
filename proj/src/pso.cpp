#include "servo/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace servo {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Identical uniform mapping on every platform: 53 high bits of the
// engine output scaled into [0,1).
double u01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

unsigned resolve_workers(unsigned workers, std::size_t count) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(workers, count));
}

// Strided fan-out; exceptions are captured per index and rethrown in
// index order so failures are deterministic too.
void for_each_particle(std::size_t count, unsigned workers,
                       const std::function<void(std::size_t)>& fn) {
    workers = resolve_workers(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += workers) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

std::string position_to_string(std::span<const double> x) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << "]";
    return os.str();
}

}  // namespace

void PsoConfig::validate() const {
    require(n_particles >= 1, "pso: n_particles >= 1 violated");
    require(dims >= 1, "pso: dims >= 1 violated");
    require(w >= 0.0, "pso: w >= 0 violated");
    require(c1 >= 0.0 && c2 >= 0.0, "pso: c1, c2 >= 0 violated");
    require(bounds.size() == dims, "pso: bounds must have one interval per dimension");
    for (const auto& b : bounds) require(b.lo < b.hi, "pso: bound lo < hi violated");
    require(max_iters >= 1, "pso: max_iters >= 1 violated");
    require(stall_iters >= 1, "pso: stall_iters >= 1 violated");
    require(stall_tol >= 0.0, "pso: stall_tol >= 0 violated");
    if (!v_max.empty()) {
        require(v_max.size() == dims, "pso: v_max must have one entry per dimension");
        for (double v : v_max) require(v > 0.0, "pso: v_max > 0 violated");
    }
    if (!initial_guess.empty())
        require(initial_guess.size() == dims, "pso: initial_guess dimension mismatch");
}

PsoConfig PsoConfig::resolved() const {
    validate();
    PsoConfig out = *this;
    if (out.v_max.empty()) {
        out.v_max.resize(dims);
        for (std::size_t d = 0; d < dims; ++d) out.v_max[d] = 0.2 * (bounds[d].hi - bounds[d].lo);
    }
    return out;
}

std::vector<double> update_velocity(const Particle& p, std::span<const double> gbest,
                                    const PsoConfig& config, std::span<const double> r1,
                                    std::span<const double> r2) {
    const std::size_t dims = p.position.size();
    require(gbest.size() == dims && r1.size() == dims && r2.size() == dims &&
                config.v_max.size() == dims,
            "update_velocity: dimension mismatch");
    std::vector<double> v(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        const double raw = config.w * p.velocity[d] +
                           config.c1 * r1[d] * (p.pbest[d] - p.position[d]) +
                           config.c2 * r2[d] * (gbest[d] - p.position[d]);
        v[d] = std::clamp(raw, -config.v_max[d], config.v_max[d]);
    }
    return v;
}

void update_position(Particle& p, std::span<const double> new_velocity,
                     const PsoConfig& config) {
    const std::size_t dims = p.position.size();
    require(new_velocity.size() == dims && config.bounds.size() == dims,
            "update_position: dimension mismatch");
    p.velocity.assign(new_velocity.begin(), new_velocity.end());
    for (std::size_t d = 0; d < dims; ++d) {
        p.position[d] += p.velocity[d];
        if (p.position[d] < config.bounds[d].lo) {
            p.position[d] = config.bounds[d].lo;
            p.velocity[d] = 0.0;
        } else if (p.position[d] > config.bounds[d].hi) {
            p.position[d] = config.bounds[d].hi;
            p.velocity[d] = 0.0;
        }
    }
}

double evaluate_swarm(Swarm& swarm, const FitnessFunction& fitness, unsigned workers) {
    const std::size_t count = swarm.particles.size();
    std::vector<double> values(count);
    for_each_particle(count, workers, [&](std::size_t i) {
        const auto& x = swarm.particles[i].position;
        const double f = fitness(x);
        if (!std::isfinite(f))
            throw std::domain_error("pso: non-finite fitness at position " +
                                    position_to_string(x));
        values[i] = f;
    });

    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        auto& p = swarm.particles[i];
        if (values[i] < p.pbest_fitness) {
            p.pbest_fitness = values[i];
            p.pbest = p.position;
        }
        sum += values[i];
    }
    // Scan in index order with strict improvement: ties keep the lowest
    // index, and pbests never worsen, so gbest is monotone.
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (swarm.particles[i].pbest_fitness < best) {
            best = swarm.particles[i].pbest_fitness;
            best_idx = i;
        }
    }
    swarm.gbest = swarm.particles[best_idx].pbest;
    swarm.gbest_fitness = best;
    return sum / static_cast<double>(count);
}

PsoResult optimize(const FitnessFunction& fitness, const PsoConfig& raw_config) {
    const PsoConfig config = raw_config.resolved();
    std::mt19937_64 eng(config.seed);

    Swarm swarm;
    swarm.particles.resize(config.n_particles);
    for (auto& p : swarm.particles) {
        p.position.resize(config.dims);
        p.velocity.resize(config.dims);
        for (std::size_t d = 0; d < config.dims; ++d) {
            const auto& b = config.bounds[d];
            p.position[d] = b.lo + u01(eng) * (b.hi - b.lo);
        }
        for (std::size_t d = 0; d < config.dims; ++d)
            p.velocity[d] = -config.v_max[d] + u01(eng) * 2.0 * config.v_max[d];
        p.pbest = p.position;
        p.pbest_fitness = std::numeric_limits<double>::infinity();
    }
    if (!config.initial_guess.empty()) {
        auto& p0 = swarm.particles[0];
        for (std::size_t d = 0; d < config.dims; ++d) {
            p0.position[d] =
                std::clamp(config.initial_guess[d], config.bounds[d].lo, config.bounds[d].hi);
            p0.velocity[d] = 0.0;
        }
        p0.pbest = p0.position;
    }

    PsoResult res;
    res.mean_history.push_back(evaluate_swarm(swarm, fitness, config.workers));
    swarm.history.push_back(swarm.gbest_fitness);

    std::vector<double> r1(config.dims), r2(config.dims);
    res.stop = PsoStop::max_iters;
    while (swarm.iteration < config.max_iters) {
        for (auto& p : swarm.particles) {
            for (std::size_t d = 0; d < config.dims; ++d) r1[d] = u01(eng);
            for (std::size_t d = 0; d < config.dims; ++d) r2[d] = u01(eng);
            const auto v = update_velocity(p, swarm.gbest, config, r1, r2);
            update_position(p, v, config);
        }
        res.mean_history.push_back(evaluate_swarm(swarm, fitness, config.workers));
        swarm.history.push_back(swarm.gbest_fitness);
        ++swarm.iteration;

        if (swarm.history.size() > config.stall_iters) {
            const double old = swarm.history[swarm.history.size() - 1 - config.stall_iters];
            const double gain = (old - swarm.gbest_fitness) / std::max(1.0, std::abs(old));
            if (gain < config.stall_tol) {
                res.stop = PsoStop::stall;
                break;
            }
        }
    }

    res.best_position = swarm.gbest;
    res.best_fitness = swarm.gbest_fitness;
    res.history = swarm.history;
    res.iterations = swarm.iteration;
    return res;
}

}  // namespace servo
