#include "servo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace servo {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

std::vector<LinguisticVariable> scaled_inputs(const CandidateEncoding& enc,
                                              std::span<const double> scales) {
    std::vector<LinguisticVariable> vars;
    vars.reserve(enc.inputs.size());
    for (std::size_t i = 0; i < enc.inputs.size(); ++i) {
        const auto& def = enc.inputs[i];
        double lo = def.lo;
        double hi = def.hi;
        // Scale the universe about its center; 1.0 short-circuits so the
        // baseline candidate rebuilds the universe bit-exactly.
        if (!scales.empty() && scales[i] != 1.0) {
            const double center = 0.5 * (def.lo + def.hi);
            const double half = 0.5 * (def.hi - def.lo) * scales[i];
            lo = center - half;
            hi = center + half;
        }
        vars.push_back(uniform_partition(def.name, lo, hi, static_cast<int>(enc.input_mfs)));
    }
    return vars;
}

}  // namespace

void TrajectorySpec::validate() const {
    require(t_final > 0.0, "trajectory: t_final > 0 violated");
    require(std::isfinite(y0) && std::isfinite(y1), "trajectory: non-finite endpoint");
}

Desired desired(const TrajectorySpec& spec, double t) {
    if (t < 0.0 || t > spec.t_final)
        throw std::invalid_argument("desired: t outside [0, t_final]");
    const double T = spec.t_final;
    const double s = t / T;
    const double q = ((6.0 * s - 15.0) * s + 10.0) * s * s * s;
    const double dq = ((30.0 * s - 60.0) * s + 30.0) * s * s;
    const double ddq = ((120.0 * s - 180.0) * s + 60.0) * s;
    const double span = spec.y1 - spec.y0;
    return {spec.y0 + span * q, span * dq / T, span * ddq / (T * T)};
}

void SimConfig::validate() const {
    require(dt > 0.0, "sim: dt > 0 violated");
    require(t_final >= dt, "sim: t_final >= dt violated");
    require(log_every >= 1, "sim: log_every >= 1 violated");
    require(disturbance.amplitude >= 0.0, "sim: disturbance amplitude >= 0 violated");
    require(disturbance.frequency >= 0.0, "sim: disturbance frequency >= 0 violated");
}

Metrics metrics(std::span<const double> e, double dt) {
    require(!e.empty(), "metrics: empty error stream");
    require(dt > 0.0, "metrics: dt > 0 violated");

    Metrics m;
    m.max_abs_error = std::abs(e[0]);
    for (std::size_t i = 1; i < e.size(); ++i) {
        m.ise += 0.5 * dt * (e[i - 1] * e[i - 1] + e[i] * e[i]);
        m.iae += 0.5 * dt * (std::abs(e[i - 1]) + std::abs(e[i]));
        m.max_abs_error = std::max(m.max_abs_error, std::abs(e[i]));
    }
    const double duration = dt * static_cast<double>(e.size() - 1);
    m.rmse = duration > 0.0 ? std::sqrt(m.ise / duration) : 0.0;
    m.final_error = std::abs(e.back());
    return m;
}

RunResult run_closed_loop(const PlantParams& plant, const ControllerSetup& setup,
                          const SimConfig& sim, const TrajectorySpec& spec) {
    plant.validate();
    setup.config.validate();
    sim.validate();
    spec.validate();
    require(setup.config.n == 2, "run_closed_loop: the loop is built for n = 2");
    setup.init_state.theta_f.validate();
    setup.init_state.theta_g.validate();

    const auto steps = static_cast<std::size_t>(std::llround(sim.t_final / sim.dt));
    RunResult res;
    res.error_stream.reserve(steps + 1);
    res.rows.reserve(steps / sim.log_every + 2);

    PlantState state = sim.initial;
    ControllerState ctrl = setup.init_state;
    OutputDerivativeFilter dy_filter(10.0 * sim.dt, sim.dt);

    std::vector<double> basis_f;
    std::vector<double> basis_g;
    std::vector<double> e(2);
    unsigned step_flags = 0;

    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = std::min(static_cast<double>(k) * sim.dt, sim.t_final);
        const double y = state.v;
        const double dy = dy_filter.update(y);
        const Desired des = desired(spec, t);
        e[0] = des.y - y;
        e[1] = des.dy - dy;

        const double inputs[2] = {y, e[1]};
        fuzzy_basis(inputs, setup.rules_f, basis_f);
        fuzzy_basis(inputs, setup.rules_g, basis_g);
        const ControlResult ctl = control_law(ctrl, basis_f, basis_g, e, des.ddy, setup.config);

        res.error_stream.push_back(e[0]);
        // Pure decimation: row count = floor(steps/log_every) + 1 for a
        // full-horizon run.
        if (k % sim.log_every == 0) {
            TrajectoryRow row;
            row.t = t;
            row.y_des = des.y;
            row.y = y;
            row.u = ctl.u;
            row.e1 = e[0];
            row.e2 = e[1];
            row.theta_f_norm = ctrl.theta_f.norm();
            row.theta_g_norm = ctrl.theta_g.norm();
            row.P1 = state.P1;
            row.P2 = state.P2;
            row.x = state.x;
            row.flags = step_flags | (ctl.guard_engaged ? kFlagGuard : 0u) |
                        (ctl.saturated ? kFlagSaturated : 0u);
            res.rows.push_back(row);
        }
        if (k == steps) break;

        const double dist =
            sim.disturbance.amplitude *
            std::sin(2.0 * std::numbers::pi * sim.disturbance.frequency * t);
        const StepResult sr = step(state, ctl.u, sim.dt, plant, dist);
        state = sr.state;
        step_flags = (sr.pressure_clamped ? kFlagPressureClamp : 0u) |
                     (sr.end_stop ? kFlagEndStop : 0u);
        res.pressure_clamped = res.pressure_clamped || sr.pressure_clamped;
        if (sr.end_stop) {
            res.truncated = true;
            break;
        }
        ctrl = adapt(ctrl, e, basis_f, basis_g, ctl.u, sim.dt, setup.config);
    }

    res.metrics = metrics(res.error_stream, sim.dt);
    res.final_state = ctrl;
    return res;
}

void CandidateEncoding::validate() const {
    base_config.validate();
    require(!inputs.empty(), "encoding: no fuzzy input variables");
    for (const auto& def : inputs)
        require(def.lo < def.hi, "encoding: input universe lo < hi violated");
    require(input_mfs >= 2, "encoding: input_mfs >= 2 violated");
    require(base_theta_f.size() == theta_dim(), "encoding: base_theta_f dimension mismatch");
    require(base_theta_g.size() == theta_dim(), "encoding: base_theta_g dimension mismatch");
    for (double v : base_theta_f)
        require(std::abs(v) <= base_config.theta_f_bound,
                "encoding: base_theta_f outside projection bounds");
    for (double v : base_theta_g)
        require(v >= base_config.theta_g_lo && v <= base_config.theta_g_hi,
                "encoding: base_theta_g outside projection bounds");
    require(scale_bounds.lo > 0.0 && scale_bounds.lo < scale_bounds.hi,
            "encoding: scale bounds invalid");
    require(k_bounds.lo > 0.0 && k_bounds.lo < k_bounds.hi, "encoding: K bounds invalid");
}

std::size_t CandidateEncoding::theta_dim() const {
    if (output_mfs > 0) return output_mfs;
    std::size_t dim = 1;
    for (std::size_t i = 0; i < inputs.size(); ++i) dim *= input_mfs;
    return dim;
}

std::size_t CandidateEncoding::dims() const {
    std::size_t d = 0;
    if (tune_theta_f) d += base_theta_f.size();
    if (tune_theta_g) d += base_theta_g.size();
    if (tune_scales) d += inputs.size();
    if (tune_K) d += base_config.K.size();
    return d;
}

std::vector<Interval> CandidateEncoding::bounds() const {
    std::vector<Interval> b;
    b.reserve(dims());
    if (tune_theta_f)
        b.insert(b.end(), base_theta_f.size(),
                 Interval{-base_config.theta_f_bound, base_config.theta_f_bound});
    if (tune_theta_g)
        b.insert(b.end(), base_theta_g.size(),
                 Interval{base_config.theta_g_lo, base_config.theta_g_hi});
    if (tune_scales) b.insert(b.end(), inputs.size(), scale_bounds);
    if (tune_K) b.insert(b.end(), base_config.K.size(), k_bounds);
    return b;
}

std::vector<double> CandidateEncoding::encode_baseline() const {
    std::vector<double> x;
    x.reserve(dims());
    if (tune_theta_f) x.insert(x.end(), base_theta_f.begin(), base_theta_f.end());
    if (tune_theta_g) x.insert(x.end(), base_theta_g.begin(), base_theta_g.end());
    if (tune_scales) x.insert(x.end(), inputs.size(), 1.0);
    if (tune_K) x.insert(x.end(), base_config.K.begin(), base_config.K.end());
    return x;
}

ControllerSetup CandidateEncoding::decode(std::span<const double> candidate) const {
    validate();
    require(candidate.size() == dims(), "decode: candidate length mismatch");

    std::size_t off = 0;
    auto take = [&](std::size_t count) {
        std::span<const double> block = candidate.subspan(off, count);
        off += count;
        return block;
    };
    const std::span<const double> theta_f =
        tune_theta_f ? take(base_theta_f.size()) : std::span<const double>(base_theta_f);
    const std::span<const double> theta_g =
        tune_theta_g ? take(base_theta_g.size()) : std::span<const double>(base_theta_g);
    const std::span<const double> scales =
        tune_scales ? take(inputs.size()) : std::span<const double>();
    const std::span<const double> k_gains =
        tune_K ? take(base_config.K.size()) : std::span<const double>(base_config.K);

    ControllerConfig config = base_config;
    config.K.assign(k_gains.begin(), k_gains.end());
    config.validate();

    auto vars = scaled_inputs(*this, scales);
    RuleBase rules_f = output_mfs > 0 ? RuleBase::complete_grid_shared(vars, output_mfs)
                                      : RuleBase::complete_grid(vars);
    RuleBase rules_g = rules_f;

    ControllerState state =
        make_controller_state(theta_f.size(), theta_g.size(), 0.0, config.theta_g_lo, config);
    state.theta_f.values.assign(theta_f.begin(), theta_f.end());
    state.theta_g.values.assign(theta_g.begin(), theta_g.end());
    state.theta_f.validate();
    state.theta_g.validate();

    return ControllerSetup{config, std::move(state), std::move(rules_f), std::move(rules_g)};
}

double fitness_from_candidate(std::span<const double> candidate, const CandidateEncoding& encoding,
                              const PlantParams& plant, const SimConfig& sim,
                              const TrajectorySpec& spec) {
    const ControllerSetup setup = encoding.decode(candidate);
    const RunResult run = run_closed_loop(plant, setup, sim, spec);
    return run.metrics.ise + (run.truncated ? kTruncationPenalty : 0.0);
}

CompareResult compare_experiment(const ExperimentSetup& setup) {
    setup.encoding.validate();
    CompareResult res;
    res.baseline_candidate = setup.encoding.encode_baseline();
    res.baseline = run_closed_loop(setup.plant, setup.encoding.decode(res.baseline_candidate),
                                   setup.sim, setup.trajectory);

    const bool run_pso = !setup.skip_pso && setup.pso.max_iters > 0;
    if (run_pso && setup.encoding.dims() == 0)
        throw std::invalid_argument("compare: every pso.tune_* block is frozen; nothing to tune");
    if (!run_pso) {
        res.best_candidate = res.baseline_candidate;
        res.optimized = res.baseline;
        res.ratio = 1.0;
        return res;
    }

    PsoConfig pso = setup.pso;
    pso.dims = setup.encoding.dims();
    pso.bounds = setup.encoding.bounds();
    pso.initial_guess = res.baseline_candidate;
    res.pso = optimize(
        [&](std::span<const double> x) {
            return fitness_from_candidate(x, setup.encoding, setup.plant, setup.sim,
                                          setup.trajectory);
        },
        pso);
    res.pso_ran = true;
    res.best_candidate = res.pso.best_position;
    res.optimized = run_closed_loop(setup.plant, setup.encoding.decode(res.best_candidate),
                                    setup.sim, setup.trajectory);
    res.ratio = res.baseline.metrics.ise / res.optimized.metrics.ise;
    return res;
}

}  // namespace servo
