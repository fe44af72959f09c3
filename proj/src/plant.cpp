#include "servo/plant.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "servo/rk4.hpp"

namespace servo {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double signed_sqrt(double dp) {
    return std::copysign(std::sqrt(std::abs(dp)), dp);
}

}  // namespace

void PlantParams::validate() const {
    require(M > 0.0, "plant: M > 0 violated");
    require(m >= 0.0, "plant: m >= 0 violated");
    require(A1 > 0.0, "plant: A1 > 0 violated");
    require(A2 > 0.0, "plant: A2 > 0 violated");
    require(l > 0.0, "plant: l > 0 violated");
    require(epsilon > 0.0, "plant: epsilon > 0 violated");
    require(C > 0.0, "plant: C > 0 violated");
    require(P_min > 0.0, "plant: P_min > 0 violated");
    require(b_v >= 0.0, "plant: b_v >= 0 violated");
    require(F_c >= 0.0, "plant: F_c >= 0 violated");
}

double friction_force(double v, const PlantParams& params) {
    return params.b_v * v + params.F_c * std::tanh(v / kFrictionSmoothingVel);
}

double valve_flow(double P, double u, const PlantParams& params) {
    require(P >= params.P_min, "valve_flow: pressure below P_min");
    if (u == 0.0) return 0.0;
    const double dp = (u > 0.0) ? kSupplyPressure - P : P - kAtmosphericPressure;
    return params.C * u * signed_sqrt(dp);
}

StateDerivative derivatives(const PlantState& state, double u, const PlantParams& params,
                            double external_force) {
    require(std::isfinite(state.x) && std::isfinite(state.v) && std::isfinite(state.P1) &&
                std::isfinite(state.P2) && std::isfinite(u) && std::isfinite(external_force),
            "derivatives: non-finite input");
    require(std::abs(state.x) < params.l, "derivatives: |x| >= l (end stop)");
    require(state.P1 >= params.P_min && state.P2 >= params.P_min,
            "derivatives: pressure below P_min");

    StateDerivative d;
    d.dx = state.v;
    d.dv = (params.A1 * state.P1 - params.A2 * state.P2 - friction_force(state.v, params) +
            params.m * params.g * std::sin(params.theta) + external_force) /
           (params.M + params.m);
    d.dP1 = (params.epsilon / (params.A1 * (params.l + state.x))) *
            (valve_flow(state.P1, u, params) - params.A1 * state.P1 * state.v - params.delta_h);
    d.dP2 = (params.epsilon / (params.A2 * (params.l - state.x))) *
            (-valve_flow(state.P2, u, params) - params.A2 * state.P2 * state.v - params.delta_h);
    return d;
}

StepResult step(const PlantState& state, double u, double dt, const PlantParams& params,
                double external_force) {
    require(dt > 0.0, "step: dt > 0 violated");

    StepResult res;
    // Intermediate stages may graze the pressure floor or the end stop;
    // sanitize stage inputs so the RK4 field stays evaluable and flag
    // what happened.
    auto field = [&](const std::array<double, 4>& y) -> std::array<double, 4> {
        PlantState s{y[0], y[1], y[2], y[3]};
        if (s.P1 < params.P_min) {
            s.P1 = params.P_min;
            res.pressure_clamped = true;
        }
        if (s.P2 < params.P_min) {
            s.P2 = params.P_min;
            res.pressure_clamped = true;
        }
        if (std::abs(s.x) >= params.l) {
            res.end_stop = true;
            return {0.0, 0.0, 0.0, 0.0};
        }
        const StateDerivative d = derivatives(s, u, params, external_force);
        return {d.dx, d.dv, d.dP1, d.dP2};
    };

    const std::array<double, 4> y0{state.x, state.v, state.P1, state.P2};
    std::array<double, 4> y1 = rk4_step(y0, dt, field);

    PlantState out{y1[0], y1[1], y1[2], y1[3]};
    if (out.P1 < params.P_min) {
        out.P1 = params.P_min;
        res.pressure_clamped = true;
    }
    if (out.P2 < params.P_min) {
        out.P2 = params.P_min;
        res.pressure_clamped = true;
    }
    if (std::abs(out.x) >= params.l) {
        res.end_stop = true;
        out.x = std::copysign(params.l, out.x);
        out.v = 0.0;
    }
    res.state = out;
    return res;
}

}  // namespace servo
