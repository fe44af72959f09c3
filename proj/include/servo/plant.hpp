#pragma once

namespace servo {

// Fixed valve line pressures (Pa). The spool meters the supply path for
// positive commands and the exhaust path for negative ones.
inline constexpr double kSupplyPressure = 6.0e5;
inline constexpr double kAtmosphericPressure = 1.013e5;

// Smoothing width (m/s) of the Coulomb friction term so the right-hand
// side stays continuous for the integrator.
inline constexpr double kFrictionSmoothingVel = 1e-3;

/// Physical constants of the pneumatic servo actuator.
struct PlantParams {
    double M = 1.0;        ///< piston mass (kg)
    double m = 0.5;        ///< load mass (kg)
    double A1 = 1e-3;      ///< chamber 1 area (m^2)
    double A2 = 1e-3;      ///< chamber 2 area (m^2)
    double l = 2000.0;     ///< cylinder half-stroke (m); sized so the default velocity
                           ///  scenario uses only a few percent of the stroke
    double g = 9.81;       ///< gravitational acceleration (m/s^2)
    double theta = 0.0;    ///< incline angle (rad)
    double epsilon = 1.4;  ///< thermodynamic coefficient
    double C = 50.0;       ///< valve flow constant
    double delta_h = 0.0;  ///< heat/leakage term
    double b_v = 5.0;      ///< viscous friction coefficient (N*s/m)
    double F_c = 2.0;      ///< Coulomb friction magnitude (N)
    double P_min = 1e4;    ///< minimum admissible absolute pressure (Pa)

    /// Throws std::invalid_argument when a positivity invariant is violated.
    void validate() const;

    bool operator==(const PlantParams&) const = default;
};

/// Four-state plant: piston position/velocity and the two absolute
/// chamber pressures.
struct PlantState {
    double x = 0.0;
    double v = 0.0;
    double P1 = 3e5;
    double P2 = 3e5;

    bool operator==(const PlantState&) const = default;
};

struct StateDerivative {
    double dx = 0.0;
    double dv = 0.0;
    double dP1 = 0.0;
    double dP2 = 0.0;
};

/// Viscous + smoothed Coulomb friction. Odd in v, continuous, total.
double friction_force(double v, const PlantParams& params);

/// Mass flow through the valve for one chamber. u >= 0 meters the supply
/// path (differential P_s - P), u < 0 the exhaust path (P - P_atm); both
/// are sign-consistent via sign(dP)*sqrt(|dP|), so flow reverses if the
/// chamber pressure crosses the line pressure. Zero at u = 0.
/// Throws std::invalid_argument for P < P_min.
double valve_flow(double P, double u, const PlantParams& params);

/// Right-hand side of the four state equations. Requires |x| < l and
/// both pressures >= P_min; throws std::invalid_argument otherwise or on
/// non-finite inputs. `external_force` is an optional disturbance (N)
/// added to the force balance.
StateDerivative derivatives(const PlantState& state, double u, const PlantParams& params,
                            double external_force = 0.0);

struct StepResult {
    PlantState state;
    bool pressure_clamped = false;  ///< a pressure was pulled up to P_min
    bool end_stop = false;          ///< the step drove |x| to the stroke limit
};

/// Advances the state by one RK4 step of size dt. Pressures are clamped
/// to P_min (flagged); hitting the end stop is flagged and the returned
/// position is pinned at the limit. Deterministic.
StepResult step(const PlantState& state, double u, double dt, const PlantParams& params,
                double external_force = 0.0);

}  // namespace servo
