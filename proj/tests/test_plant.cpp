#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "servo/plant.hpp"
#include "servo/rk4.hpp"

using namespace servo;

TEST_SUITE("friction") {
    TEST_CASE("viscous plus smoothed Coulomb") {
        PlantParams p;
        CHECK(friction_force(0.0, p) == 0.0);
        // tanh(10/1e-3) is 1 to machine precision at cruise speed
        CHECK(friction_force(10.0, p) == doctest::Approx(52.0).epsilon(1e-12));
        CHECK(friction_force(-10.0, p) == doctest::Approx(-52.0).epsilon(1e-12));
    }

    TEST_CASE("odd and continuous through zero") {
        PlantParams p;
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> v(-20.0, 20.0);
        for (int i = 0; i < 1000; ++i) {
            const double s = v(rng);
            CHECK(friction_force(-s, p) == doctest::Approx(-friction_force(s, p)).epsilon(1e-12));
        }
        // slope near zero is bounded by b_v + F_c/width; no jump
        CHECK(std::abs(friction_force(1e-9, p)) < 1e-5);
    }
}

TEST_SUITE("valve_flow") {
    TEST_CASE("charging branch hand value") {
        PlantParams p;
        p.C = 1.0;
        CHECK(valve_flow(3e5, 0.5, p) == doctest::Approx(0.5 * std::sqrt(3e5)).epsilon(1e-15));
    }

    TEST_CASE("closed valve passes no flow") {
        PlantParams p;
        for (double P : {1e4, 1.013e5, 3e5, 6e5, 7e5}) CHECK(valve_flow(P, 0.0, p) == 0.0);
    }

    TEST_CASE("discharge branch at zero differential") {
        PlantParams p;
        CHECK(valve_flow(kAtmosphericPressure, -1.0, p) == 0.0);
    }

    TEST_CASE("scales linearly in C and u") {
        PlantParams p;
        p.C = 2.0;
        CHECK(valve_flow(3e5, 0.5, p) == doctest::Approx(std::sqrt(3e5)).epsilon(1e-15));
        CHECK(valve_flow(3e5, 1.0, p) == doctest::Approx(2.0 * std::sqrt(3e5)).epsilon(1e-15));
    }

    TEST_CASE("monotone in u between atmosphere and supply") {
        // Below P_atm the exhaust branch back-flows (positive, shrinking as
        // u rises to 0), so the response is only monotone on [P_atm, P_s].
        PlantParams p;
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> pr(kAtmosphericPressure, kSupplyPressure);
        std::uniform_real_distribution<double> du(-10.0, 10.0);
        for (int i = 0; i < 2000; ++i) {
            const double P = pr(rng);
            double a = du(rng), b = du(rng);
            if (a > b) std::swap(a, b);
            CHECK(valve_flow(P, a, p) <= valve_flow(P, b, p) + 1e-12);
        }
    }

    TEST_CASE("sign consistency: back-flow above the supply line") {
        PlantParams p;
        CHECK(valve_flow(kSupplyPressure + 1e4, 1.0, p) < 0.0);
        CHECK(valve_flow(kAtmosphericPressure - 1e4, -1.0, p) > 0.0);
    }

    TEST_CASE("rejects sub-floor pressure") {
        PlantParams p;
        CHECK_THROWS_AS(valve_flow(p.P_min - 1.0, 0.5, p), std::invalid_argument);
    }
}

TEST_SUITE("derivatives") {
    TEST_CASE("pressure-difference acceleration hand value") {
        PlantParams p;
        p.M = 1.0;
        p.m = 0.0;
        p.b_v = 0.0;
        p.F_c = 0.0;
        const StateDerivative d = derivatives({0.0, 0.0, 4e5, 3e5}, 0.0, p);
        CHECK(d.dv == 100.0);
        CHECK(d.dx == 0.0);
    }

    TEST_CASE("kinematics: dx equals v") {
        PlantParams p;
        const StateDerivative d = derivatives({1.0, -3.5, 3e5, 3e5}, 0.2, p);
        CHECK(d.dx == -3.5);
    }

    TEST_CASE("force balance is a full fixed point") {
        PlantParams p;  // theta = 0, friction(0) = 0
        const StateDerivative d = derivatives({0.0, 0.0, 3e5, 3e5}, 0.0, p);
        CHECK(d.dx == 0.0);
        CHECK(d.dv == 0.0);
        CHECK(d.dP1 == 0.0);
        CHECK(d.dP2 == 0.0);
    }

    TEST_CASE("incline adds mg sin(theta) on the load") {
        PlantParams p;
        p.theta = 0.5;
        p.b_v = 0.0;
        p.F_c = 0.0;
        const StateDerivative d = derivatives({0.0, 0.0, 3e5, 3e5}, 0.0, p);
        CHECK(d.dv ==
              doctest::Approx(p.m * p.g * std::sin(0.5) / (p.M + p.m)).epsilon(1e-15));
    }

    TEST_CASE("external force enters the balance directly") {
        PlantParams p;
        const StateDerivative base = derivatives({0.0, 0.0, 3e5, 3e5}, 0.0, p);
        const StateDerivative push = derivatives({0.0, 0.0, 3e5, 3e5}, 0.0, p, 3.0);
        CHECK(push.dv - base.dv == doctest::Approx(3.0 / (p.M + p.m)).epsilon(1e-15));
    }

    TEST_CASE("domain guards") {
        PlantParams p;
        CHECK_THROWS_AS(derivatives({p.l, 0.0, 3e5, 3e5}, 0.0, p), std::invalid_argument);
        CHECK_THROWS_AS(derivatives({0.0, 0.0, p.P_min / 2, 3e5}, 0.0, p),
                        std::invalid_argument);
        CHECK_THROWS_AS(derivatives({0.0, std::nan(""), 3e5, 3e5}, 0.0, p),
                        std::invalid_argument);
    }
}

TEST_SUITE("rk4") {
    TEST_CASE("one decay step lands on the known value") {
        const std::array<double, 1> y{1.0};
        const auto out = rk4_step<1>(y, 0.1, [](const std::array<double, 1>& s) {
            return std::array<double, 1>{-s[0]};
        });
        CHECK(out[0] == doctest::Approx(0.9048374).epsilon(1e-6));
    }

    TEST_CASE("fourth-order error reduction per halving") {
        auto integrate = [](double dt) {
            std::array<double, 1> y{1.0};
            const auto n = static_cast<std::size_t>(std::llround(1.0 / dt));
            for (std::size_t i = 0; i < n; ++i)
                y = rk4_step<1>(y, dt, [](const std::array<double, 1>& s) {
                    return std::array<double, 1>{-s[0]};
                });
            return std::abs(y[0] - std::exp(-1.0));
        };
        double prev = integrate(0.1);
        for (double dt : {0.05, 0.025, 0.0125}) {
            const double cur = integrate(dt);
            const double ratio = prev / cur;
            CHECK(ratio > 12.0);
            CHECK(ratio < 20.0);
            prev = cur;
        }
    }
}

TEST_SUITE("step") {
    TEST_CASE("deterministic: identical inputs give identical states") {
        PlantParams p;
        const PlantState s{0.5, 2.0, 3.4e5, 2.9e5};
        const StepResult a = step(s, 0.3, 1e-3, p);
        const StepResult b = step(s, 0.3, 1e-3, p);
        CHECK(a.state == b.state);
        CHECK(a.pressure_clamped == b.pressure_clamped);
    }

    TEST_CASE("force-balance fixed point is stationary") {
        PlantParams p;
        const PlantState s0{0.0, 0.0, 3e5, 3e5};
        StepResult r{s0, false, false};
        for (int i = 0; i < 1000; ++i) {
            r = step(r.state, 0.0, 1e-3, p);
            REQUIRE(r.state == s0);
            REQUIRE_FALSE(r.pressure_clamped);
            REQUIRE_FALSE(r.end_stop);
        }
    }

    TEST_CASE("pressure clamp raises the flag, never silently") {
        PlantParams p;
        // A positive command drains chamber 2 with no lower equilibrium, so
        // starting just above the floor must clamp within a few dozen steps.
        PlantState s{0.0, 0.0, 3e5, 1.1e4};
        bool clamped = false;
        for (int i = 0; i < 500 && !clamped; ++i) {
            const StepResult r = step(s, 1.0, 1e-3, p);
            s = r.state;
            REQUIRE(s.P1 >= p.P_min);
            REQUIRE(s.P2 >= p.P_min);
            REQUIRE_FALSE(r.end_stop);
            clamped = r.pressure_clamped;
        }
        CHECK(clamped);
    }

    TEST_CASE("end stop pins position and zeroes velocity") {
        PlantParams p;
        p.l = 0.05;  // 10 m/s coasting hits the stop after ~5 ms
        StepResult r{{0.0, 10.0, 3.52e5, 3e5}, false, false};
        for (int i = 0; i < 100; ++i) r = step(r.state, 0.0, 1e-3, p);
        CHECK(r.end_stop);
        CHECK(r.state.x == p.l);
        CHECK(r.state.v == 0.0);
    }

    TEST_CASE("pressures stay above floor along a driven trajectory") {
        PlantParams p;
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> du(-2.0, 2.0);
        PlantState s{0.0, 10.0, 3.52e5, 3.0e5};
        for (int i = 0; i < 5000; ++i) {
            const StepResult r = step(s, du(rng), 1e-3, p);
            s = r.state;
            REQUIRE(s.P1 >= p.P_min);
            REQUIRE(s.P2 >= p.P_min);
            if (r.end_stop) break;
        }
    }

    TEST_CASE("params validate") {
        PlantParams p;
        p.M = 0.0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
        p = PlantParams{};
        p.A1 = -1e-3;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
}
