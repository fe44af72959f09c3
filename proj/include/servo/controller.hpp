#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "servo/fuzzy.hpp"

namespace servo {

/// True when s^n + K[n-1]*s^(n-1) + ... + K[0] has all roots strictly in
/// the left half-plane (Routh-Hurwitz test on the first column).
bool is_hurwitz(std::span<const double> K);

/// Gains and adaptation settings for the certainty-equivalence loop.
/// K[0] multiplies the tracking error itself, K[n-1] its highest
/// derivative; P is row-major n x n.
struct ControllerConfig {
    std::size_t n = 2;
    std::vector<double> K{4.0, 4.0};
    std::vector<double> P{1000.0, 0.0, 0.0, 1000.0};
    double gamma_f = 0.5;
    double gamma_g = 0.5;
    double g_min = 0.05;          ///< singularity guard on the g estimate
    double u_max = 10.0;          ///< symmetric actuator saturation
    double theta_f_bound = 50.0;  ///< projection: |theta_f entry| <= bound
    double theta_g_lo = 0.05;     ///< projection floor, must be >= g_min
    double theta_g_hi = 100.0;    ///< projection ceiling

    /// Throws std::invalid_argument on dimension mismatches, a non-Hurwitz
    /// K, or a P that is not symmetric positive definite.
    void validate() const;
};

/// Adjustable consequent centers of the two plant-function estimates.
struct ControllerState {
    ThetaVector theta_f;
    ThetaVector theta_g;
};

/// Uniform initial estimates with projection bounds from the config.
ControllerState make_controller_state(std::size_t dim_f, std::size_t dim_g, double theta_f_init,
                                      double theta_g_init, const ControllerConfig& config);

/// e[i] = y_des[i] - i-th output derivative, i = 0..n-1; y_derivs holds
/// the n-1 measured output derivatives, y_des the desired value and its
/// n-1 derivatives.
std::vector<double> error_vector(double y, std::span<const double> y_derivs,
                                 std::span<const double> y_des);

struct ControlResult {
    double u = 0.0;      ///< applied command, after guard and saturation
    double u_raw = 0.0;  ///< pre-saturation value
    double f_hat = 0.0;
    double g_hat = 0.0;  ///< raw estimate, before the g_min guard
    bool guard_engaged = false;
    bool saturated = false;
};

/// u = (-f_hat + y_des_n + K^T e) / max(g_hat, g_min), saturated to
/// [-u_max, u_max]. Throws on non-finite intermediates.
ControlResult control_law(const ControllerState& state, std::span<const double> basis_f,
                          std::span<const double> basis_g, std::span<const double> e,
                          double y_des_n, const ControllerConfig& config);

/// One explicit-Euler step of the Lyapunov update
///   theta_f' = theta_f - gamma_f*(e^T P b)*basis_f*dt
///   theta_g' = theta_g - gamma_g*(e^T P b)*basis_g*u*dt
/// with b = (0,...,0,1)^T, followed by projection to the theta bounds.
ControllerState adapt(const ControllerState& state, std::span<const double> e,
                      std::span<const double> basis_f, std::span<const double> basis_g, double u,
                      double dt, const ControllerConfig& config);

/// Integrates the ideal error system e^(n) = -K^T e from e0 and returns
/// the sampled trajectory (t = 0 included, one row per dt). Test oracle
/// for the loop under perfect estimates.
std::vector<std::vector<double>> closed_form_check(std::span<const double> K,
                                                   std::span<const double> e0, double dt,
                                                   double t_final);

/// First-order low-pass on the finite-difference derivative of a sampled
/// signal. The first sample primes the filter and reports derivative 0.
class OutputDerivativeFilter {
  public:
    OutputDerivativeFilter(double tau, double dt);

    double update(double y);
    double value() const { return deriv_; }

  private:
    double alpha_;
    double dt_;
    double prev_y_ = 0.0;
    double deriv_ = 0.0;
    bool primed_ = false;
};

}  // namespace servo
