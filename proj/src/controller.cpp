#include "servo/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace servo {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// e^T P b with b = (0,...,0,1)^T: the last column of P weighted by e.
double error_times_p_last_col(std::span<const double> e, const std::vector<double>& P,
                              std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += e[i] * P[i * n + (n - 1)];
    return s;
}

bool is_spd(const std::vector<double>& P, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = P[i * n + j];
            const double b = P[j * n + i];
            if (std::abs(a - b) > 1e-9 * (std::abs(a) + std::abs(b) + 1.0)) return false;
        }
    // Cholesky succeeds iff the matrix is positive definite.
    std::vector<double> L(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = P[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
            if (i == j) {
                if (s <= 0.0) return false;
                L[i * n + i] = std::sqrt(s);
            } else {
                L[i * n + j] = s / L[j * n + j];
            }
        }
    }
    return true;
}

}  // namespace

bool is_hurwitz(std::span<const double> K) {
    const std::size_t n = K.size();
    if (n == 0) return false;
    // Polynomial coefficients, highest power first: 1, K[n-1], ..., K[0].
    std::vector<double> coeff(n + 1);
    coeff[0] = 1.0;
    for (std::size_t i = 1; i <= n; ++i) coeff[i] = K[n - i];
    for (double c : coeff)
        if (!std::isfinite(c) || !(c > 0.0)) return false;

    const std::size_t cols = n / 2 + 1;
    std::vector<double> upper(cols, 0.0), lower(cols, 0.0);
    for (std::size_t i = 0; i < cols; ++i) {
        upper[i] = coeff[2 * i];
        lower[i] = (2 * i + 1 <= n) ? coeff[2 * i + 1] : 0.0;
    }
    for (std::size_t r = 2; r <= n; ++r) {
        if (lower[0] == 0.0) return false;
        std::vector<double> next(cols, 0.0);
        const double ratio = upper[0] / lower[0];
        for (std::size_t i = 0; i + 1 < cols; ++i)
            next[i] = upper[i + 1] - ratio * lower[i + 1];
        upper = lower;
        lower = next;
        if (!(lower[0] > 0.0)) return false;
    }
    return true;
}

void ControllerConfig::validate() const {
    require(n >= 1, "controller: n >= 1 violated");
    require(K.size() == n, "controller: K must have n entries");
    require(P.size() == n * n, "controller: P must be n x n");
    require(gamma_f > 0.0, "controller: gamma_f > 0 violated");
    require(gamma_g > 0.0, "controller: gamma_g > 0 violated");
    require(g_min > 0.0, "controller: g_min > 0 violated");
    require(u_max > 0.0, "controller: u_max > 0 violated");
    require(theta_f_bound > 0.0, "controller: theta_f_bound > 0 violated");
    require(theta_g_lo >= g_min, "controller: theta_g_lo >= g_min violated");
    require(theta_g_hi > theta_g_lo, "controller: theta_g_hi > theta_g_lo violated");
    require(is_hurwitz(K), "controller: K is not Hurwitz");
    require(is_spd(P, n), "controller: P is not symmetric positive definite");
}

ControllerState make_controller_state(std::size_t dim_f, std::size_t dim_g, double theta_f_init,
                                      double theta_g_init, const ControllerConfig& config) {
    ControllerState state;
    state.theta_f =
        ThetaVector::uniform(dim_f, theta_f_init, -config.theta_f_bound, config.theta_f_bound);
    state.theta_g =
        ThetaVector::uniform(dim_g, theta_g_init, config.theta_g_lo, config.theta_g_hi);
    return state;
}

std::vector<double> error_vector(double y, std::span<const double> y_derivs,
                                 std::span<const double> y_des) {
    if (y_des.size() != y_derivs.size() + 1)
        throw std::invalid_argument("error_vector: derivative list length mismatch");
    std::vector<double> e(y_des.size());
    e[0] = y_des[0] - y;
    for (std::size_t i = 1; i < y_des.size(); ++i) e[i] = y_des[i] - y_derivs[i - 1];
    return e;
}

ControlResult control_law(const ControllerState& state, std::span<const double> basis_f,
                          std::span<const double> basis_g, std::span<const double> e,
                          double y_des_n, const ControllerConfig& config) {
    require(e.size() == config.n, "control_law: error vector length mismatch");

    ControlResult res;
    res.f_hat = approximate(state.theta_f, basis_f);
    res.g_hat = approximate(state.theta_g, basis_g);

    double k_dot_e = 0.0;
    for (std::size_t i = 0; i < config.n; ++i) k_dot_e += config.K[i] * e[i];

    const double g_used = std::max(res.g_hat, config.g_min);
    res.guard_engaged = res.g_hat < config.g_min;
    res.u_raw = (-res.f_hat + y_des_n + k_dot_e) / g_used;
    if (!std::isfinite(res.u_raw))
        throw std::domain_error("control_law: non-finite control value");
    res.u = std::clamp(res.u_raw, -config.u_max, config.u_max);
    res.saturated = res.u != res.u_raw;
    return res;
}

ControllerState adapt(const ControllerState& state, std::span<const double> e,
                      std::span<const double> basis_f, std::span<const double> basis_g, double u,
                      double dt, const ControllerConfig& config) {
    require(e.size() == config.n, "adapt: error vector length mismatch");
    require(basis_f.size() == state.theta_f.size(), "adapt: basis_f dimension mismatch");
    require(basis_g.size() == state.theta_g.size(), "adapt: basis_g dimension mismatch");
    require(dt > 0.0, "adapt: dt > 0 violated");

    const double epb = error_times_p_last_col(e, config.P, config.n);

    ControllerState next = state;
    const double step_f = -config.gamma_f * epb * dt;
    for (std::size_t i = 0; i < basis_f.size(); ++i)
        next.theta_f.values[i] += step_f * basis_f[i];
    const double step_g = -config.gamma_g * epb * u * dt;
    for (std::size_t i = 0; i < basis_g.size(); ++i)
        next.theta_g.values[i] += step_g * basis_g[i];
    next.theta_f.project();
    next.theta_g.project();
    return next;
}

std::vector<std::vector<double>> closed_form_check(std::span<const double> K,
                                                   std::span<const double> e0, double dt,
                                                   double t_final) {
    require(K.size() == e0.size(), "closed_form_check: dimension mismatch");
    require(is_hurwitz(K), "closed_form_check: K is not Hurwitz");
    require(dt > 0.0 && t_final >= dt, "closed_form_check: bad time range");

    const std::size_t n = K.size();
    auto deriv = [&](const std::vector<double>& e) {
        std::vector<double> d(n);
        for (std::size_t i = 0; i + 1 < n; ++i) d[i] = e[i + 1];
        double a = 0.0;
        for (std::size_t i = 0; i < n; ++i) a += K[i] * e[i];
        d[n - 1] = -a;
        return d;
    };
    auto axpy = [n](const std::vector<double>& a, double s, const std::vector<double>& b) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = a[i] + s * b[i];
        return r;
    };

    const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
    std::vector<std::vector<double>> out;
    out.reserve(steps + 1);
    std::vector<double> e(e0.begin(), e0.end());
    out.push_back(e);
    for (std::size_t s = 0; s < steps; ++s) {
        const auto k1 = deriv(e);
        const auto k2 = deriv(axpy(e, 0.5 * dt, k1));
        const auto k3 = deriv(axpy(e, 0.5 * dt, k2));
        const auto k4 = deriv(axpy(e, dt, k3));
        for (std::size_t i = 0; i < n; ++i)
            e[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        out.push_back(e);
    }
    return out;
}

OutputDerivativeFilter::OutputDerivativeFilter(double tau, double dt) : dt_(dt) {
    if (!(tau > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("OutputDerivativeFilter: tau and dt must be > 0");
    alpha_ = dt / (tau + dt);
}

double OutputDerivativeFilter::update(double y) {
    if (!primed_) {
        primed_ = true;
        prev_y_ = y;
        deriv_ = 0.0;
        return deriv_;
    }
    const double raw = (y - prev_y_) / dt_;
    deriv_ += alpha_ * (raw - deriv_);
    prev_y_ = y;
    return deriv_;
}

}  // namespace servo
