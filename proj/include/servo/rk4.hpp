#pragma once

#include <array>
#include <cstddef>

namespace servo {

/// Classic fixed-step 4th-order Runge-Kutta over a small state array.
/// `deriv` maps a state to its time derivative. Deterministic: the same
/// inputs always produce bit-identical output.
template <std::size_t N, typename F>
std::array<double, N> rk4_step(const std::array<double, N>& y, double dt, F&& deriv) {
    auto axpy = [](const std::array<double, N>& a, double s, const std::array<double, N>& b) {
        std::array<double, N> r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
        return r;
    };

    const std::array<double, N> k1 = deriv(y);
    const std::array<double, N> k2 = deriv(axpy(y, 0.5 * dt, k1));
    const std::array<double, N> k3 = deriv(axpy(y, 0.5 * dt, k2));
    const std::array<double, N> k4 = deriv(axpy(y, dt, k3));

    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace servo
