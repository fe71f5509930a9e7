#pragma once

// Fixed-step single-step integrators over small dense state vectors.

#include <array>
#include <cstddef>

namespace mgequiv {

enum class IntegrationMethod { rk4, trapezoidal };

/// One classic Runge-Kutta 4 step of width h. Rhs signature:
/// rhs(t, x, dxdt).
template <std::size_t N, typename Rhs>
void rk4_step(const Rhs& rhs, double t, double h, std::array<double, N>& x) {
    std::array<double, N> k1, k2, k3, k4, tmp;
    rhs(t, x, k1);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * k3[i];
    rhs(t + h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

/// Explicit trapezoidal (Heun) step: full-step predictor, averaged slopes.
template <std::size_t N, typename Rhs>
void trapezoidal_step(const Rhs& rhs, double t, double h, std::array<double, N>& x) {
    std::array<double, N> k1, k2, pred;
    rhs(t, x, k1);
    for (std::size_t i = 0; i < N; ++i) pred[i] = x[i] + h * k1[i];
    rhs(t + h, pred, k2);
    for (std::size_t i = 0; i < N; ++i) x[i] += 0.5 * h * (k1[i] + k2[i]);
}

template <std::size_t N, typename Rhs>
void integration_step(IntegrationMethod method, const Rhs& rhs, double t, double h,
                      std::array<double, N>& x) {
    if (method == IntegrationMethod::rk4)
        rk4_step<N>(rhs, t, h, x);
    else
        trapezoidal_step<N>(rhs, t, h, x);
}

}  // namespace mgequiv
