#pragma once

// Two-axis fourth-order synchronous generator with a static high-gain
// exciter (first-order lag, hard field limits) and a first-order droop
// governor. Stator resistance neglected; quantities pu on s_rated.

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "mgequiv/errors.hpp"
#include "mgequiv/components/zip_load.hpp"

namespace mgequiv {

struct SgParams {
    double x_d = 2.0, x_dp = 0.3;    // d-axis synchronous / transient reactance, pu
    double x_q = 1.8, x_qp = 0.6;    // q-axis, pu
    double t_do_p = 6.0, t_q_p = 1.0;  // open-circuit time constants, s
    double h = 3.0;                  // inertia, s
    double s_rated = 0.0;            // MVA
    double k_a = 200.0;              // AVR gain
    double t_a = 0.001;              // AVR lag, s
    double efd_max = 6.0;            // field voltage limit, pu
    double r_droop = 0.05;           // governor droop, pu
    double t_gov = 0.5;              // governor lag, s
    double d = 1.0;                  // damping torque coefficient, pu
    double p_ref = 0.0;              // dispatch target, pu of s_rated
    double v_ref = 1.0;              // AVR reference, pu
    double f_nom = 60.0;             // Hz

    void validate() const {
        if (s_rated < 0.0) throw ModelError("SG: rating must be non-negative");
        if (s_rated == 0.0) return;  // component absent
        if (!(x_d > x_dp) || !(x_dp > 0.0))
            throw ModelError("SG: requires x_d > x_dp > 0");
        if (!(x_q >= x_qp) || !(x_qp > 0.0))
            throw ModelError("SG: requires x_q >= x_qp > 0");
        if (!(t_do_p > 0.0) || !(t_q_p > 0.0) || !(h > 0.0))
            throw ModelError("SG: time constants and inertia must be positive");
        if (!(k_a > 0.0) || !(t_a > 0.0))
            throw ModelError("SG: AVR gain and lag must be positive");
        if (!(r_droop > 0.0) || !(t_gov > 0.0))
            throw ModelError("SG: governor droop and lag must be positive");
        if (d < 0.0) throw ModelError("SG: damping must be non-negative");
    }
};

struct SgState {
    double delta = 0.0;  // rotor angle vs the nominal synchronous frame, rad
    double omega = 0.0;  // speed deviation, pu
    double e_qp = 0.0;   // q-axis transient EMF, pu
    double e_dp = 0.0;   // d-axis transient EMF, pu
    double efd = 0.0;    // exciter output state, pu
    double p_m = 0.0;    // mechanical power, pu
};

/// Two-axis dynamics under a terminal phasor and grid frequency. The rotor
/// angle is integrated against the nominal synchronous frame; the network
/// reference enters through arg(v_phasor). The field ceiling clamps the
/// regulator target inside the lag, so the efd state itself stays within
/// the limits and the right-hand side stays Lipschitz-continuous for the
/// fixed-step integrators.
inline std::pair<SgState, ComponentOutput> sg_derivatives(const SgParams& g, const SgState& s,
                                                          std::complex<double> v_phasor,
                                                          double f_grid) {
    if (g.s_rated == 0.0) return {SgState{}, ComponentOutput{}};
    const double v = std::abs(v_phasor);
    const double theta = std::arg(v_phasor);
    const double rel = s.delta - theta;
    const double v_d = v * std::sin(rel);
    const double v_q = v * std::cos(rel);

    const double i_d = (s.e_qp - v_q) / g.x_dp;
    const double i_q = (v_d - s.e_dp) / g.x_qp;
    const double p_e = v_d * i_d + v_q * i_q;
    const double q_e = v_q * i_d - v_d * i_q;

    const double efd_target = std::clamp(g.k_a * (g.v_ref - v), -g.efd_max, g.efd_max);
    const double omega_n = 2.0 * M_PI * g.f_nom;
    const double slip_vs_grid = s.omega - (f_grid - g.f_nom) / g.f_nom;

    SgState d;
    d.delta = omega_n * s.omega;
    d.omega = (s.p_m - p_e - g.d * slip_vs_grid) / (2.0 * g.h);
    d.e_qp = (s.efd - s.e_qp - (g.x_d - g.x_dp) * i_d) / g.t_do_p;
    d.e_dp = (-s.e_dp + (g.x_q - g.x_qp) * i_q) / g.t_q_p;
    d.efd = (efd_target - s.efd) / g.t_a;
    d.p_m = (g.p_ref - s.omega / g.r_droop - s.p_m) / g.t_gov;
    return {d, ComponentOutput{p_e * g.s_rated, q_e * g.s_rated}};
}

/// Equilibrium under constant (v0, f0). The exciter settles at
/// k_a (v_ref - v0); the rotor angle solves the steady power-angle relation
/// for the governor target on the rising (synchronizing) branch.
inline SgState sg_init_steady_state(const SgParams& g, double v0, double f0) {
    if (g.s_rated == 0.0) return {};
    if (!(v0 > 0.0)) throw ModelError("SG: cannot initialize at zero terminal voltage");

    const double omega0 = (f0 - g.f_nom) / g.f_nom;
    const double p_m0 = g.p_ref - omega0 / g.r_droop;
    const double p_target = p_m0;  // slip_vs_grid = 0 at this equilibrium
    const double efd0 = g.k_a * (g.v_ref - v0);
    if (std::abs(efd0) > g.efd_max)
        throw ModelError("SG: AVR saturates at the initial voltage, no equilibrium");
    if (!(efd0 > 0.0))
        throw ModelError("SG: initial field voltage is not positive, no equilibrium");

    auto power = [&](double delta) {
        return efd0 * v0 / g.x_d * std::sin(delta) +
               v0 * v0 * 0.5 * (1.0 / g.x_q - 1.0 / g.x_d) * std::sin(2.0 * delta);
    };

    // locate the global maximum of the power-angle curve on [-pi/2, pi/2+0.6]
    const int kGrid = 2400;
    const double lo = -M_PI / 2.0, hi = M_PI / 2.0 + 0.6;
    int peak_idx = 0;
    double peak_p = -1e30;
    for (int i = 0; i <= kGrid; ++i) {
        const double delta = lo + (hi - lo) * i / kGrid;
        const double p = power(delta);
        if (p > peak_p) {
            peak_p = p;
            peak_idx = i;
        }
    }
    if (p_target > peak_p)
        throw ModelError("SG: dispatch exceeds the maximum steady-state power");

    // bracket the crossing on the rising branch left of the peak
    double bracket_hi = lo + (hi - lo) * peak_idx / kGrid;
    double bracket_lo = bracket_hi;
    for (int i = peak_idx; i >= 0; --i) {
        bracket_lo = lo + (hi - lo) * i / kGrid;
        if (power(bracket_lo) <= p_target) break;
        bracket_hi = bracket_lo;
        if (i == 0)
            throw ModelError("SG: no rotor angle matches the dispatch target");
    }
    if (power(bracket_lo) > p_target)
        throw ModelError("SG: no rotor angle matches the dispatch target");

    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (bracket_lo + bracket_hi);
        (power(mid) <= p_target ? bracket_lo : bracket_hi) = mid;
    }
    const double delta_rel = 0.5 * (bracket_lo + bracket_hi);

    SgState s;
    s.delta = delta_rel;  // entry angle, network reference starts at zero
    s.omega = omega0;
    const double v_d = v0 * std::sin(delta_rel);
    const double v_q = v0 * std::cos(delta_rel);
    const double i_d = (efd0 - v_q) / g.x_d;
    const double i_q = v_d / g.x_q;
    s.e_qp = v_q + g.x_dp * i_d;
    s.e_dp = (g.x_q - g.x_qp) * i_q;
    s.efd = efd0;
    s.p_m = p_m0;
    return s;
}

}  // namespace mgequiv
