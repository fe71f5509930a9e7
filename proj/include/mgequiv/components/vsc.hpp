#pragma once

// Grid-following converter, average model. The only retained dynamics are
// the outer DC-voltage PI loop and the DC-link energy balance; the inner
// current loop is algebraic at RMS timescale and the quadrature current
// reference is held at zero.

#include <algorithm>
#include <cmath>
#include <utility>

#include "mgequiv/errors.hpp"
#include "mgequiv/components/zip_load.hpp"

namespace mgequiv {

/// Converter ratings and DC-link control gains. Internal quantities are pu
/// on s_vsc; p_source is the constant DC-side injection as a fraction of
/// the rating.
struct VscParams {
    double s_vsc = 0.0;      // MVA
    double k_pvdc = 1.0;     // proportional gain
    double k_ivdc = 100.0;   // integral gain, 1/s
    double v_dc_nom = 1.0;   // pu
    double c_dc = 0.05;      // energy-storage constant, s
    double p_source = 0.0;   // pu of s_vsc
    double i_max = 1.2;      // pu of s_vsc

    void validate() const {
        if (s_vsc < 0.0) throw ModelError("VSC: rating must be non-negative");
        if (s_vsc == 0.0) return;  // component absent
        if (!(k_pvdc > 0.0) || !(k_ivdc > 0.0))
            throw ModelError("VSC: PI gains must be positive");
        if (!(v_dc_nom > 0.0) || !(c_dc > 0.0) || !(i_max > 0.0))
            throw ModelError("VSC: v_dc_nom, c_dc and i_max must be positive");
    }
};

struct VscState {
    double v_dc = 1.0;  // measured DC-link voltage, pu
    double xi = 0.0;    // PI integrator state, pu*s
};

/// DC-voltage PI loop plus DC-link energy balance.
///
/// The loop error is taken as (v_dc - v_dc_nom) with i_d oriented as grid
/// injection: a DC-link overvoltage raises the exported power, which drains
/// the capacitor back toward nominal. The opposite pairing (error
/// v_dc_nom - v_dc driving injection) makes the equilibrium a saddle for
/// any positive gains, so this orientation is the one under which the
/// converter can hold a steady operating point.
///
/// While the current limit is active the integrator uses back-calculation
/// anti-windup (tracking rate k_ivdc / k_pvdc). A bare integrator winds up
/// over a deep sag and afterwards over-discharges the DC link through zero
/// voltage, where the energy-balance equation is singular. Away from the
/// limit the loop is the plain PI and the equilibrium is unchanged.
inline std::pair<VscState, ComponentOutput> vsc_derivatives(const VscParams& vp,
                                                            const VscState& s, double v) {
    if (vp.s_vsc == 0.0) return {VscState{0.0, 0.0}, ComponentOutput{}};
    const double err = s.v_dc - vp.v_dc_nom;
    const double i_dref = vp.k_pvdc * err + vp.k_ivdc * s.xi;
    const double i_d = std::clamp(i_dref, -vp.i_max, vp.i_max);
    const double p_ac = v * i_d;  // pu on s_vsc; i_qref = 0 so q = 0
    VscState d;
    d.xi = err - (i_dref - i_d) / vp.k_pvdc;
    d.v_dc = (vp.p_source - p_ac) / (vp.c_dc * s.v_dc);
    return {d, ComponentOutput{p_ac * vp.s_vsc, 0.0}};
}

/// Steady state: v_dc at nominal, integrator carrying the full current
/// reference p_source / v0.
inline VscState vsc_init_steady_state(const VscParams& vp, double v0) {
    if (vp.s_vsc == 0.0) return {0.0, 0.0};
    if (!(v0 > 0.0)) throw ModelError("VSC: cannot initialize at zero terminal voltage");
    const double i_d0 = vp.p_source / v0;
    if (std::abs(i_d0) > vp.i_max)
        throw ModelError("VSC: p_source exceeds the current limit at this voltage");
    return {vp.v_dc_nom, i_d0 / vp.k_ivdc};
}

}  // namespace mgequiv
