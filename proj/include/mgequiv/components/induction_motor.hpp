#pragma once

// Squirrel-cage induction motor, third-order transient model: voltage
// behind the transient reactance plus rotor slip, motor convention
// internally, quantities pu on s_m.

#include <cmath>
#include <complex>
#include <utility>

#include "mgequiv/errors.hpp"
#include "mgequiv/components/zip_load.hpp"

namespace mgequiv {

struct ImParams {
    double s_m = 0.0;          // MVA
    double h_m = 0.5;          // inertia, s
    double x_m = 3.0;          // magnetizing reactance, pu
    double r_s = 0.01, x_s = 0.1;  // stator, pu
    double r_r = 0.01, x_r = 0.1;  // rotor, pu
    double load_exponent = 2.0;    // torque ~ (1-slip)^exponent
    double load_torque = 0.8;      // pu torque at synchronous speed
    double f_nom = 60.0;           // Hz

    void validate() const {
        if (s_m < 0.0) throw ModelError("IM: rating must be non-negative");
        if (s_m == 0.0) return;  // component absent
        if (!(h_m > 0.0) || !(x_m > 0.0) || !(r_s > 0.0) || !(x_s > 0.0) ||
            !(r_r > 0.0) || !(x_r > 0.0))
            throw ModelError("IM: impedances and inertia must be positive");
        if (!(x_m > x_s)) throw ModelError("IM: requires x_m > x_s");
        if (load_torque < 0.0) throw ModelError("IM: load torque must be non-negative");
    }

    double x_open() const { return x_s + x_m; }
    double x_transient() const { return x_s + x_m * x_r / (x_m + x_r); }
    double t_open() const { return (x_r + x_m) / (2.0 * M_PI * f_nom * r_r); }  // s
};

struct ImState {
    double e_rp = 0.0;  // Re of the EMF behind x', nominal synchronous frame, pu
    double e_ip = 0.0;  // Im, pu
    double slip = 0.0;  // vs nominal frequency, pu
};

namespace detail {

/// Steady-state EMF and stator current at slip s_eff (relative to the
/// frame of v_phasor).
inline void im_steady_phasors(const ImParams& m, std::complex<double> v_phasor, double s_eff,
                              std::complex<double>& e_out, std::complex<double>& i_out) {
    const std::complex<double> j(0.0, 1.0);
    const double a = 2.0 * M_PI * m.f_nom * m.t_open() * s_eff;
    const std::complex<double> z_rotor = j * (m.x_open() - m.x_transient()) / (1.0 + j * a);
    const std::complex<double> z = std::complex<double>(m.r_s, m.x_transient()) + z_rotor;
    i_out = v_phasor / z;
    e_out = v_phasor - std::complex<double>(m.r_s, m.x_transient()) * i_out;
}

inline double im_steady_torque(const ImParams& m, double v, double s_eff) {
    std::complex<double> e, i;
    im_steady_phasors(m, std::complex<double>(v, 0.0), s_eff, e, i);
    return (e * std::conj(i)).real();
}

}  // namespace detail

/// EMF decay toward the stator-fed flux, rotor-speed rotation of the EMF
/// vector, and the slip equation against a speed-dependent load torque.
inline std::pair<ImState, ComponentOutput> im_derivatives(const ImParams& m, const ImState& s,
                                                          std::complex<double> v_phasor,
                                                          double /*f_grid*/) {
    if (m.s_m == 0.0) return {ImState{}, ComponentOutput{}};
    const std::complex<double> j(0.0, 1.0);
    const double omega_n = 2.0 * M_PI * m.f_nom;
    const std::complex<double> e(s.e_rp, s.e_ip);
    const std::complex<double> i =
        (v_phasor - e) / std::complex<double>(m.r_s, m.x_transient());  // into the machine
    const double t_e = (e * std::conj(i)).real();
    const double speed = 1.0 - s.slip;
    const double t_mech = m.load_torque * std::pow(std::max(speed, 0.0), m.load_exponent);

    const std::complex<double> de =
        -j * omega_n * s.slip * e -
        (e - j * (m.x_open() - m.x_transient()) * i) / m.t_open();

    ImState d;
    d.e_rp = de.real();
    d.e_ip = de.imag();
    d.slip = (t_mech - t_e) / (2.0 * m.h_m);

    const std::complex<double> s_cons = v_phasor * std::conj(i);
    return {d, ComponentOutput{-s_cons.real() * m.s_m, -s_cons.imag() * m.s_m}};
}

/// Torque-balance equilibrium at (v0, f0): the first crossing of electrical
/// and load torque on the rising branch below breakdown slip.
inline ImState im_init_steady_state(const ImParams& m, double v0, double f0) {
    if (m.s_m == 0.0) return {};
    if (!(v0 > 0.0)) throw ModelError("IM: cannot initialize at zero terminal voltage");

    const double slip_frame = (f0 - m.f_nom) / m.f_nom;  // frame vs actual grid speed
    double s_eff = 0.0;
    if (m.load_torque > 0.0) {
        auto gap = [&](double s_try) {
            return detail::im_steady_torque(m, v0, s_try) -
                   m.load_torque * std::pow(1.0 - (s_try - slip_frame), m.load_exponent);
        };
        // only the rising branch below breakdown slip is a usable motoring
        // equilibrium; a crossing beyond it is a stalled machine
        const int kGrid = 4000;
        const double s_max = 0.9;
        int peak_idx = 1;
        double peak_torque = -1e30;
        for (int i = 1; i <= kGrid; ++i) {
            const double torque = detail::im_steady_torque(m, v0, s_max * i / kGrid);
            if (torque > peak_torque) {
                peak_torque = torque;
                peak_idx = i;
            }
        }
        double lo = 0.0;
        double hi = -1.0;
        for (int i = 1; i <= peak_idx; ++i) {
            const double s_try = s_max * i / kGrid;
            if (gap(s_try) >= 0.0) {
                hi = s_try;
                break;
            }
            lo = s_try;
        }
        if (hi < 0.0)
            throw ModelError("IM: torque balance has no solution at this voltage");
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) < 0.0 ? lo : hi) = mid;
        }
        s_eff = 0.5 * (lo + hi);
    }

    std::complex<double> e, i;
    detail::im_steady_phasors(m, std::complex<double>(v0, 0.0), s_eff, e, i);
    ImState s;
    s.e_rp = e.real();
    s.e_ip = e.imag();
    s.slip = s_eff - slip_frame;  // state is slip vs nominal frequency
    return s;
}

}  // namespace mgequiv
