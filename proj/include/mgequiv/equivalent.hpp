#pragma once

// Assembly of the four components at the PCC bus: packed state vector,
// combined right-hand side, net PCC power and steady-state initialization.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "mgequiv/components/induction_motor.hpp"
#include "mgequiv/components/sync_generator.hpp"
#include "mgequiv/components/vsc.hpp"
#include "mgequiv/components/zip_load.hpp"
#include "mgequiv/errors.hpp"
#include "mgequiv/parameters.hpp"
#include "mgequiv/units.hpp"

namespace mgequiv {

/// Dynamic state of the whole equivalent. network_angle is the PCC phasor
/// angle integrated from the measured frequency.
struct EquivalentState {
    SgState sg;
    ImState im;
    VscState vsc;
    double network_angle = 0.0;  // rad

    static constexpr std::size_t kSize = 12;

    std::array<double, kSize> pack() const {
        return {sg.delta, sg.omega, sg.e_qp, sg.e_dp, sg.efd, sg.p_m,
                im.e_rp, im.e_ip, im.slip, vsc.v_dc, vsc.xi, network_angle};
    }

    static EquivalentState unpack(const std::array<double, kSize>& x) {
        EquivalentState s;
        s.sg = {x[0], x[1], x[2], x[3], x[4], x[5]};
        s.im = {x[6], x[7], x[8]};
        s.vsc = {x[9], x[10]};
        s.network_angle = x[11];
        return s;
    }
};

/// Per-component active-power setpoints used by the initialization. Values
/// default to the parameter set; overrides support what-if dispatches.
struct Dispatch {
    std::optional<double> sg_p_ref;      // pu of sg_rated
    std::optional<double> vsc_p_source;  // pu of S_vsc
};

/// Net PCC flow plus the per-component injections behind it, all in MW/MVar.
struct PccOutput {
    double p_hat = 0.0;  // MW, grid -> microgrid
    double q_hat = 0.0;  // MVar
    ComponentOutput zip, sg, im, vsc;  // injections
};

/// The equivalent model resolved from a ParameterSet. A zero rating removes
/// a component entirely.
class EquivalentModel {
public:
    explicit EquivalentModel(const ParameterSet& ps, const Dispatch& dispatch = {}) {
        base_ = ps.base();
        base_.validate();

        zip_.p_z = ps.get("P_z");
        zip_.p_i = ps.get("P_i");
        zip_.p_p = ps.get("P_p");
        zip_.q_z = ps.get("Q_z");
        zip_.q_i = ps.get("Q_i");
        zip_.q_p = ps.get("Q_p");
        zip_.v0 = ps.get("zip_v0");
        zip_.validate();

        sg_.x_d = ps.get("x_d");
        sg_.x_dp = ps.get("x_dp");
        sg_.x_q = ps.get("x_q");
        sg_.x_qp = ps.get("x_qp");
        sg_.t_do_p = ps.get("T_do_p");
        sg_.t_q_p = ps.get("T_q_p");
        sg_.h = ps.get("H");
        sg_.s_rated = ps.get("sg_rated");
        sg_.k_a = ps.get("K_a");
        sg_.t_a = ps.get("T_a");
        sg_.efd_max = ps.get("efd_max");
        sg_.r_droop = ps.get("gov_droop");
        sg_.t_gov = ps.get("gov_t");
        sg_.d = ps.get("sg_damping");
        sg_.p_ref = dispatch.sg_p_ref.value_or(ps.get("sg_p_ref"));
        sg_.v_ref = ps.get("sg_v_ref");
        sg_.f_nom = base_.f_nom;
        sg_.validate();

        im_.s_m = ps.get("S_m");
        im_.h_m = ps.get("H_m");
        im_.x_m = ps.get("X_m");
        im_.r_s = ps.get("im_r_s");
        im_.x_s = ps.get("im_x_s");
        im_.r_r = ps.get("im_r_r");
        im_.x_r = ps.get("im_x_r");
        im_.load_exponent = ps.get("im_torque_exp");
        im_.load_torque = ps.get("im_load_torque");
        im_.f_nom = base_.f_nom;
        im_.validate();

        vsc_.s_vsc = ps.get("S_vsc");
        vsc_.k_pvdc = ps.get("K_pvdc");
        vsc_.k_ivdc = ps.get("K_ivdc");
        vsc_.v_dc_nom = ps.get("vsc_v_dc_nom");
        vsc_.c_dc = ps.get("vsc_c_dc");
        vsc_.p_source = dispatch.vsc_p_source.value_or(ps.get("vsc_p_source"));
        vsc_.i_max = ps.get("vsc_i_max");
        vsc_.validate();
    }

    const BaseSystem& base() const { return base_; }
    const ZipLoadParams& zip() const { return zip_; }
    const SgParams& sg() const { return sg_; }
    const ImParams& im() const { return im_; }
    const VscParams& vsc() const { return vsc_; }

    /// Combined right-hand side under instantaneous inputs (v, f).
    EquivalentState derivatives(const EquivalentState& s, double v, double f,
                                PccOutput* out = nullptr) const {
        const std::complex<double> v_phasor = std::polar(v, s.network_angle);
        auto [d_sg, out_sg] = sg_derivatives(sg_, s.sg, v_phasor, f);
        auto [d_im, out_im] = im_derivatives(im_, s.im, v_phasor, f);
        auto [d_vsc, out_vsc] = vsc_derivatives(vsc_, s.vsc, v);
        const ComponentOutput out_zip = zip_power(zip_, v);

        EquivalentState d;
        d.sg = d_sg;
        d.im = d_im;
        d.vsc = d_vsc;
        d.network_angle = 2.0 * M_PI * (f - base_.f_nom);
        if (out) {
            out->zip = out_zip;
            out->sg = out_sg;
            out->im = out_im;
            out->vsc = out_vsc;
            out->p_hat = -(out_zip.p + out_sg.p + out_im.p + out_vsc.p);
            out->q_hat = -(out_zip.q + out_sg.q + out_im.q + out_vsc.q);
        }
        return d;
    }

    PccOutput pcc_output(const EquivalentState& s, double v, double f) const {
        PccOutput out;
        derivatives(s, v, f, &out);
        return out;
    }

    /// Steady state at constant (v0, f0): each component at its own
    /// equilibrium. Derivatives are checked in the frame co-rotating with
    /// the input phasor so an off-nominal f0 remains a valid fixed point.
    EquivalentState init_steady_state(double v0, double f0) const {
        EquivalentState s;
        s.sg = sg_init_steady_state(sg_, v0, f0);
        s.im = im_init_steady_state(im_, v0, f0);
        s.vsc = vsc_init_steady_state(vsc_, v0);
        s.network_angle = 0.0;

        const double residual = relative_derivative_norm(s, v0, f0);
        if (!(residual < 1e-8))
            throw ModelError("steady-state initialization left residual " +
                             format_double(residual));
        return s;
    }

    /// Max-abs of the state derivative with the rigid rotation of the input
    /// phasor removed (equals the plain derivative norm when f0 == f_nom).
    double relative_derivative_norm(const EquivalentState& s, double v0, double f0) const {
        const EquivalentState d = derivatives(s, v0, f0);
        const double dtheta = d.network_angle;
        const std::complex<double> e(s.im.e_rp, s.im.e_ip);
        const std::complex<double> de(d.im.e_rp, d.im.e_ip);
        const std::complex<double> de_rel = de - std::complex<double>(0.0, dtheta) * e;
        double m = 0.0;
        auto acc = [&m](double x) { m = std::max(m, std::abs(x)); };
        acc(d.sg.delta - dtheta);
        acc(d.sg.omega);
        acc(d.sg.e_qp);
        acc(d.sg.e_dp);
        acc(d.sg.efd);
        acc(d.sg.p_m);
        acc(de_rel.real());
        acc(de_rel.imag());
        acc(d.im.slip);
        acc(d.vsc.v_dc);
        acc(d.vsc.xi);
        return m;
    }

private:
    BaseSystem base_;
    ZipLoadParams zip_;
    SgParams sg_;
    ImParams im_;
    VscParams vsc_;
};

}  // namespace mgequiv
