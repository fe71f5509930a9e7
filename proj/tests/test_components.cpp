#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "mgequiv/equivalent.hpp"
#include "mgequiv/parameters.hpp"

using namespace mgequiv;

namespace {

/// Independent torque route: rotor-branch current of the classic T-circuit,
/// air-gap torque |I_r|^2 * r_r / s.
double im_torque_tcircuit(const ImParams& m, double v, double slip) {
    const std::complex<double> j(0.0, 1.0);
    const std::complex<double> z_rotor = m.r_r / slip + j * m.x_r;
    const std::complex<double> z_mag = j * m.x_m;
    const std::complex<double> z_par = z_rotor * z_mag / (z_rotor + z_mag);
    const std::complex<double> z_tot = std::complex<double>(m.r_s, m.x_s) + z_par;
    const std::complex<double> i_s = v / z_tot;
    const std::complex<double> e_m = v - std::complex<double>(m.r_s, m.x_s) * i_s;
    const std::complex<double> i_r = e_m / z_rotor;
    return std::norm(i_r) * m.r_r / slip;
}

ImParams reference_im() {
    ImParams m;
    m.s_m = 1.152;
    m.h_m = 0.55;
    m.x_m = 2.001;
    m.r_s = 0.01;
    m.x_s = 0.1;
    m.r_r = 0.01;
    m.x_r = 0.1;
    m.load_exponent = 2.0;
    m.load_torque = 0.8;
    m.f_nom = 60.0;
    return m;
}

SgParams reference_sg() {
    SgParams g;
    g.x_d = 2.633;
    g.x_dp = 0.282;
    g.x_q = 1.6;
    g.x_qp = 0.964;
    g.t_do_p = 6.76;
    g.t_q_p = 0.914;
    g.h = 3.108;
    g.s_rated = 8.8;
    g.k_a = 177.995;
    g.t_a = 0.001;
    g.efd_max = 6.0;
    g.r_droop = 0.05;
    g.t_gov = 0.5;
    g.d = 1.0;
    g.p_ref = 0.4;
    g.v_ref = 1.01;
    g.f_nom = 60.0;
    return g;
}

VscParams reference_vsc() {
    VscParams v;
    v.s_vsc = 3.027;
    v.k_pvdc = 1.636;
    v.k_ivdc = 457.07;
    v.v_dc_nom = 1.0;
    v.c_dc = 0.05;
    v.p_source = 0.5;
    v.i_max = 1.2;
    return v;
}

ZipLoadParams reference_zip() {
    return {1.154, 1.512, 2.536, 1.327, 1.517, 0.978, 1.0};
}

}  // namespace

TEST_CASE("zip_power reproduces the reference operating points") {
    const ZipLoadParams zp = reference_zip();
    SECTION("at v = v0 the consumed power is the component sum") {
        const ComponentOutput out = zip_power(zp, 1.0);
        REQUIRE(-out.p == Catch::Approx(5.202).margin(1e-12));
        REQUIRE(-out.q == Catch::Approx(3.822).margin(1e-12));
    }
    SECTION("at v = 0 only the constant-power part remains") {
        const ComponentOutput out = zip_power(zp, 0.0);
        REQUIRE(-out.p == Catch::Approx(2.536).margin(1e-15));
        REQUIRE(-out.q == Catch::Approx(0.978).margin(1e-15));
    }
    SECTION("at v/v0 = 0.9 the hand-evaluated consumption matches") {
        const ComponentOutput out = zip_power(zp, 0.9);
        REQUIRE(-out.p == Catch::Approx(4.83154).margin(1e-12));
    }
}

TEST_CASE("zip_power matches the quadratic law for 1000 random draws") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        ZipLoadParams zp;
        zp.p_z = 3.0 * u(rng);
        zp.p_i = 3.0 * u(rng);
        zp.p_p = 3.0 * u(rng);
        zp.q_z = 2.0 * u(rng);
        zp.q_i = 2.0 * u(rng);
        zp.q_p = 2.0 * u(rng);
        zp.v0 = 0.9 + 0.2 * std::abs(u(rng));
        const double v = 1.2 * std::abs(u(rng));
        const double r = v / zp.v0;
        const ComponentOutput out = zip_power(zp, v);
        REQUIRE(out.p == Catch::Approx(-(zp.p_z * r * r + zp.p_i * r + zp.p_p)).margin(1e-12));
        REQUIRE(out.q == Catch::Approx(-(zp.q_z * r * r + zp.q_i * r + zp.q_p)).margin(1e-12));
    }
}

TEST_CASE("vsc holds zero output at zero error and zero integrator") {
    const VscParams vp = reference_vsc();
    const VscState s{vp.v_dc_nom, 0.0};
    auto [d, out] = vsc_derivatives(vp, s, 1.0);
    REQUIRE(out.p == 0.0);
    REQUIRE(out.q == 0.0);
    REQUIRE(d.xi == 0.0);
}

TEST_CASE("vsc proportional path scales a 0.01 pu DC error by k_pvdc") {
    const VscParams vp = reference_vsc();
    // loop error is (v_dc - v_dc_nom); a 0.01 pu magnitude error produces
    // k_pvdc * 0.01 = 0.01636 pu of current reference
    const VscState s{vp.v_dc_nom + 0.01, 0.0};
    auto [d, out] = vsc_derivatives(vp, s, 1.0);
    REQUIRE(out.p / vp.s_vsc == Catch::Approx(0.01636).margin(1e-12));
}

TEST_CASE("vsc equilibrium zeroes all derivatives") {
    const VscParams vp = reference_vsc();
    const VscState s = vsc_init_steady_state(vp, 1.0);
    auto [d, out] = vsc_derivatives(vp, s, 1.0);
    REQUIRE(d.v_dc == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(d.xi == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(out.p / vp.s_vsc == Catch::Approx(vp.p_source).margin(1e-14));
}

TEST_CASE("vsc current limit blocks infeasible source power") {
    VscParams vp = reference_vsc();
    vp.p_source = 1.5;  // above i_max at v = 1
    REQUIRE_THROWS_AS(vsc_init_steady_state(vp, 1.0), ModelError);
}

TEST_CASE("vsc dc-link energy balance holds at random states") {
    // d/dt (c/2 v_dc^2) = c v_dc dv_dc/dt must equal p_source - p_ac
    const VscParams vp = reference_vsc();
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const VscState s{0.7 + 0.6 * u(rng), -0.01 + 0.02 * u(rng)};
        const double v = 0.2 + u(rng);
        auto [d, out] = vsc_derivatives(vp, s, v);
        const double energy_rate = vp.c_dc * s.v_dc * d.v_dc;
        REQUIRE(energy_rate ==
                Catch::Approx(vp.p_source - out.p / vp.s_vsc).margin(1e-10));
    }
}

TEST_CASE("sg equilibrium zeroes all derivatives under constant inputs") {
    const SgParams g = reference_sg();
    const SgState s = sg_init_steady_state(g, 1.0, 60.0);
    auto [d, out] = sg_derivatives(g, s, std::complex<double>(1.0, 0.0), 60.0);
    REQUIRE(std::abs(d.delta) < 1e-10);
    REQUIRE(std::abs(d.omega) < 1e-10);
    REQUIRE(std::abs(d.e_qp) < 1e-10);
    REQUIRE(std::abs(d.e_dp) < 1e-10);
    REQUIRE(std::abs(d.efd) < 1e-10);
    REQUIRE(std::abs(d.p_m) < 1e-10);
    REQUIRE(out.p / g.s_rated == Catch::Approx(g.p_ref).margin(1e-10));
}

TEST_CASE("sg AVR forcing reproduces the k_a * error product") {
    SgParams g = reference_sg();
    SgState s = sg_init_steady_state(g, 1.0, 60.0);
    s.efd = 0.0;
    const double v = g.v_ref - 0.001;
    auto [d, out] = sg_derivatives(g, s, std::complex<double>(v, 0.0), 60.0);
    REQUIRE(d.efd * g.t_a == Catch::Approx(0.177995).margin(1e-12));
}

TEST_CASE("sg governor steady target follows the droop law") {
    SgParams g = reference_sg();
    g.r_droop = 0.05;
    SgState s = sg_init_steady_state(g, 1.0, 60.0);
    s.omega = 0.01;
    s.p_m = 0.0;
    auto [d, out] = sg_derivatives(g, s, std::complex<double>(1.0, 0.0), 60.0);
    // steady target of the first-order lag: p_ref - omega / r_droop
    REQUIRE(d.p_m * g.t_gov == Catch::Approx(g.p_ref - 0.2).margin(1e-12));
}

TEST_CASE("sg stator algebra agrees with direct phasor evaluation") {
    const SgParams g = reference_sg();
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        SgState s;
        s.delta = 1.5 * u(rng);
        s.e_qp = 0.8 + 0.6 * std::abs(u(rng));
        s.e_dp = 0.4 * u(rng);
        const double vm = 0.5 + 0.7 * std::abs(u(rng));
        const double vth = 2.0 * u(rng);
        const std::complex<double> v_phasor = std::polar(vm, vth);

        auto [d, out] = sg_derivatives(g, s, v_phasor, 60.0);

        // phasor route: rotate the terminal voltage into the machine frame,
        // solve the stator equations, rotate the current back, take S = V I*
        const std::complex<double> rot = std::polar(1.0, s.delta - M_PI / 2.0);
        const std::complex<double> v_dq = v_phasor / rot;
        const double v_d = v_dq.real(), v_q = v_dq.imag();
        const double i_d = (s.e_qp - v_q) / g.x_dp;
        const double i_q = (v_d - s.e_dp) / g.x_qp;
        const std::complex<double> i_net = std::complex<double>(i_d, i_q) * rot;
        const std::complex<double> sp = v_phasor * std::conj(i_net);

        REQUIRE(out.p / g.s_rated == Catch::Approx(sp.real()).margin(1e-10));
        REQUIRE(out.q / g.s_rated == Catch::Approx(sp.imag()).margin(1e-10));
    }
}

TEST_CASE("sg init refuses an overloaded dispatch") {
    SgParams g = reference_sg();
    g.p_ref = 2.0;  // far beyond the power-angle peak at this excitation
    REQUIRE_THROWS_AS(sg_init_steady_state(g, 1.0, 60.0), ModelError);
}

TEST_CASE("im equilibrium zeroes all derivatives") {
    const ImParams m = reference_im();
    const ImState s = im_init_steady_state(m, 1.0, 60.0);
    auto [d, out] = im_derivatives(m, s, std::complex<double>(1.0, 0.0), 60.0);
    REQUIRE(std::abs(d.e_rp) < 1e-9);
    REQUIRE(std::abs(d.e_ip) < 1e-9);
    REQUIRE(std::abs(d.slip) < 1e-9);
    REQUIRE(out.p < 0.0);  // consumption mapped to a negative injection
}

TEST_CASE("im init slip matches an independent T-circuit bisection to 1e-10") {
    const ImParams m = reference_im();
    const ImState s = im_init_steady_state(m, 1.0, 60.0);

    auto gap = [&](double slip) {
        return im_torque_tcircuit(m, 1.0, slip) -
               m.load_torque * std::pow(1.0 - slip, m.load_exponent);
    };
    double lo = 1e-9, hi = 0.2;
    REQUIRE(gap(lo) < 0.0);
    while (gap(hi) < 0.0) hi += 0.1;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    REQUIRE(s.slip == Catch::Approx(0.5 * (lo + hi)).margin(1e-10));
}

TEST_CASE("im with zero voltage accelerates by the load torque once EMFs decay") {
    const ImParams m = reference_im();
    ImState s;
    s.e_rp = 0.0;
    s.e_ip = 0.0;
    s.slip = 0.05;
    auto [d, out] = im_derivatives(m, s, std::complex<double>(0.0, 0.0), 60.0);
    const double t_mech = m.load_torque * std::pow(1.0 - s.slip, m.load_exponent);
    REQUIRE(d.slip == Catch::Approx(t_mech / (2.0 * m.h_m)).margin(1e-14));
    REQUIRE(out.p == 0.0);
}

TEST_CASE("im no-load reactive draw tracks the magnetizing branch when x_m doubles") {
    ImParams m = reference_im();
    m.load_torque = 0.0;

    auto no_load_q = [](const ImParams& mm) {
        const ImState s = im_init_steady_state(mm, 1.0, 60.0);
        auto [d, out] = im_derivatives(mm, s, std::complex<double>(1.0, 0.0), 60.0);
        return -out.q / mm.s_m;
    };
    auto oracle_q = [](const ImParams& mm) {
        // open rotor: Q = v^2 x0 / (r_s^2 + x0^2)
        const double x0 = mm.x_s + mm.x_m;
        return x0 / (mm.r_s * mm.r_s + x0 * x0);
    };

    const double q1 = no_load_q(m);
    ImParams m2 = m;
    m2.x_m *= 2.0;
    const double q2 = no_load_q(m2);
    REQUIRE(q1 == Catch::Approx(oracle_q(m)).margin(1e-10));
    REQUIRE(q2 == Catch::Approx(oracle_q(m2)).margin(1e-10));
    REQUIRE(q2 / q1 == Catch::Approx(oracle_q(m2) / oracle_q(m)).margin(1e-10));
}

TEST_CASE("im init reports an unsolvable torque balance") {
    ImParams m = reference_im();
    m.load_torque = 0.8;
    REQUIRE_THROWS_WITH(im_init_steady_state(m, 0.2, 60.0),
                        Catch::Matchers::ContainsSubstring("torque balance"));
}

TEST_CASE("assembled equivalent initializes at the reference parameters") {
    const ParameterSet ps;
    const EquivalentModel model(ps);
    const EquivalentState s = model.init_steady_state(1.0, 60.0);
    REQUIRE(model.relative_derivative_norm(s, 1.0, 60.0) < 1e-8);

    const PccOutput out = model.pcc_output(s, 1.0, 60.0);
    // net import = loads minus local generation
    REQUIRE(out.p_hat ==
            Catch::Approx(-(out.zip.p + out.sg.p + out.im.p + out.vsc.p)).margin(1e-12));
    REQUIRE(out.zip.p < 0.0);
    REQUIRE(out.sg.p > 0.0);
    REQUIRE(out.vsc.p > 0.0);
}

TEST_CASE("zero ratings give the all-zero-output equilibrium") {
    ParameterSet ps;
    ps.set("sg_rated", 0.0);
    ps.set("S_m", 0.0);
    ps.set("S_vsc", 0.0);
    ps.set("vsc_p_source", 0.0);
    ps.set("P_z", 0.0);
    ps.set("P_i", 0.0);
    ps.set("P_p", 0.0);
    ps.set("Q_z", 0.0);
    ps.set("Q_i", 0.0);
    ps.set("Q_p", 0.0);
    const EquivalentModel model(ps);
    const EquivalentState s = model.init_steady_state(1.0, 60.0);
    const PccOutput out = model.pcc_output(s, 1.0, 60.0);
    REQUIRE(out.p_hat == 0.0);
    REQUIRE(out.q_hat == 0.0);
}

TEST_CASE("invariant violations are rejected at model construction") {
    ParameterSet ps;
    ps.set("x_dp", 3.0);  // x_dp >= x_d
    REQUIRE_THROWS_AS(EquivalentModel(ps), ModelError);
}
