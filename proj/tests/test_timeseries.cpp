#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "mgequiv/csv_io.hpp"
#include "mgequiv/parameters.hpp"
#include "mgequiv/timeseries.hpp"
#include "test_support.hpp"

using namespace mgequiv;
using testsupport::TempFile;

namespace {

std::string csv_of(const PccTimeSeries& s) {
    std::ostringstream out;
    out << "t,v,f,p,q\n";
    for (std::size_t k = 0; k < s.size(); ++k)
        out << format_double(s.time_at(k)) << ',' << format_double(s.v_mag[k]) << ','
            << format_double(s.freq[k]) << ',' << format_double(s.p[k]) << ','
            << format_double(s.q[k]) << '\n';
    return out.str();
}

}  // namespace

TEST_CASE("load_pcc_csv reads a minimal well-formed file") {
    TempFile f(".csv");
    f.write("t,v,f,p,q\n0,1,60,5,3\n0.01,1,60,5,3\n");
    const PccTimeSeries s = load_pcc_csv(f.path(), BaseSystem{});
    REQUIRE(s.size() == 2);
    REQUIRE(s.dt == Catch::Approx(0.01));
    REQUIRE(s.t0 == 0.0);
    REQUIRE(s.p[1] == 5.0);
}

TEST_CASE("load_pcc_csv accepts reordered columns and comments") {
    TempFile f(".csv");
    f.write("# units comment\np,q,t,v,f\n5,3,0,1,60\n5,3,0.01,1,60\n");
    const PccTimeSeries s = load_pcc_csv(f.path(), BaseSystem{});
    REQUIRE(s.v_mag[0] == 1.0);
    REQUIRE(s.freq[1] == 60.0);
}

TEST_CASE("load_pcc_csv rejects non-uniform spacing naming the row") {
    TempFile f(".csv");
    f.write("t,v,f,p,q\n0,1,60,5,3\n0.01,1,60,5,3\n0.03,1,60,5,3\n");
    REQUIRE_THROWS_WITH(load_pcc_csv(f.path(), BaseSystem{}),
                        Catch::Matchers::ContainsSubstring("row 3"));
}

TEST_CASE("load_pcc_csv error paths") {
    SECTION("missing column") {
        TempFile f(".csv");
        f.write("t,v,f,p\n0,1,60,5\n0.01,1,60,5\n");
        REQUIRE_THROWS_WITH(load_pcc_csv(f.path(), BaseSystem{}),
                            Catch::Matchers::ContainsSubstring("'q'"));
    }
    SECTION("unparseable cell is located") {
        TempFile f(".csv");
        f.write("t,v,f,p,q\n0,1,60,5,3\n0.01,oops,60,5,3\n");
        REQUIRE_THROWS_WITH(load_pcc_csv(f.path(), BaseSystem{}),
                            Catch::Matchers::ContainsSubstring("row 2") &&
                                Catch::Matchers::ContainsSubstring("'v'"));
    }
    SECTION("fewer than 2 rows") {
        TempFile f(".csv");
        f.write("t,v,f,p,q\n0,1,60,5,3\n");
        REQUIRE_THROWS_AS(load_pcc_csv(f.path(), BaseSystem{}), ParseError);
    }
}

TEST_CASE("a 10 ms file over 9-14 s loads 501 samples") {
    PccTimeSeries ref = testsupport::constant_series(9.0, 0.01, 501, 1.0, 60.0, 5.0, 3.0);
    TempFile f(".csv");
    f.write(csv_of(ref));
    const PccTimeSeries s = load_pcc_csv(f.path(), BaseSystem{});
    REQUIRE(s.size() == 501);
    REQUIRE(s.t0 == 9.0);
}

TEST_CASE("pcc csv save/load round-trip is bit exact") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    PccTimeSeries s;
    s.t0 = 1.25;
    s.dt = 0.01;
    for (int k = 0; k < 64; ++k) {
        s.v_mag.push_back(1.0 + 0.05 * u(rng));
        s.freq.push_back(60.0 + 0.1 * u(rng));
        s.p.push_back(u(rng));
        s.q.push_back(u(rng));
    }
    TempFile f(".csv");
    save_pcc_csv(s, f.path());
    const PccTimeSeries back = load_pcc_csv(f.path(), BaseSystem{});
    REQUIRE(back.size() == s.size());
    REQUIRE(back.dt == s.dt);
    for (std::size_t k = 0; k < s.size(); ++k) {
        REQUIRE(back.v_mag[k] == s.v_mag[k]);
        REQUIRE(back.freq[k] == s.freq[k]);
        REQUIRE(back.p[k] == s.p[k]);
        REQUIRE(back.q[k] == s.q[k]);
    }
}

TEST_CASE("preprocess with identity config is a no-op for any series") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        PccTimeSeries s;
        s.t0 = u(rng);
        s.dt = 0.005 + 0.02 * u(rng);
        const int n = 2 + static_cast<int>(u(rng) * 50);
        for (int k = 0; k < n; ++k) {
            s.v_mag.push_back(0.9 + 0.2 * u(rng));
            s.freq.push_back(59.0 + 2.0 * u(rng));
            s.p.push_back(-5.0 + 10.0 * u(rng));
            s.q.push_back(-5.0 + 10.0 * u(rng));
        }
        const PccTimeSeries out = preprocess(s, PreprocessConfig{});
        REQUIRE(out.t0 == s.t0);
        REQUIRE(out.dt == s.dt);
        REQUIRE(out.v_mag == s.v_mag);
        REQUIRE(out.freq == s.freq);
        REQUIRE(out.p == s.p);
        REQUIRE(out.q == s.q);
    }
}

TEST_CASE("low-pass preserves constants to 1e-12") {
    PccTimeSeries s = testsupport::constant_series(0.0, 0.01, 400, 0.97, 59.5, 4.2, -1.3);
    PreprocessConfig cfg;
    cfg.cutoff_hz = 3.0;
    const PccTimeSeries out = preprocess(s, cfg);
    for (std::size_t k = 0; k < out.size(); ++k) {
        REQUIRE(out.v_mag[k] == Catch::Approx(0.97).margin(1e-12));
        REQUIRE(out.p[k] == Catch::Approx(4.2).margin(1e-12));
    }
}

TEST_CASE("low-pass step response matches an independent recursive filter") {
    // oracle: difference equation of the bilinear-discretized RC filter,
    // evaluated directly sample by sample
    const double dt = 0.01, cutoff = 5.0;
    PccTimeSeries s = testsupport::constant_series(0.0, dt, 50, 1.0, 60.0, 0.0, 0.0);
    for (std::size_t k = 10; k < s.size(); ++k) s.p[k] = 1.0;  // unit step at sample 10

    PreprocessConfig cfg;
    cfg.cutoff_hz = cutoff;
    const PccTimeSeries out = preprocess(s, cfg);

    const double wd = std::tan(M_PI * cutoff * dt);
    std::vector<double> y(s.size(), 0.0);
    y[0] = s.p[0];
    for (std::size_t k = 1; k < s.size(); ++k)
        y[k] = (wd * (s.p[k] + s.p[k - 1]) + (1.0 - wd) * y[k - 1]) / (1.0 + wd);

    for (std::size_t k = 0; k < s.size(); ++k)
        REQUIRE(out.p[k] == Catch::Approx(y[k]).margin(1e-13));
    // one sample after the step the output must have moved but not settled
    REQUIRE(out.p[11] > 0.1);
    REQUIRE(out.p[11] < 0.9);
}

TEST_CASE("decimation keeps every factor-th sample and rejects misfits") {
    PccTimeSeries s = testsupport::constant_series(2.0, 0.01, 11, 1.0, 60.0, 0.0, 0.0);
    for (std::size_t k = 0; k < s.size(); ++k) s.p[k] = static_cast<double>(k);

    PreprocessConfig cfg;
    cfg.resample_dt = 0.02;
    const PccTimeSeries out = preprocess(s, cfg);
    REQUIRE(out.size() == 6);
    REQUIRE(out.dt == Catch::Approx(0.02));
    REQUIRE(out.p[1] == 2.0);
    REQUIRE(out.p[5] == 10.0);

    cfg.resample_dt = 0.025;
    REQUIRE_THROWS_AS(preprocess(s, cfg), ConfigError);
    cfg.resample_dt = 0.005;
    REQUIRE_THROWS_AS(preprocess(s, cfg), ConfigError);
}

TEST_CASE("extract_window sample counts match the stated spans") {
    PccTimeSeries s = testsupport::constant_series(9.0, 0.01, 501, 1.0, 60.0, 5.0, 3.0);
    SECTION("full span is the identity") {
        const PccTimeSeries out = extract_window(s, Window{9.0, 14.0});
        REQUIRE(out.size() == 501);
        REQUIRE(out.t0 == s.t0);
        REQUIRE(out.p == s.p);
    }
    SECTION("9-9.99 holds 100 samples") {
        REQUIRE(extract_window(s, Window{9.0, 9.99}).size() == 100);
    }
    SECTION("10-14 holds 401 samples") {
        const PccTimeSeries out = extract_window(s, Window{10.0, 14.0});
        REQUIRE(out.size() == 401);
        REQUIRE(out.t0 == Catch::Approx(10.0));
    }
    SECTION("a window outside the span fails") {
        REQUIRE_THROWS_AS(extract_window(s, Window{14.5, 15.0}), ConfigError);
    }
}

TEST_CASE("adjacent windows partition the sample set") {
    PccTimeSeries s = testsupport::constant_series(0.0, 0.02, 200, 1.0, 60.0, 0.0, 0.0);
    for (std::size_t k = 0; k < s.size(); ++k) s.p[k] = static_cast<double>(k);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t cut = 2 + rng() % (s.size() - 4);
        // split strictly between samples so neither window grabs both sides
        const double mid = s.time_at(cut) - 0.5 * s.dt;
        const PccTimeSeries a = extract_window(s, Window{s.t0, mid});
        const PccTimeSeries b = extract_window(s, Window{mid, s.t_end()});
        REQUIRE(a.size() + b.size() == s.size());
        REQUIRE(a.p.back() + 1.0 == b.p.front());
    }
}

TEST_CASE("parameter file echoes reference values") {
    TempFile f(".params");
    f.write("# reference subset\nx_d = 2.633\nH = 3.108\nK_a = 177.995\n");
    const ParameterSet ps = load_parameter_set(f.path());
    REQUIRE(ps.get("x_d") == 2.633);
    REQUIRE(ps.get("H") == 3.108);
    REQUIRE(ps.get("K_a") == 177.995);
}

TEST_CASE("empty parameter file yields defaults that round-trip unchanged") {
    TempFile f(".params");
    f.write("");
    const ParameterSet ps = load_parameter_set(f.path());
    REQUIRE(ps.get("x_d") == 2.633);
    REQUIRE(ps.get("S_vsc") == 3.027);

    TempFile f2(".params");
    save_parameter_set(ps, f2.path());
    const ParameterSet back = load_parameter_set(f2.path());
    for (std::size_t i = 0; i < ps.all().size(); ++i) {
        REQUIRE(back.all()[i].name == ps.all()[i].name);
        REQUIRE(back.all()[i].value == ps.all()[i].value);
    }
}

TEST_CASE("parameter file rejects physical-bound violations naming the key") {
    TempFile f(".params");
    f.write("H = -1\n");
    REQUIRE_THROWS_WITH(load_parameter_set(f.path()),
                        Catch::Matchers::ContainsSubstring("H"));
}

TEST_CASE("parameter file rejects unknown keys") {
    TempFile f(".params");
    f.write("x_dd = 1.0\n");
    REQUIRE_THROWS_WITH(load_parameter_set(f.path()),
                        Catch::Matchers::ContainsSubstring("x_dd"));
}

TEST_CASE("parameter save/load round-trip is bit exact for randomized values") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ParameterSet ps;
    for (auto& p : ps.all())
        p.value = p.value * (0.9 + 0.2 * u(rng));
    TempFile f(".params");
    save_parameter_set(ps, f.path());
    const ParameterSet back = load_parameter_set(f.path());
    for (std::size_t i = 0; i < ps.all().size(); ++i)
        REQUIRE(back.all()[i].value == ps.all()[i].value);
}
