#include "doctest_main.hpp"
#include "lgkin/grid.hpp"
#include "oracles.hpp"

#include <cstdio>

using namespace lgkin;

TEST_CASE("phase grid construction") {
    PhaseGrid g = build_phase_grid(8, 16, 10.0, 8);
    CHECK(g.size() == 1024);
    for (double h : g.h.nodes) {
        CHECK(h > -1.0);
        CHECK(h < 1.0);
    }
    CHECK(g.s.nodes.front() == 0.0);
    CHECK(g.s.nodes.back() == doctest::Approx(10.0));
    for (std::size_t i = 1; i < g.s.size(); ++i) CHECK(g.s.nodes[i] > g.s.nodes[i - 1]);
    CHECK_THROWS(build_phase_grid(5, 16, 10.0, 8));   // odd theta count
    CHECK_THROWS(build_phase_grid(8, 16, 0.5, 8));    // s_max <= 1
    CHECK_THROWS(build_phase_grid(8, 1, 10.0, 8));    // too few s nodes
}

TEST_CASE("integrate basics") {
    PhaseGrid g = build_phase_grid(8, 24, 10.0, 12);
    RealField zero(g);
    CHECK(integrate(zero) == 0.0);
    RealField one(g);
    for (auto& v : one.values) v = 1.0;
    CHECK(integrate(one) == doctest::Approx(kTwoPi * 10.0 * 2.0).epsilon(1e-12));
    // linearity to machine precision
    oracle::Rng rng(17);
    RealField f(g), h(g);
    for (auto& v : f.values) v = rng.uniform(-1.0, 1.0);
    for (auto& v : h.values) v = rng.uniform(-1.0, 1.0);
    double a = 1.7, b = -0.4;
    RealField comb(g);
    for (std::size_t i = 0; i < comb.values.size(); ++i)
        comb.values[i] = a * f.values[i] + b * h.values[i];
    CHECK(integrate(comb) ==
          doctest::Approx(a * integrate(f) + b * integrate(h)).epsilon(1e-12));
}

TEST_CASE("equilibrium field integrates to one with tail accounting") {
    PhaseGrid g = build_phase_grid(8, 32, 20.0, 16);
    RealField f(g);
    for (std::size_t i = 0; i < g.theta.size(); ++i)
        for (std::size_t is = 0; is < g.s.size(); ++is)
            for (std::size_t ih = 0; ih < g.h.size(); ++ih)
                f.at(i, is, ih) = equilibrium(g.s.nodes[is], g.h.nodes[ih]) / kTwoPi;
    double m = integrate(f) + tail_estimate(20.0);
    CHECK(m == doctest::Approx(1.0).epsilon(0.02));
    CHECK(lp_norm(f, 1) + tail_estimate(20.0) == doctest::Approx(1.0).epsilon(0.02));
    // doubling every axis improves the defect
    PhaseGrid g2 = build_phase_grid(16, 64, 20.0, 32);
    RealField f2(g2);
    for (std::size_t i = 0; i < g2.theta.size(); ++i)
        for (std::size_t is = 0; is < g2.s.size(); ++is)
            for (std::size_t ih = 0; ih < g2.h.size(); ++ih)
                f2.at(i, is, ih) = equilibrium(g2.s.nodes[is], g2.h.nodes[ih]) / kTwoPi;
    double m2 = integrate(f2) + tail_estimate(20.0);
    CHECK(std::abs(m2 - 1.0) < std::abs(m - 1.0));
}

TEST_CASE("lp norms") {
    PhaseGrid g = build_phase_grid(8, 16, 5.0, 8);
    RealField zero(g);
    CHECK(lp_norm(zero, 1) == 0.0);
    CHECK(lp_norm(zero, 2) == 0.0);
    CHECK(lp_norm(zero, 0) == 0.0);
    RealField c(g);
    for (auto& v : c.values) v = -2.5;
    CHECK(lp_norm(c, 0) == 2.5);
    // triangle inequality on random pairs
    oracle::Rng rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        RealField f(g), h(g), sum(g);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            f.values[i] = rng.uniform(-1.0, 1.0);
            h.values[i] = rng.uniform(-1.0, 1.0);
            sum.values[i] = f.values[i] + h.values[i];
        }
        for (int p : {1, 2, 0})
            CHECK(lp_norm(sum, p) <= lp_norm(f, p) + lp_norm(h, p) + 1e-12);
    }
}

TEST_CASE("tail estimate properties") {
    double t5 = tail_estimate(5.0), t10 = tail_estimate(10.0), t20 = tail_estimate(20.0);
    CHECK(t5 > t10);
    CHECK(t10 > t20);
    CHECK(t20 > 0.0);
    // measured constant: (s+1) * tail is bounded; tail(10) <= C/11
    double c = 0.0;
    for (double s : {2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 40.0})
        c = std::max(c, (s + 1.0) * tail_estimate(s));
    CHECK(t10 <= c / 11.0 * 1.0001);
    // beyond the support of every |h| <= 1 - 1/s_cut the restricted mass is 0
    double s_cut = 8.0;
    for (double h : {0.0, 0.5, 1.0 - 1.0 / s_cut})
        CHECK(equilibrium(s_cut + 1e-9, h) == 0.0);
}

TEST_CASE("trigonometric shift is exact for band-limited data") {
    oracle::Rng rng(31);
    for (std::size_t n : {std::size_t(8), std::size_t(16)}) {
        // random trig polynomial up to mode n/2 - 1
        std::vector<double> a(n / 2, 0.0), b(n / 2, 0.0);
        for (auto& v : a) v = rng.uniform(-1.0, 1.0);
        for (auto& v : b) v = rng.uniform(-1.0, 1.0);
        auto eval = [&](double th) {
            double v = a[0];
            for (std::size_t m = 1; m < n / 2; ++m)
                v += a[m] * std::cos(m * th) + b[m] * std::sin(m * th);
            return v;
        };
        std::vector<double> nodal(n);
        for (std::size_t i = 0; i < n; ++i) nodal[i] = eval(kTwoPi * i / n);
        double delta = rng.uniform(0.0, kTwoPi);
        auto S = trig_shift_matrix(n, delta);
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v += S[i * n + j] * nodal[j];
            CHECK(v == doctest::Approx(eval(kTwoPi * i / n + delta)).epsilon(1e-12));
            double th = rng.uniform(0.0, kTwoPi);
            CHECK(trig_interp(nodal, th) == doctest::Approx(eval(th)).epsilon(1e-12));
        }
        // rows resolve constants exactly
        for (std::size_t i = 0; i < n; ++i) {
            double rs = 0.0;
            for (std::size_t j = 0; j < n; ++j) rs += S[i * n + j];
            CHECK(rs == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("field serialization round trip") {
    PhaseGrid g = build_phase_grid(4, 6, 5.0, 4);
    ComplexField f(g);
    oracle::Rng rng(41);
    for (auto& v : f.values) v = std::complex<double>(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    std::string path = "/tmp/lgkin_test_field.bin";
    write_field_bin(path, f);
    LoadedField back = read_field_bin(path);
    REQUIRE(back.complex_valued);
    REQUIRE(back.values.size() == f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(back.values[i] == f.values[i]);
    for (std::size_t i = 0; i < g.s.size(); ++i) {
        CHECK(back.grid.s.nodes[i] == g.s.nodes[i]);
        CHECK(back.grid.s.weights[i] == g.s.weights[i]);
    }
    // csv writes atomically with the documented header
    std::string csv = "/tmp/lgkin_test_field.csv";
    write_field_csv(csv, f);
    std::FILE* fp = std::fopen(csv.c_str(), "r");
    REQUIRE(fp != nullptr);
    char line[64];
    REQUIRE(std::fgets(line, sizeof line, fp) != nullptr);
    CHECK(std::string(line) == "theta,s,h,re,im\n");
    std::fclose(fp);
}
