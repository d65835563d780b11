#include "doctest_main.hpp"
#include "lgkin/montecarlo.hpp"
#include "oracles.hpp"

using namespace lgkin;

TEST_CASE("transition sampling stays on the kernel support") {
    Rng256 rng(7, 0);
    for (double hp : {0.0, 0.35, -0.6, 0.9}) {
        double s_sup = 1.0 / (1.0 - std::abs(hp));
        for (int i = 0; i < 20000; ++i) {
            auto [s, h] = sample_transition(hp, rng);
            CHECK(s >= 0.0);
            CHECK(s <= s_sup);
            CHECK(s <= support_edge(h, hp) * (1.0 + 1e-12));
            CHECK(h >= -1.0);
            CHECK(h <= 1.0);
        }
    }
}

TEST_CASE("transition sampling acceptance rate on mild probes") {
    for (double hp : {0.0, 0.3, -0.3, 0.5, -0.5}) {
        Rng256 rng(11, 0);
        std::uint64_t total = 0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            std::uint64_t tries = 0;
            sample_transition(hp, rng, &tries);
            total += tries;
        }
        double rate = static_cast<double>(n) / total;
        CHECK(rate >= 0.3);
        CHECK(rate <= 1.0);
        // expected rate is the area ratio 1/(6/pi^2 * 2 * s_sup)
        double expect = 1.0 / (kQScale * 2.0 / (1.0 - std::abs(hp)));
        CHECK(rate == doctest::Approx(expect).epsilon(0.05));
    }
}

TEST_CASE("impact-parameter marginal matches the transition probability") {
    // chi-square on 32 bins against Pi(.|0.3), 99th percentile of chi2(31)
    const double hp = 0.3;
    const int nbins = 32, N = 1000000;
    Rng256 rng(20260810, 1);
    std::vector<double> counts(nbins, 0.0);
    for (int i = 0; i < N; ++i) {
        auto [s, h] = sample_transition(hp, rng);
        (void)s;
        int b = std::min(nbins - 1, static_cast<int>((h + 1.0) / 2.0 * nbins));
        counts[b] += 1.0;
    }
    double chi2 = 0.0;
    for (int b = 0; b < nbins; ++b) {
        double lo = -1.0 + 2.0 * b / nbins, hi = lo + 2.0 / nbins;
        double p = gauss_integrate_split(
            [&](double h) { return impact_transition(h, hp); }, lo, hi, {0.3, -0.3}, 24);
        double expect = N * p;
        chi2 += (counts[b] - expect) * (counts[b] - expect) / expect;
    }
    CHECK(chi2 < 52.191);  // chi2_{0.99}(31)
}

TEST_CASE("ensemble stepping is deterministic and collision updates use the shared rotation") {
    PhaseGrid g = build_phase_grid(8, 16, 10.0, 12);
    Ensemble a = make_ensemble(5000, 42, {1.0}, g.h);
    Ensemble b = make_ensemble(5000, 42, {1.0}, g.h);
    step_ensemble(a, 3.0);
    step_ensemble(b, 1.0);
    step_ensemble(b, 3.0);  // different schedule, same law per particle
    // identity advance
    Ensemble c = a;
    step_ensemble(c, 3.0);
    for (std::size_t i = 0; i < a.particles.size(); ++i) {
        CHECK(c.particles[i].theta == a.particles[i].theta);
        CHECK(c.particles[i].s == a.particles[i].s);
        CHECK(c.particles[i].h == a.particles[i].h);
    }
    // same seed, one-shot advance: bitwise identical
    Ensemble d = make_ensemble(5000, 42, {1.0}, g.h);
    step_ensemble(d, 3.0);
    for (std::size_t i = 0; i < a.particles.size(); ++i) {
        CHECK(d.particles[i].theta == a.particles[i].theta);
        CHECK(d.particles[i].s == a.particles[i].s);
    }
    // a single hand-built particle scatters by pi - 2 asin(h)
    Ensemble one;
    one.particles.push_back({0.5, 0.2, 0.3});
    one.streams.emplace_back(1, 0);
    step_ensemble(one, 0.25);
    double expected = 0.5 + flight_rotation(0.3);
    expected -= kTwoPi * std::floor(expected / kTwoPi);
    CHECK(one.particles[0].theta == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("long-run impact parameters are symmetric") {
    PhaseGrid g = build_phase_grid(8, 16, 10.0, 12);
    Ensemble e = make_ensemble(50000, 3, {}, g.h);
    step_ensemble(e, 8.0);
    double mean = 0.0;
    for (const auto& p : e.particles) mean += p.h;
    mean /= e.particles.size();
    CHECK(std::abs(mean) < 4.0 / std::sqrt(50000.0) * 0.58);  // 4 sigma of h~U(-1,1)
}

TEST_CASE("anisotropy of the cosine law decays between t=2 and t=20") {
    PhaseGrid g = build_phase_grid(8, 16, 10.0, 12);
    const std::size_t N = 200000;
    Ensemble e = make_ensemble(N, 17, {1.0}, g.h);
    auto mean_cos = [&]() {
        double m = 0.0;
        for (const auto& p : e.particles) m += std::cos(p.theta);
        return m / e.particles.size();
    };
    CHECK(mean_cos() == doctest::Approx(0.5).epsilon(0.02));  // initial law
    step_ensemble(e, 2.0);
    double a2 = std::abs(mean_cos());
    step_ensemble(e, 20.0);
    double a20 = std::abs(mean_cos());
    CHECK(a20 < a2);
    CHECK(a20 < 0.3 * a2 + 3.0 / std::sqrt(double(N)));
}

TEST_CASE("empirical field basics") {
    PhaseGrid g = build_phase_grid(8, 16, 10.0, 12);
    Ensemble one;
    one.particles.push_back({1.0, 0.5, 0.2});
    one.streams.emplace_back(1, 0);
    RealField f = empirical_field(one, g);
    std::size_t nonzero = 0;
    for (double v : f.values)
        if (v != 0.0) ++nonzero;
    CHECK(nonzero == 1);
    CHECK(integrate(f) == doctest::Approx(1.0).epsilon(1e-12));
    Ensemble many = make_ensemble(100000, 5, {1.0}, g.h);
    RealField fm = empirical_field(many, g);
    CHECK(integrate(fm) == doctest::Approx(1.0).epsilon(1e-12));
    Ensemble empty;
    CHECK_THROWS(empirical_field(empty, g));
}

TEST_CASE("equilibrium initial law stays near the equilibrium at t=5") {
    PhaseGrid g = build_phase_grid(8, 20, 12.0, 12);
    const std::size_t N = 200000;
    Ensemble e = make_ensemble(N, 9, {}, g.h);
    step_ensemble(e, 5.0);
    // (s,h) histogram against the stationary density E/(2pi des theta) -> E/2
    std::size_t ns = g.s.size(), nh = g.h.size();
    std::vector<double> counts(ns * nh, 0.0);
    std::size_t used = 0;
    auto cell = [](const std::vector<double>& nodes, double v) {
        std::size_t j = std::upper_bound(nodes.begin(), nodes.end(), v) - nodes.begin();
        if (j == 0) return std::size_t(0);
        if (j >= nodes.size()) return nodes.size() - 1;
        return (v - nodes[j - 1] < nodes[j] - v) ? j - 1 : j;
    };
    for (const auto& p : e.particles) {
        if (p.s > g.s.nodes.back()) continue;
        counts[cell(g.s.nodes, p.s) * nh + cell(g.h.nodes, p.h)] += 1.0;
        ++used;
    }
    double l1 = 0.0, pmass = 0.0;
    for (std::size_t is = 0; is < ns; ++is)
        for (std::size_t ih = 0; ih < nh; ++ih) {
            double p = equilibrium(g.s.nodes[is], g.h.nodes[ih]) * g.s.weights[is] *
                       g.h.weights[ih];
            pmass += p;
            l1 += std::abs(counts[is * nh + ih] / N - p);
        }
    l1 += std::abs(static_cast<double>(N - used) / N - (1.0 - pmass));
    double bound = 3.0 * std::sqrt(static_cast<double>(ns * nh) / N) + 0.05;
    CHECK(l1 <= bound);
}
