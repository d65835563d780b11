#include "doctest_main.hpp"
#include "lgkin/iterated.hpp"
#include "oracles.hpp"

using namespace lgkin;

namespace {
struct Tables {
    KernelTable q1, q2, q3;
    EnTable e1, e2, e3;
    RenewalWeights W;
};
const Tables& tables() {
    static Tables* t = [] {
        auto* tt = new Tables;
        tt->q1 = base_kernel_table(32, 0.025, 24.0);
        tt->W = build_renewal_weights(tt->q1.h, tt->q1.dt, tt->q1.nt, HInterp::Lagrange);
        tt->q2 = pair_kernel_table(tt->q1);
        tt->q3 = convolve_next(tt->q2, tt->W);
        tt->e1 = base_equilibrium_table(tt->q1);
        tt->e2 = next_equilibrium_table(tt->e1, tt->q1, &tt->W);
        tt->e3 = next_equilibrium_table(tt->e2, tt->q2);
        return tt;
    }();
    return *t;
}
}  // namespace

TEST_CASE("pair kernel obeys the constant-branch law at small times") {
    const auto& T = tables();
    std::size_t nh = T.q2.h.size();
    // Q^(2)(t,.|.) = 72 t / pi^4 for t <= 1/2, and Q^(n)(0,.|.) = 0
    for (std::size_t a = 0; a < nh; ++a)
        for (std::size_t b = 0; b < nh; ++b) {
            CHECK(T.q2.at(0, a, b) == 0.0);
            CHECK(T.q3.at(0, a, b) == 0.0);
        }
    for (std::size_t n = 1; n * T.q2.dt <= 0.5 + 1e-12; ++n) {
        double expect = 72.0 * (n * T.q2.dt) / std::pow(kPi, 4);
        for (std::size_t a = 0; a < nh; a += 3)
            for (std::size_t b = 0; b < nh; b += 3)
                CHECK(T.q2.at(n, a, b) == doctest::Approx(expect).epsilon(1e-4));
    }
    CHECK(pair_kernel_point(0.5, 0.3, -0.4) ==
          doctest::Approx(36.0 / std::pow(kPi, 4)).epsilon(1e-10));
}

TEST_CASE("pair kernel against independent Simpson oracle") {
    // one generic probe, everything brute force
    double t = 1.1, h = 0.35, b = -0.2;
    double acc = 0.0;
    int n = 2000;
    for (int j = 0; j <= n; ++j) {
        double mid = -1.0 + 2.0 * j / n;
        double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        acc += w * oracle::pair_time_integral_bruteforce(t, h, mid, b, 4000);
    }
    acc *= (2.0 / n) / 3.0;
    CHECK(pair_kernel_point(t, h, b) == doctest::Approx(acc).epsilon(2e-6));
}

TEST_CASE("iterated kernel normalizations with tail accounting") {
    const auto& T = tables();
    std::size_t nh = T.q1.h.size();
    for (std::size_t b = 0; b < nh; b += 3) {
        CHECK(table_mass(T.q2, b) + T.e2.at(T.e2.nt, b) == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(table_mass(T.q3, b) + T.e3.at(T.e3.nt, b) == doctest::Approx(1.0).epsilon(1e-3));
    }
    CHECK(table_mass(T.e2) + tail_mass_E2(24.0) == doctest::Approx(2.0).epsilon(5e-4));
    CHECK(table_mass(T.e3) + tail_mass_E3(24.0, T.e2) == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("iterated kernel symmetries") {
    const auto& T = tables();
    std::size_t nh = T.q1.h.size();
    double asym2 = 0.0, asym3 = 0.0, neg3 = 0.0;
    for (std::size_t n = 0; n <= T.q2.nt; n += 40)
        for (std::size_t a = 0; a < nh; ++a)
            for (std::size_t b = 0; b < nh; ++b) {
                asym2 = std::max(asym2, std::abs(T.q2.at(n, a, b) - T.q2.at(n, b, a)));
                asym3 = std::max(asym3, std::abs(T.q3.at(n, a, b) - T.q3.at(n, b, a)));
                neg3 = std::max(neg3, std::abs(T.q3.at(n, a, b) -
                                               T.q3.at(n, nh - 1 - a, nh - 1 - b)));
            }
    CHECK(asym2 == 0.0);  // symmetric by construction
    CHECK(asym3 < 1e-3);
    CHECK(neg3 < 1e-3);
}

TEST_CASE("equilibrium hierarchy") {
    const auto& T = tables();
    std::size_t nh = T.e1.h.size();
    CHECK(T.e2.order == 2);
    CHECK(T.e3.order == 3);
    double bound = 0.0;
    for (std::size_t n = 0; n <= T.e1.nt; n += 5)
        for (std::size_t a = 0; a < nh; ++a) {
            // base case matches the pointwise evaluator exactly
            if (n % 40 == 0)
                CHECK(T.e1.at(n, a) == equilibrium(n * T.e1.dt, T.e1.h.nodes[a]));
            // monotone in the order, bounded by one, even in h
            CHECK(T.e2.at(n, a) >= T.e1.at(n, a) - 1e-12);
            CHECK(T.e3.at(n, a) >= T.e2.at(n, a) - 1e-12);
            CHECK(T.e3.at(n, a) <= 1.0 + 1e-9);
            CHECK(std::abs(T.e2.at(n, a) - T.e2.at(n, nh - 1 - a)) < 1e-9);
            bound = std::max(bound, (n * T.e1.dt + 1.0) * T.e3.at(n, a));
        }
    CHECK(bound < 12.0);  // (s+1) E^(n) bounded on the grid
    // tail mass decays like 1/s empirically
    double r = tail_mass_E2(10.0) / tail_mass_E2(20.0);
    CHECK(r > 1.5);
    CHECK(r < 2.6);
}

TEST_CASE("pointwise second equilibrium matches the table route") {
    const auto& T = tables();
    for (std::size_t n : {std::size_t(20), std::size_t(200), std::size_t(600)})
        for (std::size_t a = 3; a < T.e2.h.size(); a += 9)
            CHECK(equilibrium2_point(n * T.e2.dt, T.e2.h.nodes[a]) ==
                  doctest::Approx(T.e2.at(n, a)).epsilon(2e-3));
}

TEST_CASE("angular kernel theta-marginal equals the pair kernel") {
    const auto& T = tables();
    double err = f_marginal_error(T.q2, 512);
    CHECK(err < 1e-3);
    // order consistency: refining the theta rule does not increase the error
    CHECK(f_marginal_error(T.q2, 64) >= err * 0.5 - 1e-12);
    CHECK(err <= f_marginal_error(T.q2, 64) + 1e-9);
}
