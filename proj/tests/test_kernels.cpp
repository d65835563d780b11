#include "doctest_main.hpp"
#include "lgkin/kernels.hpp"
#include "lgkin/quadrature.hpp"
#include "oracles.hpp"

using namespace lgkin;

TEST_CASE("collision kernel printed values") {
    // first branch: 0.5 <= 1/(1+0.3)
    CHECK(collision_kernel(0.5, 0.3, 0.1) == doctest::Approx(kQScale).epsilon(1e-14));
    // negative times are outside the support
    CHECK(collision_kernel(-0.1, 0.3, 0.1) == 0.0);
    CHECK(collision_kernel(-0.1, -0.8, 0.9) == 0.0);
    // middle branch at (0.9, 0.5, 0.0)
    CHECK(collision_kernel(0.9, 0.5, 0.0) ==
          doctest::Approx(kQScale * ((1.0 / 0.9) - 1.0) / 0.5).epsilon(1e-14));
    CHECK(collision_kernel(0.9, 0.5, 0.0) == doctest::Approx(0.135095).epsilon(1e-5));
    // past the support edge
    CHECK(collision_kernel(2.1, 0.5, 0.0) == 0.0);
}

TEST_CASE("collision kernel symmetries are bit-identical") {
    oracle::Rng rng(42);
    for (int i = 0; i < 10000; ++i) {
        double s = rng.uniform(0.0, 3.0);
        double h = rng.uniform(-1.0, 1.0);
        double hp = rng.uniform(-1.0, 1.0);
        double q = collision_kernel(s, h, hp);
        CHECK(q == collision_kernel(s, hp, h));
        CHECK(q == collision_kernel(s, -h, -hp));
        CHECK(q >= 0.0);
        CHECK(q <= kQScale);
    }
}

TEST_CASE("cumulative kernel moments match direct quadrature") {
    oracle::Rng rng(7);
    for (int i = 0; i < 40; ++i) {
        double h = rng.uniform(-0.95, 0.95), hp = rng.uniform(-0.95, 0.95);
        double s = rng.uniform(0.05, 2.5);
        double q0 = gauss_integrate_split(
            [&](double u) { return collision_kernel(u, h, hp); }, 0.0, s,
            {1.0 / (1.0 + std::max(std::abs(h), std::abs(hp))), support_edge(h, hp)}, 32);
        double q1 = gauss_integrate_split(
            [&](double u) { return u * collision_kernel(u, h, hp); }, 0.0, s,
            {1.0 / (1.0 + std::max(std::abs(h), std::abs(hp))), support_edge(h, hp)}, 32);
        CHECK(collision_kernel_cum(s, h, hp) == doctest::Approx(q0).epsilon(1e-11));
        CHECK(collision_kernel_cum1(s, h, hp) == doctest::Approx(q1).epsilon(1e-11));
    }
}

TEST_CASE("kernel normalization for 32 Gauss probes") {
    const GaussRule& g = gauss_rule(32);
    for (int i = 0; i < 32; ++i) {
        double hp = g.x[i];
        // int_0^inf int_-1^1 Q(s,h|hp) dh ds = int dh Pi(h,hp), log-endpoint aware
        std::vector<double> cuts{std::abs(hp), -std::abs(hp), 0.0};
        for (int j = 1; j <= 44; ++j) {  // dyadic refinement into the log endpoints
            double d = std::ldexp(1.0, -j);
            cuts.push_back(1.0 - d);
            cuts.push_back(d - 1.0);
        }
        double v = gauss_integrate_split(
            [&](double h) { return impact_transition(h, hp); }, -1.0, 1.0, cuts, 12);
        CHECK(v == doctest::Approx(1.0).epsilon(2e-7));
    }
}

TEST_CASE("kernel decay bound") {
    double c = measured_sup_sQ();
    CHECK(c <= 18.0 / (kPi * kPi));  // asserted bound
    // exact maximization gives 12/pi^2, attained near h=h'=0, s->1
    CHECK(c == doctest::Approx(12.0 / (kPi * kPi)).epsilon(2e-2));
}

TEST_CASE("impact transition values") {
    CHECK(impact_transition(0.5, 0.1) ==
          doctest::Approx(kQScale * (std::log(1.5) - std::log(1.1)) / 0.4).epsilon(1e-14));
    CHECK(impact_transition(0.5, 0.1) == doctest::Approx(0.471379).epsilon(1e-5));
    // diagonal limit; the printed formula lives on the cone |h'| <= h, so the
    // limit along the diagonal is (6/pi^2)/(1+|h|) after symmetry reduction
    for (double h : {-0.7, 0.0, 0.4, 0.99})
        CHECK(impact_transition(h, h) ==
              doctest::Approx(kQScale / (1.0 + std::abs(h))).epsilon(1e-12));
    // corner singularities
    CHECK(std::isinf(impact_transition(1.0, -1.0)));
    CHECK(std::isinf(impact_transition(-1.0, 1.0)));
    // symmetry + positivity + normalization in h' at a probe
    oracle::Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0);
        double p = impact_transition(a, b);
        CHECK(p == impact_transition(b, a));
        CHECK(p == impact_transition(-a, -b));
        CHECK(p > 0.0);
    }
}

TEST_CASE("impact transition logarithmic bound") {
    // Pi(h|h') <= (6/pi^2) max{1/eps, (log2 - log(1-|h|))/(2(1-eps))}, eps=0.1
    const double eps = 0.1;
    for (int i = 0; i <= 80; ++i) {
        double h = -0.9995 + 1.999 * i / 80.0;
        for (int j = 0; j <= 80; ++j) {
            double hp = -0.9995 + 1.999 * j / 80.0;
            double bound = kQScale * std::max(1.0 / eps, (std::log(2.0) - std::log1p(-std::abs(h))) /
                                                             (2.0 * (1.0 - eps)));
            CHECK(impact_transition(h, hp) <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("equilibrium density values and support") {
    for (double h : {-0.9, -0.3, 0.0, 0.5, 0.99}) CHECK(equilibrium(0.0, h) == 1.0);
    CHECK(equilibrium(2.0, 0.0) == 0.0);
    CHECK(equilibrium(0.25, 0.3) == doctest::Approx(1.0 - 3.0 / (kPi * kPi)).epsilon(1e-13));
    // brute-force 2D quadrature of the defining double integral
    CHECK(equilibrium(0.25, 0.3) ==
          doctest::Approx(oracle::equilibrium_bruteforce(0.25, 0.3)).epsilon(2e-6));
    CHECK(equilibrium(1.2, 0.4) ==
          doctest::Approx(oracle::equilibrium_bruteforce(1.2, 0.4)).epsilon(2e-5));
    // support: E > 0 iff s < 1/(1-|h|), and E is even in h
    oracle::Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        double h = rng.uniform(-0.999, 0.999);
        double s = rng.uniform(0.0, 6.0);
        double e = equilibrium(s, h);
        CHECK(e == equilibrium(s, -h));
        if (s * (1.0 - std::abs(h)) >= 1.0)
            CHECK(e == 0.0);
        else
            CHECK(e > 0.0);
        CHECK(e <= 1.0);
    }
}

TEST_CASE("equilibrium decay constant is finite and reported") {
    double c = measured_sup_sE();
    CHECK(c > 0.0);
    CHECK(c < 5.0);  // bounded on the scan
}

TEST_CASE("equilibrium tail mass") {
    // non-increasing, consistent with the h-marginal quadrature
    double t10 = equilibrium_tail_mass(10.0);
    double t20 = equilibrium_tail_mass(20.0);
    double t40 = equilibrium_tail_mass(40.0);
    CHECK(t10 > t20);
    CHECK(t20 > t40);
    CHECK(t40 > 0.0);
    // tail ~ 1/(pi^2 s): sanity window
    CHECK(t20 == doctest::Approx(1.0 / (kPi * kPi * 20.0)).epsilon(0.5));
    // int_0^inf int E = 1: mass up to 10 plus tail
    std::vector<double> cuts{0.5, 1.0, 2.0, 4.0, 8.0};
    double mass10 = gauss_integrate_split([](double s) { return equilibrium_h_marginal(s); }, 0.0,
                                          10.0, cuts, 16);
    CHECK(mass10 + t10 == doctest::Approx(1.0).epsilon(2e-6));
}

TEST_CASE("intermediate impact parameter window") {
    for (double hp : {-0.8, 0.0, 0.35, 1.0}) {
        double wl = turning_window_left(hp);
        // window center: h'' = 0
        CHECK(intermediate_impact(2.0 * std::asin(hp) - kTwoPi, hp) ==
              doctest::Approx(0.0).epsilon(1e-14));
        // left edge: h'' = -1
        CHECK(intermediate_impact(wl, hp) == doctest::Approx(-1.0).epsilon(1e-14));
        // outside the window the indicator vanishes
        CHECK(intermediate_impact(2.0 * std::asin(hp), hp) == 0.0);
        CHECK(intermediate_impact(wl - 0.3, hp) == 0.0);
        // slope = sqrt(1-h''^2)/2 inside
        for (double frac : {0.1, 0.5, 0.9}) {
            double th = wl + frac * kTwoPi;
            double hpp = intermediate_impact(th, hp);
            CHECK(intermediate_impact_slope(th, hp) ==
                  doctest::Approx(0.5 * std::sqrt(1.0 - hpp * hpp)).epsilon(1e-12));
        }
    }
}

TEST_CASE("window reduction") {
    CHECK(to_turning_window(0.0, 0.0) == doctest::Approx(-kTwoPi));
    CHECK(to_turning_window(-kTwoPi, 0.0) == doctest::Approx(-kTwoPi));
    CHECK(to_turning_window(5.0 * kPi, 1.0) == doctest::Approx(-kPi));
    // exactly one l in {-3..3} lands inside; brute scan agrees
    oracle::Rng rng(5);
    for (int i = 0; i < 300; ++i) {
        double hp = rng.uniform(-1.0, 1.0), dth = rng.uniform(-15.0, 15.0);
        double wl = turning_window_left(hp);
        int hits = 0;
        double found = 0.0;
        for (int l = -4; l <= 4; ++l) {
            double cand = dth + kTwoPi * l;
            if (cand >= wl && cand < wl + kTwoPi) {
                ++hits;
                found = cand;
            }
        }
        CHECK(hits == 1);
        CHECK(to_turning_window(dth, hp) == doctest::Approx(found).epsilon(1e-12));
    }
}

TEST_CASE("scatter angle and velocity") {
    CHECK(flight_rotation(0.0) == doctest::Approx(kPi));
    CHECK(flight_rotation(1.0) == doctest::Approx(0.0));
    CHECK(flight_rotation(-1.0) == doctest::Approx(kTwoPi));
    CHECK(direction(0.0).x == 1.0);
    CHECK(direction(0.0).y == 0.0);
    CHECK(direction(0.5 * kPi).y == doctest::Approx(1.0));
    oracle::Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        double th = rng.uniform(0.0, kTwoPi);
        CHECK(direction(th).norm() == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("angular pair kernel values") {
    // empty time integral
    CHECK(angular_pair_kernel(1.0, 0.0, 0.3, 0.2) == 0.0);
    // constant-branch regime, h'' = 0: f = (1/2)(6/pi^2)^2 t
    double hp = 0.2;
    double theta0 = 2.0 * std::asin(hp) - kTwoPi;  // h'' = 0
    CHECK(angular_pair_kernel(theta0, 0.25, 0.1, hp) ==
          doctest::Approx(0.5 * 36.0 / std::pow(kPi, 4) * 0.25).epsilon(1e-12));
    CHECK(angular_pair_kernel(theta0, 0.25, 0.1, hp) == doctest::Approx(0.046197).epsilon(1e-4));
    // brute-force Simpson of the time integral agrees at a generic point
    double th = theta0 + 1.13;
    double mid = intermediate_impact(to_turning_window(th, hp), hp);
    double slope = intermediate_impact_slope(to_turning_window(th, hp), hp);
    CHECK(angular_pair_kernel(th, 1.7, 0.45, hp) ==
          doctest::Approx(slope * oracle::pair_time_integral_bruteforce(1.7, 0.45, mid, hp))
              .epsilon(2e-7));
    // nonnegative and bounded by C/(t+1)
    double cf = measured_sup_tf();
    CHECK(cf > 0.0);
    CHECK(cf < 3.0);
}

TEST_CASE("mode pair kernel") {
    Vec2 k{1.0, 0.0};
    CHECK(std::abs(mode_pair_kernel(k, 0.7, 0.0, 0.3, 0.1, 0.2)) == 0.0);
    CHECK_THROWS(mode_pair_kernel({0.0, 0.0}, 0.7, 1.0, 0.3, 0.1, 0.2));
    // |g^k| <= f(theta - theta') on random tuples
    oracle::Rng rng(13);
    for (int i = 0; i < 2000; ++i) {
        Vec2 kk{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
        if (kk.norm() < 1e-3) kk.x += 1.0;
        double th = rng.uniform(0.0, kTwoPi), tp = rng.uniform(0.0, kTwoPi);
        double t = rng.uniform(0.0, 4.0);
        double h = rng.uniform(-0.99, 0.99), hp = rng.uniform(-0.99, 0.99);
        double g = std::abs(mode_pair_kernel(kk, th, t, h, tp, hp));
        double f = angular_pair_kernel(th - tp, t, h, hp);
        CHECK(g <= f * (1.0 + 1e-9) + 1e-12);
    }
    // k -> 0 limit recovers f
    for (int i = 0; i < 50; ++i) {
        oracle::Rng r2(100 + i);
        double th = r2.uniform(0.0, kTwoPi), tp = r2.uniform(0.0, kTwoPi);
        double t = r2.uniform(0.1, 3.0);
        double h = r2.uniform(-0.9, 0.9), hp = r2.uniform(-0.9, 0.9);
        std::complex<double> g = mode_pair_kernel({1e-6, 0.0}, th, t, h, tp, hp);
        double f = angular_pair_kernel(th - tp, t, h, hp);
        CHECK(std::abs(g - f) <= 1e-4 * (1.0 + f));
    }
}

TEST_CASE("angular pair kernel normalization in both conditioning slots") {
    // int dtheta dt dh f = 1 and int dtheta dt dh' f = 1 (coarse quadrature,
    // theta integrated exactly via the h'' substitution).
    auto marginal_h = [&](double hp) {  // int over (theta, t, h)
        const GaussRule& g = gauss_rule(24);
        double tot = 0.0;
        for (int a = 0; a < 24; ++a) {
            double mid = g.x[a];  // h'' substitution absorbs the slope factor
            for (int b = 0; b < 24; ++b) {
                double h = g.x[b];
                double edge = std::min(support_edge(h, mid), 60.0) +
                              std::min(support_edge(mid, hp), 60.0);
                double inner = gauss_integrate_split(
                    [&](double t) { return two_collision_time_integral(t, h, mid, hp); }, 0.0,
                    edge, {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}, 12);
                tot += g.w[a] * g.w[b] * inner;
            }
        }
        return tot;
    };
    CHECK(marginal_h(0.3) == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(marginal_h(-0.7) == doctest::Approx(1.0).epsilon(5e-3));
    // the conditioning-slot normalization: swap the roles of h and h'
    auto marginal_hp = [&](double h) {  // int over (theta, t, h')
        const GaussRule& g = gauss_rule(24);
        double tot = 0.0;
        for (int a = 0; a < 24; ++a) {
            double mid = g.x[a];
            for (int b = 0; b < 24; ++b) {
                double hp = g.x[b];
                double edge = std::min(support_edge(h, mid), 60.0) +
                              std::min(support_edge(mid, hp), 60.0);
                double inner = gauss_integrate_split(
                    [&](double t) { return two_collision_time_integral(t, h, mid, hp); }, 0.0,
                    edge, {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}, 12);
                tot += g.w[a] * g.w[b] * inner;
            }
        }
        return tot;
    };
    CHECK(marginal_hp(0.45) == doctest::Approx(1.0).epsilon(5e-3));
}
