#include "doctest_main.hpp"
#include "lgkin/modes.hpp"
#include "lgkin/varphi.hpp"
#include "oracles.hpp"

using namespace lgkin;

TEST_CASE("memory kernel initial value") {
    // phi(theta,0,h|hp) = f(theta,0,h|hp) - E(0,h)/(2pi) = -1/(2pi)
    SolverSetup S = SolverSetup::make(8, 12, 5.0, 12, 1.0, 0.05);
    VarphiSlice sl = solve_varphi(S, 0.3);
    for (double v : sl.data.trace[0]) CHECK(v == doctest::Approx(-1.0 / kTwoPi).epsilon(1e-14));
}

TEST_CASE("memory kernel weighted identity") {
    // int phi(theta,t',h|hp) E2(T-t') = tail2(T) - E2(T,hp) - E3(T,hp);
    // the theta-integral of the raw kernel converges ~1/n_theta (angular
    // kinks), so this check runs at n_theta = 64
    SolverSetup S = SolverSetup::make(64, 12, 5.0, 16, 8.0, 0.025);
    KernelTable q1 = base_kernel_table(32, 0.025, 16.0);
    RenewalWeights W = build_renewal_weights(q1.h, q1.dt, q1.nt, HInterp::Lagrange);
    KernelTable q2 = pair_kernel_table(q1);
    EnTable e1 = base_equilibrium_table(q1);
    EnTable e2 = next_equilibrium_table(e1, q1, &W);
    EnTable e3 = next_equilibrium_table(e2, q2);
    std::size_t a = 20;  // conditioning node inside the axis
    double hp = q1.h.nodes[a];
    VarphiSlice sl = solve_varphi(S, hp);
    const double T = 8.0;
    double lhs = varphi_weighted_identity_lhs(S, sl, T);
    std::size_t nT = static_cast<std::size_t>(std::llround(T / q1.dt));
    double rhs = tail_mass_E2(T) - e2.at(nT, a) - e3.at(nT, a);
    CHECK(std::abs(lhs - rhs) < 1e-3);
}

TEST_CASE("decay of the weighted memory kernel") {
    SolverSetup S = SolverSetup::make(8, 12, 5.0, 16, 16.0, 0.04);
    VarphiSlice sl = solve_varphi(S, -0.4);
    double s8 = sup_weighted_decay(sl, 8.0);
    double s16 = sup_weighted_decay(sl, 16.0);
    CHECK(s8 > 0.0);
    CHECK(s16 <= s8 * 1.1);  // uniform boundedness of (t+1)|phi|
}

TEST_CASE("contraction scan shape") {
    KernelTable q1 = base_kernel_table(32, 0.05, 16.0);
    RenewalWeights W = build_renewal_weights(q1.h, q1.dt, q1.nt, HInterp::Lagrange);
    EnTable e1 = base_equilibrium_table(q1);
    EnTable e2 = next_equilibrium_table(e1, q1, &W);
    std::vector<double> cs{0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5};
    ContractionScan scan = scan_contraction(cs, e2, 8);
    CHECK(scan.d0 == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(scan.best_d < 1.0);
    CHECK(scan.best_c > 0.0);
    // Lipschitz bound: |d(c+delta) - d(c)| <= delta/(2pi) ||E2||_L1(theta,t,h')
    //                = 2 delta, plus the small tail term
    for (std::size_t i = 1; i < cs.size(); ++i) {
        double delta = cs[i] - cs[i - 1];
        CHECK(std::abs(scan.d_values[i] - scan.d_values[i - 1]) <=
              2.0 * delta + delta * 0.05 + 1e-9);
    }
}

TEST_CASE("four-term representation on trivial data") {
    SolverSetup S = SolverSetup::make(8, 12, 5.0, 12, 2.0, 0.04);
    std::vector<VarphiSlice> slices;
    for (double hp : S.grid.h.nodes) slices.push_back(solve_varphi(S, hp));
    InitialData zero;
    zero.name = "zero";
    zero.eval = [](double, double, double) { return 0.0; };
    zero.total_mass = 0.0;
    zero.mass_upto = [](double) { return 0.0; };
    zero.tail_beyond = [](double) { return 0.0; };
    auto rep0 = varphi_trace_representation(S, slices, zero, 1.0);
    for (double v : rep0) CHECK(v == 0.0);
    auto repE = varphi_trace_representation(S, slices, equilibrium_datum(), 2.0);
    for (double v : repE) CHECK(v == doctest::Approx(1.0 / kTwoPi).epsilon(1e-14));
    // cosine datum against the direct march at t = 2
    InitialData cd = cosine_datum();
    CollisionTrace tr = solve_trace(S, cd);
    auto rep = varphi_trace_representation(S, slices, cd, 2.0);
    double worst = 0.0;
    for (std::size_t q = 0; q < rep.size(); ++q)
        worst = std::max(worst, std::abs(rep[q] - tr.data.trace[50][q]));
    CHECK(worst < 1e-3);
}

TEST_CASE("oscillatory memory kernel") {
    SolverSetup S = SolverSetup::make(16, 12, 5.0, 12, 4.0, 0.05);
    Vec2 k{1.0, 0.0};
    CHECK_THROWS(solve_varphi_k(S, {0.0, 0.0}, 0.0, 0.2));
    VarphiKSlice sl = solve_varphi_k(S, k, 0.7, 0.2);
    // phi^k(.,0,.) = g^k(.,0,.) = 0
    for (auto v : sl.data.trace[0]) CHECK(std::abs(v) == 0.0);
    double sup = sup_weighted_decay(sl, 4.0);
    CHECK(sup > 0.0);
    CHECK(sup < 5.0);  // bounded (t+1)|phi^k| on the horizon
}

TEST_CASE("three-term mode representation matches the direct mode march") {
    // small wave vector keeps the theta' quadrature affordable
    Vec2 k{0.3, 0.2};
    SolverSetup S = SolverSetup::make(24, 12, 5.0, 12, 4.0, 0.05);
    ComplexInitialData eq;
    eq.name = "equilibrium-mode";
    eq.eval = [](double, double s, double h) {
        return std::complex<double>(equilibrium(s, h) / kTwoPi, 0.0);
    };
    eq.total_mass = 1.0;
    eq.mass_upto = [](double t) { return equilibrium_datum().mass_upto(t); };
    eq.tail_beyond = [](double s) { return equilibrium_tail_mass(s); };
    ModeState st = solve_mode_trace(S, k, eq);
    const std::size_t ntq = 24;
    std::vector<VarphiKSlice> slices;
    slices.reserve(ntq * S.grid.h.size());
    for (std::size_t iq = 0; iq < ntq; ++iq)
        for (double hp : S.grid.h.nodes)
            slices.push_back(solve_varphi_k(S, k, kTwoPi * iq / ntq, hp));
    auto rep = mode_trace_representation(S, k, slices, ntq, eq, 4.0);
    double worst = 0.0;
    const auto& direct = st.data.trace[80];
    for (std::size_t q = 0; q < rep.size(); ++q)
        worst = std::max(worst, std::abs(rep[q] - direct[q]));
    CHECK(worst < 1e-3);
}
