// Product-integration marcher for the renewal (Volterra) equations of the
// transport problem:
//
//   rho(theta, t, h) = source(theta, t, h)
//     + int_0^t dt' int dh' Q(t-t', h|h') P(t-t', theta) rho(theta + Delta(h'), t', h'),
//
// with Delta(h') = pi - 2 asin(h') and P an optional free-flight phase.
// The kernel's (sigma, h')-moments are integrated exactly (piecewise-analytic
// in sigma, kink-split Gauss in h') against the interpolant of the unknown on
// the time grid (linear hats) and the h-axis nodes (barycentric Lagrange, or
// piecewise-linear hats); nodal data never leaves the h-axis nodes. Constants
// are reproduced exactly, so c * E is an exact discrete equilibrium.
#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lgkin/grid.hpp"
#include "lgkin/kernels.hpp"
#include "lgkin/quadrature.hpp"

namespace lgkin {

enum class HInterp { Lagrange, Hats };

// Weights a(delta,m,l), b(delta,m,l): moments of Q(sigma,h_m|.) L_l(.) against
// the two time-hats of the sigma-panel [(delta-1) dt, delta dt]. a multiplies
// the value at the older time t - delta dt, b the one at t - (delta-1) dt.
struct RenewalWeights {
    std::size_t nh = 0;
    double dt = 0.0;
    std::size_t depth = 0;                // number of panels stored
    std::vector<double> a, b;             // [delta-1][m][l], delta = 1..depth
    std::vector<std::size_t> depth_of_m;  // support cap per h-node

    const double* a_at(std::size_t delta) const { return a.data() + (delta - 1) * nh * nh; }
    const double* b_at(std::size_t delta) const { return b.data() + (delta - 1) * nh * nh; }
};

// Moments of Q against the pair of hats of one sigma-panel, resolved on the
// h-axis cardinals. Shared by the marcher and the field reconstruction.
inline void panel_weights(const AxisGrid& haxis, const std::vector<double>& bary, HInterp kind,
                          double sigma_lo, double sigma_hi, double h_m, double* wa, double* wb) {
    const std::size_t nh = haxis.size();
    for (std::size_t l = 0; l < nh; ++l) wa[l] = wb[l] = 0.0;
    if (!(sigma_hi > sigma_lo) || sigma_hi <= 0.0) return;
    if (sigma_lo * (1.0 - std::abs(h_m)) >= 1.0) return;  // beyond all support
    const double dt = sigma_hi - sigma_lo;
    // kernel support: edge(h_m,h') > sigma_lo only for h' on one side of
    // +-(1/sigma_lo - 1); prune dead pieces up front
    double active_lo = -1.0, active_hi = 1.0;
    if (sigma_lo > 0.5) {
        double c = 1.0 / sigma_lo - 1.0;
        // the kernel is alive on both outer bands when c >= |h_m|; only for
        // c < |h_m| does the support collapse to one side
        if (c < std::abs(h_m)) {
            if (h_m >= 0.0)
                active_hi = c + 1e-14;
            else
                active_lo = -c - 1e-14;
        }
    }
    std::vector<double> cuts;
    detail::kernel_h_cuts(std::max(sigma_lo, 1e-300), sigma_hi, h_m, cuts);
    // the moment integrand has strong curvature where h' approaches +-h_m
    double a = std::abs(h_m);
    for (double d : {0.05, 0.2}) {
        cuts.push_back(a + d);
        cuts.push_back(a - d);
        cuts.push_back(-a - d);
        cuts.push_back(-a + d);
    }
    cuts.push_back(-1.0);
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    const GaussRule& g = gauss_rule(10);
    std::vector<double> card(nh);
    double lo = -1.0;
    for (double c : cuts) {
        if (c <= lo || c > 1.0) continue;
        if (c <= active_lo || lo >= active_hi) {
            lo = c;
            continue;
        }
        double mm = 0.5 * (lo + c), rr = 0.5 * (c - lo);
        if (rr > 0.0) {
            for (int q = 0; q < 10; ++q) {
                double hp = mm + rr * g.x[q];
                double dq = collision_kernel_cum(sigma_hi, h_m, hp) -
                            collision_kernel_cum(sigma_lo, h_m, hp);
                if (dq == 0.0) continue;
                double dm = collision_kernel_cum1(sigma_hi, h_m, hp) -
                            collision_kernel_cum1(sigma_lo, h_m, hp);
                double ca = (dm - sigma_lo * dq) / dt;   // weight of older value
                double cb = (sigma_hi * dq - dm) / dt;   // weight of newer value
                double wq = rr * g.w[q];
                if (kind == HInterp::Lagrange)
                    lagrange_cardinals(haxis.nodes, bary, hp, card);
                else
                    hat_cardinals(haxis.nodes, hp, card);
                for (std::size_t l = 0; l < nh; ++l) {
                    wa[l] += wq * ca * card[l];
                    wb[l] += wq * cb * card[l];
                }
            }
        }
        lo = c;
    }
}

inline RenewalWeights build_renewal_weights(const AxisGrid& haxis, double dt,
                                            std::size_t max_steps, HInterp kind) {
    RenewalWeights W;
    W.nh = haxis.size();
    W.dt = dt;
    W.depth_of_m.resize(W.nh);
    std::size_t depth = 1;
    for (std::size_t m = 0; m < W.nh; ++m) {
        double edge = 1.0 / (1.0 - std::abs(haxis.nodes[m]));
        std::size_t d = static_cast<std::size_t>(edge / dt) + 2;
        W.depth_of_m[m] = std::min(d, max_steps + 1);
        depth = std::max(depth, W.depth_of_m[m]);
    }
    W.depth = depth;
    W.a.assign(depth * W.nh * W.nh, 0.0);
    W.b.assign(depth * W.nh * W.nh, 0.0);
    std::vector<double> bary = barycentric_weights(haxis.nodes);
    for (std::size_t m = 0; m < W.nh; ++m) {
        for (std::size_t d = 1; d <= W.depth_of_m[m]; ++d) {
            double* wa = W.a.data() + (d - 1) * W.nh * W.nh + m * W.nh;
            double* wb = W.b.data() + (d - 1) * W.nh * W.nh + m * W.nh;
            panel_weights(haxis, bary, kind, (d - 1) * dt, d * dt, haxis.nodes[m], wa, wb);
        }
    }
    return W;
}

// Shift operators rho(theta_i + Delta(h_l)) via trigonometric interpolation,
// one dense n_theta x n_theta matrix per h-node.
struct ShiftOps {
    std::size_t ntheta = 0, nh = 0;
    std::vector<double> S;  // [l][i][j]
    const double* at(std::size_t l) const { return S.data() + l * ntheta * ntheta; }
};

inline ShiftOps build_shift_ops(const AxisGrid& theta, const AxisGrid& haxis) {
    ShiftOps ops;
    ops.ntheta = theta.size();
    ops.nh = haxis.size();
    ops.S.resize(ops.nh * ops.ntheta * ops.ntheta);
    for (std::size_t l = 0; l < ops.nh; ++l) {
        auto M = trig_shift_matrix(ops.ntheta, flight_rotation(haxis.nodes[l]));
        std::copy(M.begin(), M.end(), ops.S.begin() + l * ops.ntheta * ops.ntheta);
    }
    return ops;
}

struct UnitPhase {
    double operator()(std::size_t, std::size_t) const { return 1.0; }
};

// March result: per time index n, trace values [i*nh+m] and the shifted copy
// sigma_n[i*nh+l] = rho_n(theta_i + Delta(h_l), h_l).
template <typename T>
struct MarchOutput {
    double dt = 0.0;
    std::vector<std::vector<T>> trace;
    std::vector<std::vector<T>> shifted;
    int max_picard = 0;
    bool converged = true;
};

namespace detail {
template <typename T>
inline void apply_shift(const ShiftOps& ops, const std::vector<T>& rho, std::vector<T>& sig) {
    const std::size_t nt = ops.ntheta, nh = ops.nh;
    sig.assign(nt * nh, T{});
    for (std::size_t l = 0; l < nh; ++l) {
        const double* M = ops.at(l);
        for (std::size_t i = 0; i < nt; ++i) {
            T acc{};
            const double* row = M + i * nt;
            for (std::size_t j = 0; j < nt; ++j) acc += row[j] * rho[j * nh + l];
            sig[i * nh + l] = acc;
        }
    }
}
}  // namespace detail

// Source: callable (theta_index, h_index, t) -> T.
// Phase: callable (delta, theta_index) -> T, the free-flight factor over the
// time offset delta*dt (UnitPhase for the phaseless equation).
template <typename T, typename Source, typename Phase>
MarchOutput<T> march_renewal(const AxisGrid& theta, const AxisGrid& haxis,
                             const RenewalWeights& W, const ShiftOps& ops, double dt,
                             std::size_t nsteps, Source&& source, Phase&& phase,
                             double picard_tol = 1e-10, int picard_cap = 50) {
    const std::size_t nt = theta.size(), nh = haxis.size();
    if (W.nh != nh || W.dt != dt) throw std::invalid_argument("weight table mismatch");
    MarchOutput<T> out;
    out.dt = dt;
    out.trace.resize(nsteps + 1);
    out.shifted.resize(nsteps + 1);

    std::vector<T> rho(nt * nh), mem(nt * nh), tmp(nt * nh), sig;
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t m = 0; m < nh; ++m) rho[i * nh + m] = source(i, m, 0.0);
    out.trace[0] = rho;
    detail::apply_shift(ops, rho, sig);
    out.shifted[0] = sig;

    for (std::size_t n = 1; n <= nsteps; ++n) {
        const double t = n * dt;
        // explicit part: source + memory over stored panels
        for (std::size_t i = 0; i < nt; ++i)
            for (std::size_t m = 0; m < nh; ++m) mem[i * nh + m] = source(i, m, t);
        const std::size_t dmax = std::min(n, W.depth);
        for (std::size_t d = 1; d <= dmax; ++d) {
            // G_{n-d} collects a(d) and (when the newer panel exists) b(d+1)
            const double* A = W.a_at(d);
            const double* B = (d + 1 <= W.depth) ? W.b_at(d + 1) : nullptr;
            const bool has_b = B != nullptr && d + 1 <= n;
            const std::vector<T>& G = out.shifted[n - d];
            for (std::size_t i = 0; i < nt; ++i) {
                const T* g = G.data() + i * nh;
                T ph = phase(d, i);
                T* acc = mem.data() + i * nh;
                for (std::size_t m = 0; m < nh; ++m) {
                    if (d > W.depth_of_m[m] && (!has_b || d + 1 > W.depth_of_m[m])) continue;
                    const double* wa = A + m * nh;
                    T s{};
                    if (d <= W.depth_of_m[m])
                        for (std::size_t l = 0; l < nh; ++l) s += wa[l] * g[l];
                    if (has_b && d + 1 <= W.depth_of_m[m]) {
                        const double* wb = B + m * nh;
                        for (std::size_t l = 0; l < nh; ++l) s += wb[l] * g[l];
                    }
                    acc[m] += ph * s;
                }
            }
        }
        // implicit part: rho_n appears through b(1); Picard iteration
        const double* B1 = W.b_at(1);
        std::vector<T>& cur = rho;  // warm start from previous step
        int it = 0;
        for (; it < picard_cap; ++it) {
            detail::apply_shift(ops, cur, sig);
            double diff = 0.0;
            for (std::size_t i = 0; i < nt; ++i) {
                const T* g = sig.data() + i * nh;
                for (std::size_t m = 0; m < nh; ++m) {
                    const double* wb = B1 + m * nh;
                    T s{};
                    for (std::size_t l = 0; l < nh; ++l) s += wb[l] * g[l];
                    T v = mem[i * nh + m] + s;  // phase(0,i) == 1
                    diff = std::max(diff, std::abs(v - cur[i * nh + m]));
                    tmp[i * nh + m] = v;
                }
            }
            cur.swap(tmp);
            if (diff < picard_tol) break;
        }
        out.max_picard = std::max(out.max_picard, it + 1);
        if (it >= picard_cap) out.converged = false;
        out.trace[n] = cur;
        detail::apply_shift(ops, cur, sig);
        out.shifted[n] = sig;
    }
    return out;
}

}  // namespace lgkin
