// Iterated collision kernels Q^(n) built by time-convolution, the associated
// equilibria E^(n) built from the recursion E^(n) = E^(n-1) + Q^(n-1) * E,
// and semi-analytic tail masses for truncation accounting.
#pragma once

#include <vector>

#include "lgkin/volterra.hpp"

namespace lgkin {

struct KernelTable {
    int order = 1;
    double dt = 0.0;
    std::size_t nt = 0;  // stored times 0..nt*dt
    AxisGrid h;          // shared h and h' axis (Gauss-Legendre)
    std::vector<double> vals;  // [n][a][b]
    // piecewise-analytic s-structure of the base kernel for each pair
    std::vector<double> break1, break2;  // [a][b]: 1/(1+big), 1/(1+small)

    double at(std::size_t n, std::size_t a, std::size_t b) const {
        return vals[(n * h.size() + a) * h.size() + b];
    }
};

struct EnTable {
    int order = 1;
    double dt = 0.0;
    std::size_t nt = 0;
    AxisGrid h;
    std::vector<double> vals;  // [n][a]
    double at(std::size_t n, std::size_t a) const { return vals[n * h.size() + a]; }
};

/// Q^(1) = Q sampled on the (t,h,h') grid.
KernelTable base_kernel_table(std::size_t n_h, double dt, double T);

/// Q^(2) evaluated directly from the closed-form pair convolution with
/// kink-split quadrature in the intermediate impact parameter. The order-1
/// kernel has branch kinks in h'' that grid interpolation cannot resolve;
/// Q^(2) and higher orders are smooth enough to interpolate.
KernelTable pair_kernel_table(const KernelTable& q1);

/// Q^(n) from Q^(n-1), n >= 3: product integration of the time convolution
/// with the kernel moments exact and the lower-order table interpolated on
/// the grid (same scheme as the transport marcher).
KernelTable convolve_next(const KernelTable& qn, const RenewalWeights& W);

/// Pointwise Q^(2)(t,h|hp) by the same direct quadrature.
double pair_kernel_point(double t, double h, double hp);

/// E^(1): the equilibrium sampled on (t, h).
EnTable base_equilibrium_table(const KernelTable& q1);

/// E^(n) = E^(n-1) + Q^(n-1) * E via product integration. For n = 2 the
/// base-kernel moments are exact (shares the marcher's weight tables); for
/// n >= 3 the smooth Q^(n-1) table convolves E by trapezoid.
EnTable next_equilibrium_table(const EnTable& en, const KernelTable& qn_minus_1,
                               const RenewalWeights* W = nullptr);

/// int over the table domain: sum_t sum_h with trapezoid-in-t and the axis
/// h-weights, of Q^(n)(.,.|b) for a conditioning node b.
double table_mass(const KernelTable& q, std::size_t b);
/// Same for E^(n).
double table_mass(const EnTable& e);

/// Semi-analytic tails: int_T^inf int E^(2) and int E^(3) (dt dh).
double tail_mass_E2(double T);
double tail_mass_E3(double T, const EnTable& e2);

/// Pointwise E^(2)(s,h) = E(s,h) + (Q*E)(s,h) by product integration,
/// independent of any stored table.
double equilibrium2_point(double s, double h);

/// max over a coarse (t,h,h') probe grid of |int_theta f dtheta - Q^(2)|,
/// the theta-integral by trapezoid with `n_theta` points.
double f_marginal_error(const KernelTable& q2, std::size_t n_theta);

}  // namespace lgkin
