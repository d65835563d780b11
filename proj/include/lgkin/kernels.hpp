// Closed-form collision kernel of the Boltzmann-Grad limit of the 2D periodic
// Lorentz gas, and the functions built from it: the free-flight transition
// density Q(s,h|h'), its cumulative s-moments, the impact-parameter transition
// probability, the equilibrium density E(s,h), the intermediate-impact map
// h''(theta,h') and the one- and two-collision composite kernels used by the
// transport solvers.
//
// Everything here is pure and re-entrant; cached quadrature rules are built
// once and shared read-only.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace lgkin {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
// sup of the collision kernel, 6/pi^2
inline constexpr double kQScale = 0.60792710185402662866;

struct Vec2 {
    double x = 0.0, y = 0.0;
    double norm() const { return std::hypot(x, y); }
};
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Unit velocity v(theta) = (cos theta, sin theta).
inline Vec2 direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Angle increment applied to the velocity at a collision with impact
/// parameter hp: pi - 2 asin(hp).
inline double flight_rotation(double hp) { return kPi - 2.0 * std::asin(hp); }

// Canonical representative of an (h,h') pair in the cone |small| <= big where
// the kernel has its printed form. The mapping is deterministic, so symmetric
// argument orders hit bit-identical code paths.
struct ReducedPair {
    double big, small;
};
inline ReducedPair reduce_pair(double h, double hp) {
    if (std::abs(hp) <= h) return {h, hp};
    if (std::abs(h) <= hp) return {hp, h};
    if (std::abs(hp) <= -h) return {-h, -hp};
    return {-hp, -h};
}

/// Largest s with Q(s,h|h') > 0; +inf at the corner pairs (1,-1), (-1,1).
double support_edge(double h, double hp);

/// Transition density Q(s, h | h').
double collision_kernel(double s, double h, double hp);

/// Cumulative integral of Q(sigma,h|h') over sigma in [0,s] (closed form).
double collision_kernel_cum(double s, double h, double hp);

/// First moment: integral of sigma * Q(sigma,h|h') over [0,s] (closed form).
double collision_kernel_cum1(double s, double h, double hp);

/// Tail integral of Q(sigma,h|h') over [s, inf) (closed form, positive;
/// avoids the 1 - cumulative cancellation at large s). +inf at corner pairs.
double collision_kernel_tail(double s, double h, double hp);

/// Impact-parameter transition probability Pi(h|h') = int_0^inf Q ds.
/// Returns +inf at the corner pairs.
double impact_transition(double h, double hp);

/// Equilibrium density E(s,h): analytic s-integration of each kernel branch
/// plus kink-split Gauss quadrature in h'. Exactly 0 when s >= 1/(1-|h|).
double equilibrium(double s, double h);

/// h-marginal of the equilibrium, int_{-1}^{1} E(s,h) dh.
double equilibrium_h_marginal(double s);

/// int_0^inf E(s,h) ds for |h| < 1 (diverges at h = +-1).
double equilibrium_s_integral(double h);

/// Mass of the equilibrium beyond s = T (T >= 2), semi-analytic.
double equilibrium_tail_mass(double T);

/// Left edge of the turning window [2 asin(hp) - 3 pi, 2 asin(hp) - pi).
inline double turning_window_left(double hp) { return 2.0 * std::asin(hp) - 3.0 * kPi; }

/// Unique representative dtheta + 2 l pi inside the turning window.
double to_turning_window(double dtheta, double hp);

/// Intermediate impact parameter h''(theta, hp): sin((theta+2pi-2asin hp)/2)
/// inside the turning window of hp, else 0. theta is taken raw
/// (pre-periodization); combine with to_turning_window for periodic use.
double intermediate_impact(double theta, double hp);

/// d h''/d theta = sqrt(1-h''^2)/2 on the window, else 0.
double intermediate_impact_slope(double theta, double hp);

/// int_0^t Q(t-u, h|mid) Q(u, mid|hp) du with panels split at both kernels'
/// branch points.
double two_collision_time_integral(double t, double h, double mid, double hp);

/// Same integral against the phase e^{i omega u}.
std::complex<double> two_collision_time_integral_osc(double t, double h, double mid, double hp,
                                                     double omega);

/// Two-collision kernel resolved in the turning angle:
/// f(theta, t, h | hp) = (dh''/dtheta) * int_0^t Q(t-u,h|h'') Q(u,h''|hp) du
/// with h'' evaluated at the window representative of theta.
double angular_pair_kernel(double theta, double t, double h, double hp);

/// Oscillatory counterpart g^k(theta, t, h | theta', hp) for a wave vector k.
/// Requires k != (0,0) (at k = 0 it degenerates to angular_pair_kernel).
std::complex<double> mode_pair_kernel(Vec2 k, double theta, double t, double h, double theta_p,
                                      double hp);

// Measured decay constants: suprema of (s+1)Q, (s+1)E and (t+1)f on dense
// scans. The bounds exist with unspecified constants; we report the measured
// values.
double measured_sup_sQ();
double measured_sup_sE();
double measured_sup_tf();

namespace detail {
/// h'-integration split points of sigma-dependent kernel expressions for
/// sigma in [s_lo, s_hi] and fixed h: regime changes at |h'| = |h| and h' = 0,
/// branch crossings at |h'| = 1/sigma - 1.
inline void kernel_h_cuts(double s_lo, double s_hi, double h, std::vector<double>& cuts) {
    cuts.clear();
    double a = std::abs(h);
    cuts.push_back(a);
    cuts.push_back(-a);
    cuts.push_back(0.0);
    for (double s : {s_lo, s_hi}) {
        if (s > 0.5) {
            double c = 1.0 / s - 1.0;
            cuts.push_back(c);
            cuts.push_back(-c);
        }
    }
}
}  // namespace detail

}  // namespace lgkin
