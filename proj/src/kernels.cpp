#include "lgkin/kernels.hpp"

#include <limits>
#include <stdexcept>

#include "lgkin/quadrature.hpp"

namespace lgkin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Pairs closer than this in |big-small| are treated as diagonal; the
// difference quotient is unstable there and the analytic limit is exact.
constexpr double kDiagEps = 2e-12;

struct Branches {
    double s1;   // 1/(1+big): end of the constant branch
    double s2;   // 1/(1+small): support edge (may be +inf)
    double big, small;
};

inline Branches branches(double h, double hp) {
    ReducedPair r = reduce_pair(h, hp);
    Branches b;
    b.big = r.big;
    b.small = r.small;
    b.s1 = 1.0 / (1.0 + r.big);
    b.s2 = (r.small <= -1.0) ? kInf : 1.0 / (1.0 + r.small);
    return b;
}
}  // namespace

double support_edge(double h, double hp) { return branches(h, hp).s2; }

double collision_kernel(double s, double h, double hp) {
    if (s < 0.0) return 0.0;
    Branches b = branches(h, hp);
    if (s <= b.s1) return kQScale;
    double d = b.big - b.small;
    if (d < kDiagEps) return 0.0;  // middle branch empty on the diagonal
    if (s <= b.s2) return kQScale * (1.0 / s - (1.0 + b.small)) / d;
    return 0.0;
}

double collision_kernel_cum(double s, double h, double hp) {
    if (s <= 0.0) return 0.0;
    Branches b = branches(h, hp);
    double d = b.big - b.small;
    if (d < kDiagEps) return kQScale * std::min(s, 0.5 * (b.s1 + std::min(b.s2, 1e300)));
    double v = kQScale * std::min(s, b.s1);
    if (s > b.s1) {
        double x = std::min(s, b.s2);
        v += kQScale * (std::log(x / b.s1) - (1.0 + b.small) * (x - b.s1)) / d;
    }
    return v;
}

double collision_kernel_cum1(double s, double h, double hp) {
    if (s <= 0.0) return 0.0;
    Branches b = branches(h, hp);
    double d = b.big - b.small;
    if (d < kDiagEps) {
        double x = std::min(s, 0.5 * (b.s1 + std::min(b.s2, 1e300)));
        return kQScale * 0.5 * x * x;
    }
    double x0 = std::min(s, b.s1);
    double v = kQScale * 0.5 * x0 * x0;
    if (s > b.s1) {
        double x = std::min(s, b.s2);
        v += kQScale * ((x - b.s1) - 0.5 * (1.0 + b.small) * (x * x - b.s1 * b.s1)) / d;
    }
    return v;
}

double collision_kernel_tail(double s, double h, double hp) {
    Branches b = branches(h, hp);
    if (s >= b.s2) return 0.0;
    double d = b.big - b.small;
    if (d < kDiagEps) return kQScale * std::max(0.0, b.s1 - std::max(s, 0.0));
    if (b.s2 == kInf) return kInf;  // corner pair: log-divergent tail
    double lo = std::max(s, b.s1);
    double v = kQScale * (std::log(b.s2 / lo) - (1.0 + b.small) * (b.s2 - lo)) / d;
    if (s < b.s1) v += kQScale * (b.s1 - std::max(s, 0.0));
    return v;
}

double impact_transition(double h, double hp) {
    ReducedPair r = reduce_pair(h, hp);
    double d = r.big - r.small;
    if (r.small <= -1.0 + kDiagEps && r.big >= 1.0 - kDiagEps && d > 1.0)
        return kInf;  // Pi(1|-1) = +inf
    if (d < kDiagEps) return kQScale / (1.0 + 0.5 * (r.big + r.small));
    return kQScale * (std::log1p(r.big) - std::log1p(r.small)) / d;
}

using detail::kernel_h_cuts;

double equilibrium(double s, double h) {
    if (s <= 0.0) return 1.0;
    h = std::abs(h);  // E(s,h) = E(s,-h); evaluate one representative
    if (s * (1.0 - h) >= 1.0) return 0.0;
    std::vector<double> cuts;
    kernel_h_cuts(s, s, h, cuts);
    for (int j = 1; j <= 24; ++j) {  // log endpoints of the h'-integrand
        double d = std::ldexp(1.0, -j);
        cuts.push_back(1.0 - d);
        cuts.push_back(d - 1.0);
    }
    double e = gauss_integrate_split(
        [&](double hp) { return collision_kernel_tail(s, h, hp); }, -1.0, 1.0, cuts, 12);
    return std::min(e, 1.0);
}

double equilibrium_h_marginal(double s) {
    if (s <= 0.0) return 2.0;
    std::vector<double> cuts;
    if (s > 1.0) {
        double c = 1.0 - 1.0 / s;
        cuts.push_back(c);
        cuts.push_back(-c);
    }
    if (s > 0.5) {
        double c = 1.0 / s - 1.0;
        cuts.push_back(c);
        cuts.push_back(-c);
    }
    cuts.push_back(0.0);
    return gauss_integrate_split([&](double h) { return equilibrium(s, h); }, -1.0, 1.0, cuts, 16);
}

double equilibrium_s_integral(double h) {
    // int_0^inf E(s,h) ds = int dh' int_0^inf s Q(s,h|h') ds
    std::vector<double> cuts{std::abs(h), -std::abs(h), 0.0};
    return gauss_integrate_split(
        [&](double hp) { return collision_kernel_cum1(support_edge(h, hp), h, hp); }, -1.0, 1.0,
        cuts, 24);
}

double equilibrium_tail_mass(double T) {
    // int_T^inf M(s) ds with sigma = 1/s; the integrand M(1/sigma)/sigma^2 is
    // O(1) but not smooth at sigma = 0, so the panels refine dyadically.
    const GaussRule& g = gauss_rule(8);
    const double a = 1.0 / T;
    double tot = 0.0;
    double hi = a;
    for (int j = 0; j < 40 && hi > 1e-14; ++j) {
        double lo = 0.5 * hi;
        double m = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
        for (int q = 0; q < 8; ++q) {
            double sigma = m + r * g.x[q];
            tot += r * g.w[q] * equilibrium_h_marginal(1.0 / sigma) / (sigma * sigma);
        }
        hi = lo;
    }
    return tot;
}

double to_turning_window(double dtheta, double hp) {
    double wl = turning_window_left(hp);
    double r = dtheta - wl;
    r -= kTwoPi * std::floor(r / kTwoPi);
    if (r >= kTwoPi) r = 0.0;  // guard against floor roundoff at the edge
    return wl + r;
}

double intermediate_impact(double theta, double hp) {
    double wl = turning_window_left(hp);
    if (theta < wl || theta >= wl + kTwoPi) return 0.0;
    return std::sin(0.5 * (theta + kTwoPi - 2.0 * std::asin(hp)));
}

double intermediate_impact_slope(double theta, double hp) {
    double wl = turning_window_left(hp);
    if (theta < wl || theta >= wl + kTwoPi) return 0.0;
    return 0.5 * std::cos(0.5 * (theta + kTwoPi - 2.0 * std::asin(hp)));
}

namespace {
// Integration pieces of u -> Q(t-u,h|mid) Q(u,mid|hp) on [0,t]: support clip
// plus both kernels' branch points.
inline int time_conv_pieces(double t, double h, double mid, double hp, double* pts) {
    Branches b1 = branches(h, mid);   // argument t-u
    Branches b2 = branches(mid, hp);  // argument u
    double lo = (b1.s2 < t) ? t - b1.s2 : 0.0;
    double hi = std::min(t, b2.s2);
    if (!(hi > lo)) return 0;
    int n = 0;
    pts[n++] = lo;
    auto push = [&](double x) {
        if (x > lo && x < hi) pts[n++] = x;
    };
    push(t - b1.s1);
    push(b2.s1);
    push(b2.s2);
    push(t - b1.s2);
    pts[n++] = hi;
    std::sort(pts, pts + n);
    return n;
}
}  // namespace

double two_collision_time_integral(double t, double h, double mid, double hp) {
    if (t <= 0.0) return 0.0;
    double pts[8];
    int n = time_conv_pieces(t, h, mid, hp, pts);
    if (n == 0) return 0.0;
    const GaussRule& g = gauss_rule(16);
    double tot = 0.0;
    for (int p = 0; p + 1 < n; ++p) {
        double m = 0.5 * (pts[p] + pts[p + 1]), r = 0.5 * (pts[p + 1] - pts[p]);
        if (!(r > 0.0)) continue;
        for (int i = 0; i < 16; ++i) {
            double u = m + r * g.x[i];
            tot += r * g.w[i] * collision_kernel(t - u, h, mid) * collision_kernel(u, mid, hp);
        }
    }
    return tot;
}

std::complex<double> two_collision_time_integral_osc(double t, double h, double mid, double hp,
                                                     double omega) {
    if (t <= 0.0) return 0.0;
    double pts[8];
    int n = time_conv_pieces(t, h, mid, hp, pts);
    if (n == 0) return 0.0;
    const GaussRule& g = gauss_rule(12);
    std::complex<double> tot = 0.0;
    for (int p = 0; p + 1 < n; ++p) {
        double len = pts[p + 1] - pts[p];
        if (!(len > 0.0)) continue;
        int nsub = 1 + static_cast<int>(std::abs(omega) * len / 1.5);
        double sl = len / nsub;
        for (int q = 0; q < nsub; ++q) {
            double a = pts[p] + q * sl;
            double m = a + 0.5 * sl, r = 0.5 * sl;
            for (int i = 0; i < 12; ++i) {
                double u = m + r * g.x[i];
                double qq =
                    collision_kernel(t - u, h, mid) * collision_kernel(u, mid, hp);
                tot += r * g.w[i] * qq * std::polar(1.0, omega * u);
            }
        }
    }
    return tot;
}

double angular_pair_kernel(double theta, double t, double h, double hp) {
    double th = to_turning_window(theta, hp);
    double slope = intermediate_impact_slope(th, hp);
    if (slope <= 0.0 || t <= 0.0) return 0.0;
    double mid = intermediate_impact(th, hp);
    return slope * two_collision_time_integral(t, h, mid, hp);
}

std::complex<double> mode_pair_kernel(Vec2 k, double theta, double t, double h, double theta_p,
                                      double hp) {
    if (k.x == 0.0 && k.y == 0.0)
        throw std::invalid_argument("k = (0,0) degenerates to the angular pair kernel");
    double th = to_turning_window(theta - theta_p, hp);
    double slope = intermediate_impact_slope(th, hp);
    if (slope <= 0.0 || t <= 0.0) return 0.0;
    double mid = intermediate_impact(th, hp);
    Vec2 vref = direction(theta_p - kPi + 2.0 * std::asin(hp));
    Vec2 v0 = direction(theta);
    double omega = kTwoPi * (dot(k, vref) - dot(k, v0));
    std::complex<double> inner = two_collision_time_integral_osc(t, h, mid, hp, omega);
    return slope * std::polar(1.0, kTwoPi * t * dot(k, v0)) * inner;
}

double measured_sup_sQ() {
    double best = 0.0;
    for (int ih = 0; ih <= 60; ++ih) {
        double h = -1.0 + 2.0 * ih / 60.0;
        for (int ip = 0; ip <= 60; ++ip) {
            double hp = -1.0 + 2.0 * ip / 60.0;
            double edge = std::min(support_edge(h, hp), 200.0);
            for (int is = 0; is <= 400; ++is) {
                double s = edge * is / 400.0;
                best = std::max(best, (s + 1.0) * collision_kernel(s, h, hp));
            }
        }
    }
    return best;
}

double measured_sup_sE() {
    double best = 0.0;
    for (int is = 0; is <= 240; ++is) {
        double s = std::pow(10.0, -1.0 + 3.0 * is / 240.0);  // 0.1 .. 100
        for (int iu = 1; iu <= 40; ++iu) {
            double u = static_cast<double>(iu) / 40.0;  // (1-|h|) s = u
            double h = 1.0 - u / s;
            if (h < 0.0) continue;
            best = std::max(best, (s + 1.0) * equilibrium(s, h));
        }
    }
    for (int ih = 0; ih <= 40; ++ih) {  // small-s block
        double h = -1.0 + 2.0 * ih / 40.0;
        for (int is = 0; is <= 40; ++is) {
            double s = 2.0 * is / 40.0;
            best = std::max(best, (s + 1.0) * equilibrium(s, h));
        }
    }
    return best;
}

double measured_sup_tf() {
    double best = 0.0;
    for (int ih = 0; ih <= 8; ++ih) {
        double h = -0.96 + 1.92 * ih / 8.0;
        for (int ip = 0; ip <= 8; ++ip) {
            double hp = -0.96 + 1.92 * ip / 8.0;
            double wl = turning_window_left(hp);
            for (int it = 1; it <= 40; ++it) {
                double t = 0.25 * it;
                for (int ia = 0; ia <= 24; ++ia) {
                    double theta = wl + kTwoPi * ia / 24.0;
                    best = std::max(best, (t + 1.0) * angular_pair_kernel(theta, t, h, hp));
                }
            }
        }
    }
    return best;
}

}  // namespace lgkin
