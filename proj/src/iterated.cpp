#include "lgkin/iterated.hpp"

#include "lgkin/quadrature.hpp"

namespace lgkin {

KernelTable base_kernel_table(std::size_t n_h, double dt, double T) {
    KernelTable q;
    q.order = 1;
    q.dt = dt;
    q.nt = static_cast<std::size_t>(std::llround(T / dt));
    q.h = make_gauss_axis(n_h, -1.0, 1.0);
    const std::size_t nh = n_h;
    q.vals.resize((q.nt + 1) * nh * nh);
    q.break1.resize(nh * nh);
    q.break2.resize(nh * nh);
    for (std::size_t a = 0; a < nh; ++a)
        for (std::size_t b = 0; b < nh; ++b) {
            ReducedPair r = reduce_pair(q.h.nodes[a], q.h.nodes[b]);
            q.break1[a * nh + b] = 1.0 / (1.0 + r.big);
            q.break2[a * nh + b] = support_edge(q.h.nodes[a], q.h.nodes[b]);
        }
    for (std::size_t n = 0; n <= q.nt; ++n)
        for (std::size_t a = 0; a < nh; ++a)
            for (std::size_t b = 0; b < nh; ++b)
                q.vals[(n * nh + a) * nh + b] =
                    collision_kernel(n * dt, q.h.nodes[a], q.h.nodes[b]);
    return q;
}

double pair_kernel_point(double t, double h, double hp) {
    if (t <= 0.0) return 0.0;
    std::vector<double> cuts{std::abs(h), -std::abs(h), std::abs(hp), -std::abs(hp), 0.0};
    for (double s : {t, 0.5 * t}) {
        if (s > 0.5) {
            cuts.push_back(1.0 / s - 1.0);
            cuts.push_back(1.0 - 1.0 / s);
        }
    }
    return gauss_integrate_split(
        [&](double mid) { return two_collision_time_integral(t, h, mid, hp); }, -1.0, 1.0, cuts,
        12);
}

KernelTable pair_kernel_table(const KernelTable& q1) {
    KernelTable out = q1;
    out.order = 2;
    std::fill(out.vals.begin(), out.vals.end(), 0.0);
    const std::size_t nh = q1.h.size();
    for (std::size_t a = 0; a < nh; ++a)
        for (std::size_t b = a; b < nh; ++b) {
            // beyond the longest two-flight chain through any h'' the value is 0
            double bound = 1.0 / (1.0 - std::abs(q1.h.nodes[a])) +
                           1.0 / (1.0 - std::abs(q1.h.nodes[b]));
            std::size_t nmax = std::min(
                q1.nt, static_cast<std::size_t>(bound / q1.dt) + 1);
            for (std::size_t n = 1; n <= nmax; ++n) {
                double v = pair_kernel_point(n * q1.dt, q1.h.nodes[a], q1.h.nodes[b]);
                out.vals[(n * nh + a) * nh + b] = v;
                out.vals[(n * nh + b) * nh + a] = v;  // Q^(2) is symmetric
            }
        }
    return out;
}

KernelTable convolve_next(const KernelTable& qn, const RenewalWeights& W) {
    if (W.nh != qn.h.size() || W.dt != qn.dt)
        throw std::invalid_argument("weight table does not match kernel table axes");
    KernelTable out = qn;
    out.order = qn.order + 1;
    std::fill(out.vals.begin(), out.vals.end(), 0.0);
    const std::size_t nh = qn.h.size();
    // Q^(n+1)(t, a|b) = int_0^t int dh'' Q(t-s',a|h'') Q^(n)(s',h''|b):
    // exact kernel moments against the interpolant of Q^(n) on the grid.
    for (std::size_t n = 1; n <= qn.nt; ++n) {
        for (std::size_t d = 1; d <= std::min<std::size_t>(n, W.depth); ++d) {
            const double* A = W.a_at(d);
            const double* B = (d + 1 <= W.depth && d + 1 <= n) ? W.b_at(d + 1) : nullptr;
            const double* Gold = qn.vals.data() + (n - d) * nh * nh;  // [h''][b]
            for (std::size_t a = 0; a < nh; ++a) {
                if (d > W.depth_of_m[a] && (B == nullptr || d + 1 > W.depth_of_m[a])) continue;
                const double* wa = A + a * nh;
                const double* wb = B ? B + a * nh : nullptr;
                double* dst = out.vals.data() + (n * nh + a) * nh;
                for (std::size_t l = 0; l < nh; ++l) {
                    double w = 0.0;
                    if (d <= W.depth_of_m[a]) w += wa[l];
                    if (wb && d + 1 <= W.depth_of_m[a]) w += wb[l];
                    if (w == 0.0) continue;
                    const double* src = Gold + l * nh;
                    for (std::size_t b = 0; b < nh; ++b) dst[b] += w * src[b];
                }
            }
        }
        // newest panel: b(1) multiplies the value at t itself
        const double* B1 = W.b_at(1);
        const double* Gnew = qn.vals.data() + n * nh * nh;
        for (std::size_t a = 0; a < nh; ++a) {
            const double* wb = B1 + a * nh;
            double* dst = out.vals.data() + (n * nh + a) * nh;
            for (std::size_t l = 0; l < nh; ++l) {
                if (wb[l] == 0.0) continue;
                const double* src = Gnew + l * nh;
                for (std::size_t b = 0; b < nh; ++b) dst[b] += wb[l] * src[b];
            }
        }
    }
    return out;
}

EnTable base_equilibrium_table(const KernelTable& q1) {
    EnTable e;
    e.order = 1;
    e.dt = q1.dt;
    e.nt = q1.nt;
    e.h = q1.h;
    e.vals.resize((e.nt + 1) * e.h.size());
    for (std::size_t n = 0; n <= e.nt; ++n)
        for (std::size_t a = 0; a < e.h.size(); ++a)
            e.vals[n * e.h.size() + a] = equilibrium(n * e.dt, e.h.nodes[a]);
    return e;
}

EnTable next_equilibrium_table(const EnTable& en, const KernelTable& q,
                               const RenewalWeights* W) {
    if (q.order != en.order) throw std::invalid_argument("need Q^(n) to lift E^(n)");
    EnTable out = en;
    out.order = en.order + 1;
    const std::size_t nh = en.h.size();
    if (W != nullptr && en.order == 1) {
        // exact base-kernel moments against the E interpolant
        std::vector<double> Erow((en.nt + 1) * nh);
        for (std::size_t j = 0; j <= en.nt; ++j)
            for (std::size_t l = 0; l < nh; ++l)
                Erow[j * nh + l] = equilibrium(j * en.dt, en.h.nodes[l]);
        for (std::size_t n = 1; n <= en.nt; ++n) {
            for (std::size_t d = 1; d <= std::min<std::size_t>(n, W->depth); ++d) {
                const double* A = W->a_at(d);
                const double* B = (d + 1 <= W->depth && d + 1 <= n) ? W->b_at(d + 1) : nullptr;
                const double* Eo = Erow.data() + (n - d) * nh;
                for (std::size_t a = 0; a < nh; ++a) {
                    double acc = 0.0;
                    const double* wa = A + a * nh;
                    if (d <= W->depth_of_m[a])
                        for (std::size_t l = 0; l < nh; ++l) acc += wa[l] * Eo[l];
                    if (B && d + 1 <= W->depth_of_m[a]) {
                        const double* wb = B + a * nh;
                        for (std::size_t l = 0; l < nh; ++l) acc += wb[l] * Eo[l];
                    }
                    out.vals[n * nh + a] += acc;
                }
            }
            const double* B1 = W->b_at(1);
            const double* Enw = Erow.data() + n * nh;
            for (std::size_t a = 0; a < nh; ++a) {
                double acc = 0.0;
                const double* wb = B1 + a * nh;
                for (std::size_t l = 0; l < nh; ++l) acc += wb[l] * Enw[l];
                out.vals[n * nh + a] += acc;
            }
        }
        return out;
    }
    // out(t,a) = en(t,a) + int_0^t ds' int dh' Q^(n)(t-s',a|h') E(s',h'):
    // trapezoid in s'; the h'-Gauss weights integrate the product of the two
    // nodal interpolants exactly.
    std::vector<double> Erow((en.nt + 1) * nh);
    for (std::size_t j = 0; j <= en.nt; ++j)
        for (std::size_t l = 0; l < nh; ++l)
            Erow[j * nh + l] = equilibrium(j * en.dt, en.h.nodes[l]);
    for (std::size_t n = 1; n <= en.nt; ++n) {
        for (std::size_t a = 0; a < nh; ++a) {
            double acc = 0.0;
            for (std::size_t j = 0; j <= n; ++j) {
                double tw = (j == 0 || j == n) ? 0.5 * en.dt : en.dt;
                const double* Qr = q.vals.data() + ((n - j) * nh + a) * nh;
                const double* Er = Erow.data() + j * nh;
                double s = 0.0;
                for (std::size_t l = 0; l < nh; ++l) s += en.h.weights[l] * Qr[l] * Er[l];
                acc += tw * s;
            }
            out.vals[n * nh + a] += acc;
        }
    }
    return out;
}

double table_mass(const KernelTable& q, std::size_t b) {
    const std::size_t nh = q.h.size();
    double tot = 0.0;
    for (std::size_t n = 0; n <= q.nt; ++n) {
        double tw = (n == 0 || n == q.nt) ? 0.5 * q.dt : q.dt;
        for (std::size_t a = 0; a < nh; ++a) tot += tw * q.h.weights[a] * q.at(n, a, b);
    }
    return tot;
}

double table_mass(const EnTable& e) {
    const std::size_t nh = e.h.size();
    double tot = 0.0;
    for (std::size_t n = 0; n <= e.nt; ++n) {
        double tw = (n == 0 || n == e.nt) ? 0.5 * e.dt : e.dt;
        for (std::size_t a = 0; a < nh; ++a) tot += tw * e.h.weights[a] * e.at(n, a);
    }
    return tot;
}

namespace {
// B(T) = int_0^T ds' int dh' E(s',h') E(T-s',h'), supported on the sliver
// |h'| >= 1 - 2/T; u = 1-|h'| with dyadic refinement toward u=0.
double sliver_product_mass(double T) {
    const GaussRule& gu = gauss_rule(6);
    const GaussRule& gs = gauss_rule(12);
    double tot = 0.0;
    double hi = std::min(1.0, 2.0 / T);
    for (int lev = 0; lev < 30 && hi > 1e-12; ++lev) {
        double lo = 0.5 * hi;
        for (int qu = 0; qu < 6; ++qu) {
            double u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gu.x[qu];
            double wu = 0.5 * (hi - lo) * gu.w[qu];
            double slo = std::max(0.0, T - 1.0 / u);
            double shi = std::min(T, 1.0 / u);
            if (!(shi > slo)) continue;
            double inner = 0.0;
            for (int qs = 0; qs < 12; ++qs) {
                double sp = 0.5 * (slo + shi) + 0.5 * (shi - slo) * gs.x[qs];
                inner += 0.5 * (shi - slo) * gs.w[qs] * equilibrium(sp, 1.0 - u) *
                         equilibrium(T - sp, 1.0 - u);
            }
            tot += wu * inner;
        }
        hi = lo;
    }
    return 2.0 * tot;
}
}  // namespace

double tail_mass_E2(double T) {
    // int_T^inf int E^(2) = 2 tail1(T) + B(T)
    return 2.0 * equilibrium_tail_mass(T) + sliver_product_mass(T);
}

double equilibrium2_point(double s, double h) {
    double v = equilibrium(s, h);
    if (s <= 0.0) return v;
    // (Q*E)(s,h) via panel moments of Q against E on a 16-node Gauss axis
    static const AxisGrid axis = make_gauss_axis(16, -1.0, 1.0);
    static const std::vector<double> bary = barycentric_weights(axis.nodes);
    const std::size_t nh = axis.size();
    std::size_t np = std::max<std::size_t>(8, static_cast<std::size_t>(s / 0.15));
    double dtp = s / np;
    std::vector<double> Erow((np + 1) * nh);
    for (std::size_t j = 0; j <= np; ++j)
        for (std::size_t l = 0; l < nh; ++l)
            Erow[j * nh + l] = equilibrium(j * dtp, axis.nodes[l]);
    std::vector<double> wa(nh), wb(nh);
    for (std::size_t j = 0; j < np; ++j) {
        // s' in [j dtp, (j+1) dtp], sigma = s - s'
        panel_weights(axis, bary, HInterp::Lagrange, s - (j + 1) * dtp, s - j * dtp, h, wa.data(),
                      wb.data());
        for (std::size_t l = 0; l < nh; ++l)
            v += wa[l] * Erow[(j + 1) * nh + l] + wb[l] * Erow[j * nh + l];
    }
    return v;
}

double tail_mass_E3(double T, const EnTable& e2) {
    (void)e2;
    // int_T^inf int E^(3) = tail2(T) + tail1(T) + B2(T),
    // B2(T) = int_0^T int dh' E(s',h') E^(2)(T-s',h')
    const GaussRule& gu = gauss_rule(6);
    const GaussRule& gs = gauss_rule(10);
    double b2 = 0.0;
    double hi = 1.0;
    for (int lev = 0; lev < 26 && hi > 1e-10; ++lev) {
        double lo = 0.5 * hi;
        for (int qu = 0; qu < 6; ++qu) {
            double u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gu.x[qu];
            double wu = 0.5 * (hi - lo) * gu.w[qu];
            double shi = std::min(T, 1.0 / u);
            if (!(shi > 0.0)) continue;
            double inner = 0.0;
            for (int qs = 0; qs < 10; ++qs) {
                double sp = 0.5 * shi + 0.5 * shi * gs.x[qs];
                double e1 = equilibrium(sp, 1.0 - u);
                if (e1 > 0.0)
                    inner += 0.5 * shi * gs.w[qs] * e1 * equilibrium2_point(T - sp, 1.0 - u);
            }
            b2 += wu * inner;
        }
        hi = lo;
    }
    b2 *= 2.0;
    return tail_mass_E2(T) + equilibrium_tail_mass(T) + b2;
}

double f_marginal_error(const KernelTable& q2, std::size_t n_theta) {
    if (q2.order != 2) throw std::invalid_argument("need the order-2 table");
    const std::size_t nh = q2.h.size();
    double worst = 0.0;
    for (std::size_t n : {std::size_t(0), q2.nt / 8, q2.nt / 4, q2.nt / 2, q2.nt}) {
        double t = n * q2.dt;
        for (std::size_t a = 0; a < nh; a += 5)
            for (std::size_t b = 0; b < nh; b += 5) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n_theta; ++i) {
                    double th = kTwoPi * i / n_theta;
                    acc += angular_pair_kernel(th, t, q2.h.nodes[a], q2.h.nodes[b]);
                }
                acc *= kTwoPi / n_theta;
                worst = std::max(worst, std::abs(acc - q2.at(n, a, b)));
            }
    }
    return worst;
}

}  // namespace lgkin
