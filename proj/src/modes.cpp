#include "lgkin/modes.hpp"

#include "lgkin/quadrature.hpp"

namespace lgkin {

namespace {
std::vector<std::complex<double>> phase_table(const AxisGrid& theta, Vec2 k, double dt,
                                              std::size_t N) {
    std::vector<std::complex<double>> P((N + 1) * theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        double rate = kTwoPi * dot(k, direction(theta.nodes[i]));
        for (std::size_t d = 0; d <= N; ++d)
            P[d * theta.size() + i] = std::polar(1.0, rate * d * dt);
    }
    return P;
}
}  // namespace

ModeState solve_mode_trace(const SolverSetup& S, Vec2 k, const ComplexInitialData& mu0) {
    if (S.dt > mode_dt_limit(k) * (1.0 + 1e-12))
        throw std::invalid_argument("dt too coarse for the mode phase rotation");
    const std::size_t nt = S.grid.theta.size(), nh = S.grid.h.size();
    auto P = phase_table(S.grid.theta, k, S.dt, S.nsteps);
    ModeState st;
    st.k = k;
    st.dt = S.dt;
    st.data = march_renewal<std::complex<double>>(
        S.grid.theta, S.grid.h, S.weights, S.shifts, S.dt, S.nsteps,
        [&](std::size_t i, std::size_t m, double t) {
            std::size_t n = static_cast<std::size_t>(std::llround(t / S.dt));
            return P[n * nt + i] * mu0.eval(S.grid.theta.nodes[i], t, S.grid.h.nodes[m]);
        },
        [&](std::size_t d, std::size_t i) { return P[d * nt + i]; });
    (void)nh;
    if (!st.data.converged) throw std::runtime_error("mode iteration failed to converge");
    return st;
}

ComplexField reconstruct_mode(const SolverSetup& S, Vec2 k, const ComplexInitialData& mu0,
                              const ModeState& st, double t, std::size_t stride) {
    const std::size_t n = static_cast<std::size_t>(std::llround(t / S.dt));
    if (n >= st.data.trace.size()) throw std::out_of_range("time beyond mode trace horizon");
    t = n * S.dt;
    while (stride > 1 && n % stride != 0) --stride;
    const std::size_t nt = S.grid.theta.size(), nh = S.grid.h.size(), ns = S.grid.s.size();
    auto P = phase_table(S.grid.theta, k, S.dt, n);
    ComplexField out(S.grid);
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t is = 0; is < ns; ++is)
            for (std::size_t m = 0; m < nh; ++m)
                out.at(i, is, m) = P[n * nt + i] * mu0.eval(S.grid.theta.nodes[i],
                                                            S.grid.s.nodes[is] + t,
                                                            S.grid.h.nodes[m]);
    if (n == 0) return out;
    std::vector<double> bary = barycentric_weights(S.grid.h.nodes);
    std::vector<double> wa(nh), wb(nh);
    for (std::size_t is = 0; is < ns; ++is) {
        double s = S.grid.s.nodes[is];
        for (std::size_t m = 0; m < nh; ++m) {
            if (s * (1.0 - std::abs(S.grid.h.nodes[m])) >= 1.0) continue;
            for (std::size_t j = 0; j < n; j += stride) {
                std::size_t j2 = std::min(j + stride, n);
                panel_weights(S.grid.h, bary, HInterp::Lagrange, s + (n - j2) * S.dt,
                              s + (n - j) * S.dt, S.grid.h.nodes[m], wa.data(), wb.data());
                const auto& Go = st.data.shifted[j];
                const auto& Gn = st.data.shifted[j2];
                for (std::size_t i = 0; i < nt; ++i) {
                    std::complex<double> acc_a = 0.0, acc_b = 0.0;
                    for (std::size_t l = 0; l < nh; ++l) {
                        acc_a += wa[l] * Go[i * nh + l];
                        acc_b += wb[l] * Gn[i * nh + l];
                    }
                    // free-flight phase over t - t' at the panel endpoints
                    out.at(i, is, m) += P[(n - j) * nt + i] * acc_a +
                                        P[(n - j2) * nt + i] * acc_b;
                }
            }
        }
    }
    return out;
}

double mode_tail_norm(const SolverSetup& S, Vec2 k, const ComplexInitialData& mu0,
                      const ModeState& st, double t, std::size_t stride) {
    const double s_max = S.grid.s.nodes.back();
    const std::size_t n = static_cast<std::size_t>(std::llround(t / S.dt));
    t = n * S.dt;
    while (stride > 1 && n % stride != 0) --stride;
    const std::size_t nt = S.grid.theta.size(), nh = S.grid.h.size();
    auto P = phase_table(S.grid.theta, k, S.dt, n == 0 ? 1 : n);
    std::vector<double> bary = barycentric_weights(S.grid.h.nodes);
    std::vector<double> wa(nh), wb(nh);
    std::vector<std::complex<double>> field(nt);
    const GaussRule& gs = gauss_rule(4);
    const GaussRule& gx = gauss_rule(6);
    double tot = 0.0;
    double hi = 1.0 / s_max;
    for (int lev = 0; lev < 14 && hi > 1e-9; ++lev) {
        double lo = 0.5 * hi;
        for (int qs = 0; qs < 4; ++qs) {
            double sigma = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gs.x[qs];
            double wsig = 0.5 * (hi - lo) * gs.w[qs] / sigma;
            double s = 1.0 / sigma;
            double xcut = 1.0 / (1.0 + sigma * t);
            for (int half = 0; half < 2; ++half) {
                double xlo = half == 0 ? 0.0 : xcut;
                double xhi = half == 0 ? xcut : 1.0;
                if (!(xhi > xlo)) continue;
                for (int qx = 0; qx < 6; ++qx) {
                    double xi = 0.5 * (xlo + xhi) + 0.5 * (xhi - xlo) * gx.x[qx];
                    double wxi = 0.5 * (xhi - xlo) * gx.w[qx];
                    for (int sgn = 0; sgn < 2; ++sgn) {
                        double h = (sgn == 0 ? 1.0 : -1.0) * (1.0 - sigma * xi);
                        for (std::size_t i = 0; i < nt; ++i)
                            field[i] = (n > 0 ? P[n * nt + i] : 1.0) *
                                       mu0.eval(S.grid.theta.nodes[i], s + t, h);
                        if (n > 0 && s * (1.0 - std::abs(h)) < 1.0) {
                            for (std::size_t j = 0; j < n; j += stride) {
                                std::size_t j2 = std::min(j + stride, n);
                                panel_weights(S.grid.h, bary, HInterp::Lagrange,
                                              s + (n - j2) * S.dt, s + (n - j) * S.dt, h,
                                              wa.data(), wb.data());
                                const auto& Go = st.data.shifted[j];
                                const auto& Gn = st.data.shifted[j2];
                                for (std::size_t l = 0; l < nh; ++l) {
                                    if (wa[l] != 0.0)
                                        for (std::size_t i = 0; i < nt; ++i)
                                            field[i] += wa[l] * P[(n - j) * nt + i] *
                                                        Go[i * nh + l];
                                    if (wb[l] != 0.0)
                                        for (std::size_t i = 0; i < nt; ++i)
                                            field[i] += wb[l] * P[(n - j2) * nt + i] *
                                                        Gn[i * nh + l];
                                }
                            }
                        }
                        double th_int = 0.0;
                        for (std::size_t i = 0; i < nt; ++i)
                            th_int += S.grid.theta.weights[i] * std::abs(field[i]);
                        tot += wsig * wxi * th_int;
                    }
                }
            }
        }
        hi = lo;
    }
    return tot;
}

DecayReport mode_norm_series(const SolverSetup& S, Vec2 k, const ComplexInitialData& mu0,
                             const ModeState& st, const std::vector<double>& times, int p,
                             double fit_lo, double fit_hi, bool with_tail) {
    DecayReport rep;
    for (double t : times) {
        ComplexField f = reconstruct_mode(S, k, mu0, st, t);
        rep.times.push_back(t);
        double l1 = lp_norm(f, 1), l2 = lp_norm(f, 2), li = lp_norm(f, 0);
        if (with_tail) l1 += mode_tail_norm(S, k, mu0, st, t);
        rep.l1.push_back(l1);
        rep.l2.push_back(l2);
        rep.linf.push_back(li);
    }
    const std::vector<double>& series = p == 1 ? rep.l1 : (p == 2 ? rep.l2 : rep.linf);
    fit_decay(rep, rep.times, series, fit_lo, fit_hi);
    return rep;
}

namespace {
// linear Filon moments: M0 = int_0^1 (1-u) e^{ixu} du, M1 = int_0^1 u e^{ixu} du
void filon_moments(double x, std::complex<double>& m0, std::complex<double>& m1) {
    if (std::abs(x) < 1e-4) {
        std::complex<double> ix(0.0, x);
        m0 = 0.5 + ix / 6.0 - x * x / 24.0;
        m1 = 0.5 + ix / 3.0 - x * x / 8.0;
        return;
    }
    std::complex<double> ix(0.0, x);
    std::complex<double> e = std::exp(ix);
    m1 = (e * (ix - 1.0) + 1.0) / (ix * ix);
    m0 = (e - 1.0) / ix - m1;
}

// composite axis: `panels` uniform panels with a 4-point rule each
void composite_axis(std::size_t panels, std::vector<double>& x, std::vector<double>& w) {
    const GaussRule& g = gauss_rule(4);
    x.clear();
    w.clear();
    for (std::size_t p = 0; p < panels; ++p) {
        double a = -1.0 + 2.0 * p / panels, b = a + 2.0 / panels;
        for (int q = 0; q < 4; ++q) {
            x.push_back(0.5 * (a + b) + 0.5 * (b - a) * g.x[q]);
            w.push_back(0.5 * (b - a) * g.w[q]);
        }
    }
}
}  // namespace

ContractionCertificate gk_contraction(Vec2 k, std::size_t n_theta_probes,
                                      std::size_t n_h_probes, double t_max) {
    if (k.norm() == 0.0) throw std::invalid_argument("k = (0,0) has no contraction margin");
    std::vector<double> hx, hw;
    composite_axis(6, hx, hw);  // 24 nodes for both h' and h''
    const double dtau = 1.0 / 16.0;
    ContractionCertificate cert;
    cert.k = k;
    cert.sup_l1 = 0.0;
    std::vector<std::complex<double>> A, B, W;
    for (std::size_t ip = 0; ip < n_theta_probes; ++ip) {
        double theta = kTwoPi * ip / n_theta_probes;
        for (std::size_t ih = 0; ih < n_h_probes; ++ih) {
            double h = -0.95 + 1.9 * ih / (n_h_probes - 1);
            double l1 = 0.0;
            for (std::size_t a = 0; a < hx.size(); ++a) {
                double mid = hx[a];  // h'' (theta'-substitution absorbs slope)
                double omega =
                    kTwoPi * (dot(k, direction(theta + kPi - 2.0 * std::asin(mid))) -
                              dot(k, direction(theta)));
                for (std::size_t b = 0; b < hx.size(); ++b) {
                    double hp = hx[b];
                    double U1 = support_edge(h, mid), U2 = support_edge(mid, hp);
                    double Tint = std::min(t_max, U1 + U2);
                    if (!(Tint > 0.0)) continue;
                    std::size_t N = static_cast<std::size_t>(Tint / dtau) + 1;
                    A.assign(N + 1, 0.0);
                    B.assign(N + 1, 0.0);
                    for (std::size_t j = 0; j <= N; ++j) {
                        double tau = j * dtau;
                        A[j] = collision_kernel(tau, h, mid);
                        B[j] = collision_kernel(tau, mid, hp) * std::polar(1.0, omega * tau);
                    }
                    std::complex<double> m0, m1;
                    filon_moments(omega * dtau, m0, m1);
                    std::complex<double> m1s = m1 * std::polar(1.0, -omega * dtau);
                    // |W(t_n)| integrated by trapezoid in t
                    double integral = 0.0;
                    for (std::size_t nn = 1; nn <= N; ++nn) {
                        std::complex<double> c0 = 0.0, c1 = 0.0;
                        for (std::size_t j = 0; j < nn; ++j) {
                            c0 += A[nn - j] * B[j];
                            c1 += A[nn - j - 1] * B[j + 1];
                        }
                        double wAbs = std::abs(dtau * (m0 * c0 + m1s * c1));
                        integral += (nn == N ? 0.5 : 1.0) * dtau * wAbs;
                    }
                    // rigorous remainder: int_{Tint}^{U1+U2} (Q*Q) dt
                    double tail = 0.0;
                    if (U1 + U2 > t_max) {
                        tail = gauss_integrate_split(
                            [&](double u) {
                                return collision_kernel(u, mid, hp) *
                                       (collision_kernel_cum(U1, h, mid) -
                                        collision_kernel_cum(std::max(0.0, t_max - u), h, mid));
                            },
                            0.0, std::min(U2, 1e6), {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}, 12);
                    }
                    l1 += hw[a] * hw[b] * (integral + tail);
                }
            }
            cert.sup_l1 = std::max(cert.sup_l1, l1);
        }
    }
    cert.margin = 1.0 - cert.sup_l1;
    return cert;
}

RealField assemble_torus(const std::vector<TorusMode>& modes, Vec2 x, double* imag_residue) {
    if (modes.empty()) throw std::invalid_argument("empty mode set");
    // conjugate closure: every k needs -k with the conjugate field
    for (const auto& m : modes) {
        bool found = false;
        for (const auto& m2 : modes)
            if (m2.k.x == -m.k.x && m2.k.y == -m.k.y) found = true;
        if (!found) throw std::invalid_argument("mode set is not conjugate-closed");
    }
    const PhaseGrid& g = *modes.front().field->grid;
    RealField out(g);
    double resid = 0.0;
    for (std::size_t p = 0; p < out.values.size(); ++p) {
        std::complex<double> acc = 0.0;
        for (const auto& m : modes)
            acc += m.field->values[p] * std::polar(1.0, -kTwoPi * dot(m.k, x));
        out.values[p] = acc.real();
        resid = std::max(resid, std::abs(acc.imag()));
    }
    if (imag_residue) *imag_residue = resid;
    return out;
}

std::vector<double> schwartz_pairing(const SolverSetup& S,
                                     const std::function<double(Vec2)>& eta_hat_abs,
                                     const std::function<double(Vec2)>& x_profile_hat_abs,
                                     const std::vector<std::pair<Vec2, double>>& k_quad,
                                     const ComplexInitialData& nu0,
                                     const std::vector<double>& times,
                                     double excluded_disk_bound) {
    if (k_quad.empty()) throw std::invalid_argument("empty k quadrature");
    std::vector<double> vals(times.size(), excluded_disk_bound);
    for (const auto& [k, w] : k_quad) {
        Vec2 kappa{k.x / kTwoPi, k.y / kTwoPi};
        double amp = eta_hat_abs(k) * x_profile_hat_abs(kappa);
        if (amp * w == 0.0) continue;
        ModeState st = solve_mode_trace(S, kappa, nu0);
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            ComplexField f = reconstruct_mode(S, kappa, nu0, st, times[ti]);
            double n1 = lp_norm(f, 1) + mode_tail_norm(S, kappa, nu0, st, times[ti]);
            vals[ti] += w * amp * n1 / (kTwoPi * kTwoPi);
        }
    }
    return vals;
}

}  // namespace lgkin
