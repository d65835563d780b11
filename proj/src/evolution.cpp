#include "lgkin/evolution.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lgkin/quadrature.hpp"

namespace lgkin {

namespace {
// int_0^t int_-1^1 E(s,h) dh ds by kink-split quadrature (E is C^0 with
// breaks where the support and branch curves cross the s-range).
double equilibrium_mass_upto(double t) {
    if (t <= 0.0) return 0.0;
    std::vector<double> cuts{0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
    return gauss_integrate_split([](double s) { return equilibrium_h_marginal(s); }, 0.0, t, cuts,
                                 16);
}
}  // namespace

InitialData equilibrium_datum() {
    InitialData d;
    d.name = "equilibrium";
    d.eval = [](double, double s, double h) { return equilibrium(s, h) / kTwoPi; };
    d.total_mass = 1.0;
    d.mass_upto = [](double t) { return equilibrium_mass_upto(t); };
    d.tail_beyond = [](double s) { return equilibrium_tail_mass(s); };
    return d;
}

InitialData harmonic_datum(const std::vector<double>& ca, const std::vector<double>& sa) {
    InitialData d;
    d.name = "harmonic";
    d.eval = [ca, sa](double theta, double s, double h) {
        double f = 1.0;
        for (std::size_t m = 0; m < ca.size(); ++m) f += ca[m] * std::cos((m + 1.0) * theta);
        for (std::size_t m = 0; m < sa.size(); ++m) f += sa[m] * std::sin((m + 1.0) * theta);
        return f / kTwoPi * equilibrium(s, h);
    };
    d.total_mass = 1.0;  // oscillating harmonics integrate to zero
    d.mass_upto = [](double t) { return equilibrium_mass_upto(t); };
    d.tail_beyond = [ca, sa](double s) {
        double amp = 1.0;  // L1-safe bound factor for |mu_in|/ (1/2pi)
        for (double a : ca) amp += std::abs(a);
        for (double a : sa) amp += std::abs(a);
        return amp * equilibrium_tail_mass(s);
    };
    return d;
}

InitialData cosine_datum() {
    InitialData d = harmonic_datum({1.0}, {});
    d.name = "cosine";
    return d;
}

InitialData compact_datum(double s_hi, int theta_mode) {
    InitialData d;
    d.name = "compact";
    double norm = 0.0;  // int_0^shi bump * int (1-h^2) dh = ... normalize below
    // bump(s) = (s (s_hi - s))^2 / c on [0,s_hi]
    double c = std::pow(s_hi, 5) / 30.0;  // int_0^shi (s(s_hi-s))^2 ds = s_hi^5/30
    norm = (4.0 / 3.0) / c;               // int (1-h^2) dh = 4/3
    d.eval = [s_hi, theta_mode, c](double theta, double s, double h) {
        if (s < 0.0 || s >= s_hi) return 0.0;
        double b = s * (s_hi - s);
        double f = (1.0 + 0.5 * std::cos(theta_mode * theta)) / kTwoPi;
        return f * b * b / c * (1.0 - h * h);
    };
    (void)norm;
    d.total_mass = 4.0 / 3.0;
    d.mass_upto = [s_hi, c](double t) {
        double x = std::min(t, s_hi);
        // int_0^x (s(s_hi-s))^2 ds, expanded
        double v = s_hi * s_hi * x * x * x / 3.0 - s_hi * x * x * x * x / 2.0 +
                   x * x * x * x * x / 5.0;
        return (4.0 / 3.0) * v / c;
    };
    d.tail_beyond = [d](double s) { return d.total_mass - d.mass_upto(s); };
    return d;
}

InitialData file_datum(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open initial datum file " + path);
    std::vector<double> ca, sa;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.rfind("m,", 0) == 0) continue;
        std::istringstream ss(line);
        std::string tok;
        double v[3] = {0, 0, 0};
        int i = 0;
        while (std::getline(ss, tok, ',') && i < 3) v[i++] = std::stod(tok);
        if (i < 2) throw std::runtime_error("bad harmonic line " + std::to_string(lineno));
        std::size_t m = static_cast<std::size_t>(v[0]);
        if (m < 1 || m > 64) throw std::runtime_error("harmonic order out of range");
        if (ca.size() < m) ca.resize(m, 0.0), sa.resize(m, 0.0);
        ca[m - 1] = v[1];
        sa[m - 1] = v[2];
    }
    InitialData d = harmonic_datum(ca, sa);
    d.name = "custom-file";
    return d;
}

SolverSetup SolverSetup::make(std::size_t n_theta, std::size_t n_s, double s_max, std::size_t n_h,
                              double T, double dt, HInterp kind) {
    SolverSetup S;
    S.grid = build_phase_grid(n_theta, n_s, s_max, n_h);
    S.dt = dt;
    S.nsteps = static_cast<std::size_t>(std::llround(T / dt));
    S.weights = build_renewal_weights(S.grid.h, dt, S.nsteps, kind);
    S.shifts = build_shift_ops(S.grid.theta, S.grid.h);
    S.eq_nodes.resize(S.grid.s.size() * S.grid.h.size());
    for (std::size_t is = 0; is < S.grid.s.size(); ++is)
        for (std::size_t ih = 0; ih < S.grid.h.size(); ++ih)
            S.eq_nodes[is * S.grid.h.size() + ih] =
                equilibrium(S.grid.s.nodes[is], S.grid.h.nodes[ih]);
    return S;
}

CollisionTrace solve_trace(const SolverSetup& S, const InitialData& mu0) {
    CollisionTrace tr;
    tr.dt = S.dt;
    const auto& th = S.grid.theta.nodes;
    const auto& hh = S.grid.h.nodes;
    tr.data = march_renewal<double>(
        S.grid.theta, S.grid.h, S.weights, S.shifts, S.dt, S.nsteps,
        [&](std::size_t i, std::size_t m, double t) { return mu0.eval(th[i], t, hh[m]); },
        UnitPhase{});
    if (!tr.data.converged) throw std::runtime_error("picard iteration failed to converge");
    return tr;
}

RealField reconstruct(const SolverSetup& S, const InitialData& mu0, const CollisionTrace& tr,
                      double t, std::size_t stride) {
    const std::size_t n = static_cast<std::size_t>(std::llround(t / S.dt));
    if (n >= tr.data.trace.size())
        throw std::out_of_range("reconstruction time beyond trace horizon");
    t = n * S.dt;  // snap to the trace grid
    const std::size_t nt = S.grid.theta.size(), nh = S.grid.h.size(), ns = S.grid.s.size();
    while (stride > 1 && n % stride != 0) --stride;
    RealField out(S.grid);
    const auto& th = S.grid.theta.nodes;
    const auto& hh = S.grid.h.nodes;
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t is = 0; is < ns; ++is)
            for (std::size_t m = 0; m < nh; ++m)
                out.at(i, is, m) = mu0.eval(th[i], S.grid.s.nodes[is] + t, hh[m]);
    if (n == 0) return out;
    std::vector<double> bary = barycentric_weights(hh);
    std::vector<double> wa(nh), wb(nh);
    for (std::size_t is = 0; is < ns; ++is) {
        double s = S.grid.s.nodes[is];
        for (std::size_t m = 0; m < nh; ++m) {
            if ((s + 0.0) * (1.0 - std::abs(hh[m])) >= 1.0) continue;  // kernel gone
            for (std::size_t j = 0; j < n; j += stride) {
                std::size_t j2 = std::min(j + stride, n);
                double sig_lo = s + (n - j2) * S.dt;
                double sig_hi = s + (n - j) * S.dt;
                panel_weights(S.grid.h, bary, HInterp::Lagrange, sig_lo, sig_hi, hh[m],
                              wa.data(), wb.data());
                const auto& Gold = tr.data.shifted[j];
                const auto& Gnew = tr.data.shifted[j2];
                for (std::size_t i = 0; i < nt; ++i) {
                    double acc = 0.0;
                    const double* go = Gold.data() + i * nh;
                    const double* gn = Gnew.data() + i * nh;
                    for (std::size_t l = 0; l < nh; ++l) acc += wa[l] * go[l] + wb[l] * gn[l];
                    out.at(i, is, m) += acc;
                }
            }
        }
    }
    return out;
}

namespace {
// sum over the trace of the theta-integrated shifted values paired with
// int dh' L_l(h') E(offset + t - t_j, h'): the (s,h)-integrated memory term.
double trace_equilibrium_pairing(const SolverSetup& S, const CollisionTrace& tr, double t,
                                 double offset) {
    const std::size_t n = static_cast<std::size_t>(std::llround(t / S.dt));
    t = n * S.dt;
    const std::size_t nt = S.grid.theta.size(), nh = S.grid.h.size();
    if (n == 0) return 0.0;
    std::vector<double> bary = barycentric_weights(S.grid.h.nodes);
    std::vector<double> ew(nh), card(nh);
    const GaussRule& g = gauss_rule(6);
    double acc = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
        double tw = (j == 0 || j == n) ? 0.5 * S.dt : S.dt;
        double sig = offset + t - j * S.dt;
        std::fill(ew.begin(), ew.end(), 0.0);
        if (sig <= 0.0) {
            // E(0,.) = 1: the cardinal integrals are the axis weights
            for (std::size_t l = 0; l < nh; ++l) ew[l] = S.grid.h.weights[l];
        } else {
            std::vector<double> cuts;
            detail::kernel_h_cuts(sig, sig, 0.0, cuts);
            if (sig > 1.0) {
                cuts.push_back(1.0 - 1.0 / sig);
                cuts.push_back(1.0 / sig - 1.0);
            }
            cuts.push_back(-1.0);
            cuts.push_back(1.0);
            std::sort(cuts.begin(), cuts.end());
            double lo = -1.0;
            for (double c : cuts) {
                if (c <= lo || c > 1.0) continue;
                double mm = 0.5 * (lo + c), rr = 0.5 * (c - lo);
                if (rr > 0.0)
                    for (int q = 0; q < 6; ++q) {
                        double hp = mm + rr * g.x[q];
                        double e = equilibrium(sig, hp);
                        if (e > 0.0) {
                            lagrange_cardinals(S.grid.h.nodes, bary, hp, card);
                            for (std::size_t l = 0; l < nh; ++l)
                                ew[l] += rr * g.w[q] * e * card[l];
                        }
                    }
                lo = c;
            }
        }
        const auto& G = tr.data.shifted[j];
        double term = 0.0;
        for (std::size_t l = 0; l < nh; ++l) {
            double Theta = 0.0;
            for (std::size_t i = 0; i < nt; ++i)
                Theta += S.grid.theta.weights[i] * G[i * nh + l];
            term += ew[l] * Theta;
        }
        acc += tw * term;
    }
    return acc;
}
}  // namespace

double reconstruct_tail_mass(const SolverSetup& S, const InitialData& mu0,
                             const CollisionTrace& tr, double t) {
    t = std::llround(t / S.dt) * S.dt;
    double s_max = S.grid.s.nodes.back();
    return mu0.tail_beyond(s_max + t) + trace_equilibrium_pairing(S, tr, t, s_max);
}

double reconstruct_mass(const SolverSetup& S, const InitialData& mu0, const CollisionTrace& tr,
                        double t) {
    t = std::llround(t / S.dt) * S.dt;
    return (mu0.total_mass - mu0.mass_upto(t)) + trace_equilibrium_pairing(S, tr, t, 0.0);
}

double reconstruct_at(const SolverSetup& S, const InitialData& mu0, const CollisionTrace& tr,
                      double t, double theta, double s, double h, std::size_t stride) {
    const std::size_t n = static_cast<std::size_t>(std::llround(t / S.dt));
    if (n >= tr.data.trace.size())
        throw std::out_of_range("reconstruction time beyond trace horizon");
    t = n * S.dt;
    double v = mu0.eval(theta, s + t, h);
    if (n == 0) return v;
    while (stride > 1 && n % stride != 0) --stride;
    const std::size_t nh = S.grid.h.size();
    if (s * (1.0 - std::abs(h)) >= 1.0) return v;  // kernel support gone
    static thread_local std::vector<double> wa, wb, bary_cache, nodes_cache;
    if (nodes_cache != S.grid.h.nodes) {
        nodes_cache = S.grid.h.nodes;
        bary_cache = barycentric_weights(S.grid.h.nodes);
    }
    wa.assign(nh, 0.0);
    wb.assign(nh, 0.0);
    for (std::size_t j = 0; j < n; j += stride) {
        std::size_t j2 = std::min(j + stride, n);
        panel_weights(S.grid.h, bary_cache, HInterp::Lagrange, s + (n - j2) * S.dt,
                      s + (n - j) * S.dt, h, wa.data(), wb.data());
        for (std::size_t l = 0; l < nh; ++l) {
            if (wa[l] != 0.0)
                v += wa[l] * trig_interp_at(tr.data.trace[j], nh, l, S.grid.theta.size(),
                                            theta + flight_rotation(S.grid.h.nodes[l]));
            if (wb[l] != 0.0)
                v += wb[l] * trig_interp_at(tr.data.trace[j2], nh, l, S.grid.theta.size(),
                                            theta + flight_rotation(S.grid.h.nodes[l]));
        }
    }
    return v;
}

double reconstruct_tail_norm(const SolverSetup& S, const InitialData& mu0,
                             const CollisionTrace& tr, double t, double mass0,
                             std::size_t stride) {
    const double s_max = S.grid.s.nodes.back();
    const std::size_t n = static_cast<std::size_t>(std::llround(t / S.dt));
    t = n * S.dt;
    while (stride > 1 && n % stride != 0) --stride;
    const std::size_t nt = S.grid.theta.size(), nh = S.grid.h.size();
    std::vector<double> bary = barycentric_weights(S.grid.h.nodes);
    std::vector<double> wa(nh), wb(nh), field(nt);
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
            // xi-kink where the shifted initial profile loses support
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
                        double eq = mass0 * equilibrium(s, h) / kTwoPi;
                        for (std::size_t i = 0; i < nt; ++i)
                            field[i] = mu0.eval(S.grid.theta.nodes[i], s + t, h) - eq;
                        // collision memory: per panel the weights are
                        // theta-independent; shifted-trace values are stored
                        if (n > 0 && s * (1.0 - std::abs(h)) < 1.0) {
                            for (std::size_t j = 0; j < n; j += stride) {
                                std::size_t j2 = std::min(j + stride, n);
                                panel_weights(S.grid.h, bary, HInterp::Lagrange,
                                              s + (n - j2) * S.dt, s + (n - j) * S.dt, h,
                                              wa.data(), wb.data());
                                const auto& Go = tr.data.shifted[j];
                                const auto& Gn = tr.data.shifted[j2];
                                for (std::size_t l = 0; l < nh; ++l) {
                                    if (wa[l] != 0.0)
                                        for (std::size_t i = 0; i < nt; ++i)
                                            field[i] += wa[l] * Go[i * nh + l];
                                    if (wb[l] != 0.0)
                                        for (std::size_t i = 0; i < nt; ++i)
                                            field[i] += wb[l] * Gn[i * nh + l];
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

double equilibrium_distance(const SolverSetup& S, const RealField& mu_t, double mass0, int p) {
    RealField diff = mu_t;
    const std::size_t nh = S.grid.h.size();
    for (std::size_t i = 0; i < S.grid.theta.size(); ++i)
        for (std::size_t is = 0; is < S.grid.s.size(); ++is)
            for (std::size_t m = 0; m < nh; ++m)
                diff.at(i, is, m) -= mass0 * S.eq_nodes[is * nh + m] / kTwoPi;
    return lp_norm(diff, p);
}

void fit_decay(DecayReport& rep, const std::vector<double>& ts, const std::vector<double>& norms,
               double lo, double hi) {
    rep.window_lo = lo;
    rep.window_hi = hi;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < lo || ts[i] > hi) continue;
        if (!(norms[i] > 0.0)) throw std::invalid_argument("norms must be positive in window");
        x.push_back(std::log(ts[i]));
        y.push_back(std::log(norms[i]));
    }
    if (x.size() < 4) throw std::invalid_argument("need >= 4 samples in fit window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double nn = static_cast<double>(x.size());
    double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    double icpt = (sy - slope * sx) / nn;
    double res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (icpt + slope * x[i]);
        res += r * r;
    }
    rep.fitted_exponent = slope;
    rep.fitted_constant = std::exp(icpt);
    rep.fit_residual = std::sqrt(res / nn);
}

}  // namespace lgkin
