#include "lgkin/varphi.hpp"

#include "lgkin/quadrature.hpp"

namespace lgkin {

VarphiSlice solve_varphi(const SolverSetup& S, double hp) {
    const std::size_t nt = S.grid.theta.size(), nh = S.grid.h.size();
    const std::size_t N = S.nsteps;
    // source f(theta,t,h|hp) - E(t,h)/(2pi) tabulated up front
    std::vector<double> src((N + 1) * nt * nh);
    for (std::size_t n = 0; n <= N; ++n) {
        double t = n * S.dt;
        for (std::size_t i = 0; i < nt; ++i)
            for (std::size_t m = 0; m < nh; ++m)
                src[(n * nt + i) * nh + m] =
                    angular_pair_kernel(S.grid.theta.nodes[i], t, S.grid.h.nodes[m], hp) -
                    equilibrium(t, S.grid.h.nodes[m]) / kTwoPi;
    }
    VarphiSlice out;
    out.hp = hp;
    out.dt = S.dt;
    out.data = march_renewal<double>(
        S.grid.theta, S.grid.h, S.weights, S.shifts, S.dt, N,
        [&](std::size_t i, std::size_t m, double t) {
            std::size_t n = static_cast<std::size_t>(std::llround(t / S.dt));
            return src[(n * nt + i) * nh + m];
        },
        UnitPhase{});
    if (!out.data.converged) throw std::runtime_error("varphi iteration failed to converge");
    return out;
}

namespace {
struct PhaseTable {
    std::size_t nt = 0;
    std::vector<std::complex<double>> p;  // [delta][theta]
    std::complex<double> operator()(std::size_t delta, std::size_t i) const {
        return p[delta * nt + i];
    }
};
PhaseTable make_phase_table(const AxisGrid& theta, Vec2 k, double dt, std::size_t N) {
    PhaseTable P;
    P.nt = theta.size();
    P.p.resize((N + 1) * P.nt);
    for (std::size_t i = 0; i < P.nt; ++i) {
        double rate = kTwoPi * dot(k, direction(theta.nodes[i]));
        for (std::size_t d = 0; d <= N; ++d) P.p[d * P.nt + i] = std::polar(1.0, rate * d * dt);
    }
    return P;
}
}  // namespace

VarphiKSlice solve_varphi_k(const SolverSetup& S, Vec2 k, double theta_p, double hp) {
    if (k.norm() == 0.0) throw std::invalid_argument("k = (0,0): use solve_varphi");
    const std::size_t nt = S.grid.theta.size(), nh = S.grid.h.size();
    const std::size_t N = S.nsteps;
    std::vector<std::complex<double>> src((N + 1) * nt * nh);
    for (std::size_t n = 0; n <= N; ++n) {
        double t = n * S.dt;
        for (std::size_t i = 0; i < nt; ++i)
            for (std::size_t m = 0; m < nh; ++m)
                src[(n * nt + i) * nh + m] =
                    mode_pair_kernel(k, S.grid.theta.nodes[i], t, S.grid.h.nodes[m], theta_p, hp);
    }
    PhaseTable P = make_phase_table(S.grid.theta, k, S.dt, N);
    VarphiKSlice out;
    out.k = k;
    out.theta_p = theta_p;
    out.hp = hp;
    out.dt = S.dt;
    out.data = march_renewal<std::complex<double>>(
        S.grid.theta, S.grid.h, S.weights, S.shifts, S.dt, N,
        [&](std::size_t i, std::size_t m, double t) {
            std::size_t n = static_cast<std::size_t>(std::llround(t / S.dt));
            return src[(n * nt + i) * nh + m];
        },
        [&](std::size_t d, std::size_t i) { return P(d, i); });
    if (!out.data.converged) throw std::runtime_error("varphi^k iteration failed to converge");
    return out;
}

double sup_weighted_decay(const VarphiSlice& slice, double T) {
    double best = 0.0;
    for (std::size_t n = 0; n < slice.data.trace.size(); ++n) {
        double t = n * slice.dt;
        if (t > T) break;
        for (double v : slice.data.trace[n]) best = std::max(best, (t + 1.0) * std::abs(v));
    }
    return best;
}

double sup_weighted_decay(const VarphiKSlice& slice, double T) {
    double best = 0.0;
    for (std::size_t n = 0; n < slice.data.trace.size(); ++n) {
        double t = n * slice.dt;
        if (t > T) break;
        for (auto v : slice.data.trace[n]) best = std::max(best, (t + 1.0) * std::abs(v));
    }
    return best;
}

double varphi_weighted_identity_lhs(const SolverSetup& S, const VarphiSlice& slice, double T) {
    const std::size_t nt = S.grid.theta.size(), nh = S.grid.h.size();
    const std::size_t n = static_cast<std::size_t>(std::llround(T / S.dt));
    double acc = 0.0;
    std::vector<double> e2row(nh);
    for (std::size_t j = 0; j <= n; ++j) {
        double tw = (j == 0 || j == n) ? 0.5 * S.dt : S.dt;
        for (std::size_t m = 0; m < nh; ++m)
            e2row[m] = equilibrium2_point(T - j * S.dt, S.grid.h.nodes[m]);
        const auto& row = slice.data.trace[j];
        for (std::size_t i = 0; i < nt; ++i)
            for (std::size_t m = 0; m < nh; ++m)
                acc += tw * S.grid.theta.weights[i] * S.grid.h.weights[m] * row[i * nh + m] *
                       e2row[m];
    }
    return acc;
}

ContractionScan scan_contraction(const std::vector<double>& c_values, const EnTable& e2,
                                 std::size_t n_h_probes) {
    ContractionScan scan;
    scan.c_values = c_values;
    scan.d_values.assign(c_values.size(), 0.0);
    const std::size_t nh = e2.h.size();
    const double Td = e2.nt * e2.dt;
    const std::size_t tstride = std::max<std::size_t>(1, std::llround(0.05 / e2.dt));
    const double c_tail = tail_mass_E2(Td);
    // Gauss-Chebyshev nodes in h'' absorb dtheta = 2 dh''/sqrt(1-h''^2)
    const int ngc = 72;
    std::vector<double> sums(c_values.size());
    for (std::size_t pi = 0; pi < n_h_probes; ++pi) {
        std::size_t a = (pi * (nh - 1)) / (n_h_probes - 1);
        double h = e2.h.nodes[a];
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t n = 0; n <= e2.nt; n += tstride) {
            double t = n * e2.dt;
            double tw = (n == 0 || n + tstride > e2.nt) ? 0.5 * tstride * e2.dt
                                                        : tstride * e2.dt;
            for (std::size_t l = 0; l < nh; ++l) {
                double hp = e2.h.nodes[l];
                double w0 = tw * e2.h.weights[l] * (2.0 * kPi / ngc);
                double e2v = e2.at(n, l) / kTwoPi;
                for (int q = 0; q < ngc; ++q) {
                    double mid = std::cos(kPi * (2 * q + 1) / (2.0 * ngc));
                    double f = 0.5 * std::sqrt(1.0 - mid * mid) *
                               two_collision_time_integral(t, h, mid, hp);
                    for (std::size_t ci = 0; ci < c_values.size(); ++ci)
                        sums[ci] += w0 * std::abs(f - c_values[ci] * e2v);
                }
            }
        }
        for (std::size_t ci = 0; ci < c_values.size(); ++ci) {
            double d = sums[ci] + e2.at(e2.nt, a) + c_values[ci] * c_tail;
            scan.d_values[ci] = std::max(scan.d_values[ci], d);
        }
    }
    scan.best_d = 2.0;
    for (std::size_t ci = 0; ci < c_values.size(); ++ci) {
        if (c_values[ci] == 0.0) scan.d0 = scan.d_values[ci];
        if (scan.d_values[ci] < scan.best_d) {
            scan.best_d = scan.d_values[ci];
            scan.best_c = c_values[ci];
        }
    }
    return scan;
}

std::vector<double> varphi_trace_representation(const SolverSetup& S,
                                                const std::vector<VarphiSlice>& slices,
                                                const InitialData& mu0_in, double t) {
    const std::size_t nt = S.grid.theta.size(), nh = S.grid.h.size();
    const std::size_t n = static_cast<std::size_t>(std::llround(t / S.dt));
    if (slices.size() != nh) throw std::invalid_argument("need one varphi slice per h node");
    // all four terms are linear in the datum and the stationary component
    // maps to the constant trace exactly, so evaluate them on the mean-free
    // part and add the constant back
    const double mass0 = mu0_in.total_mass;
    InitialData mu0;
    mu0.name = mu0_in.name;
    {
        auto base = mu0_in.eval;
        mu0.eval = [base, mass0](double th, double s, double h) {
            return base(th, s, h) - mass0 * equilibrium(s, h) / kTwoPi;
        };
        auto base_up = mu0_in.mass_upto;
        InitialData eq = equilibrium_datum();
        auto eq_up = eq.mass_upto;
        mu0.mass_upto = [base_up, eq_up, mass0](double tt) {
            return base_up(tt) - mass0 * eq_up(tt);
        };
        mu0.total_mass = 0.0;
    }
    std::vector<double> out(nt * nh, mass0 / kTwoPi);
    // first collision
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t m = 0; m < nh; ++m)
            out[i * nh + m] += mu0.eval(S.grid.theta.nodes[i], t, S.grid.h.nodes[m]);
    // second collision: kernel moments against the shifted datum trajectory
    std::vector<double> Gdat((n + 1) * nt * nh);
    for (std::size_t j = 0; j <= n; ++j)
        for (std::size_t i = 0; i < nt; ++i)
            for (std::size_t l = 0; l < nh; ++l)
                Gdat[(j * nt + i) * nh + l] =
                    mu0.eval(S.grid.theta.nodes[i] + flight_rotation(S.grid.h.nodes[l]),
                             j * S.dt, S.grid.h.nodes[l]);
    for (std::size_t d = 1; d <= std::min(n, S.weights.depth); ++d) {
        const double* A = S.weights.a_at(d);
        const double* B = S.weights.b_at(d);
        const double* Go = Gdat.data() + (n - d) * nt * nh;
        const double* Gn = Gdat.data() + (n - d + 1) * nt * nh;
        for (std::size_t i = 0; i < nt; ++i)
            for (std::size_t m = 0; m < nh; ++m) {
                if (d > S.weights.depth_of_m[m]) continue;
                const double* wa = A + m * nh;
                const double* wb = B + m * nh;
                double acc = 0.0;
                for (std::size_t l = 0; l < nh; ++l)
                    acc += wa[l] * Go[i * nh + l] + wb[l] * Gn[i * nh + l];
                out[i * nh + m] += acc;
            }
    }
    // running mean
    double mean = mu0.mass_upto(t) / kTwoPi;
    for (double& v : out) v += mean;
    // phi convolution: theta' on the grid (rectangle rule, spectrally accurate
    // for band-limited data), trapezoid in t', Gauss in h'
    for (std::size_t l = 0; l < nh; ++l) {
        double gw = S.grid.h.weights[l];
        for (std::size_t j = 0; j <= n; ++j) {
            double tw = (j == 0 || j == n) ? 0.5 * S.dt : S.dt;
            const auto& phi_row = slices[l].data.trace[n - j];
            for (std::size_t ip = 0; ip < nt; ++ip) {
                double mu = mu0.eval(S.grid.theta.nodes[ip], j * S.dt, S.grid.h.nodes[l]);
                if (mu == 0.0) continue;
                double w = gw * tw * (kTwoPi / nt) * mu;
                for (std::size_t i = 0; i < nt; ++i) {
                    std::size_t idiff = (i + nt - ip) % nt;
                    for (std::size_t m = 0; m < nh; ++m)
                        out[i * nh + m] += w * phi_row[idiff * nh + m];
                }
            }
        }
    }
    return out;
}

std::vector<std::complex<double>> mode_trace_representation(
    const SolverSetup& S, Vec2 k, const std::vector<VarphiKSlice>& slices, std::size_t ntq,
    const ComplexInitialData& mu0, double t) {
    const std::size_t nt = S.grid.theta.size(), nh = S.grid.h.size();
    const std::size_t n = static_cast<std::size_t>(std::llround(t / S.dt));
    if (slices.size() != ntq * nh)
        throw std::invalid_argument("need ntq x nh varphi^k slices");
    std::vector<std::complex<double>> out(nt * nh);
    // first collision with free-flight phase
    for (std::size_t i = 0; i < nt; ++i) {
        double th = S.grid.theta.nodes[i];
        std::complex<double> ph = std::polar(1.0, kTwoPi * t * dot(k, direction(th)));
        for (std::size_t m = 0; m < nh; ++m)
            out[i * nh + m] = ph * mu0.eval(th, t, S.grid.h.nodes[m]);
    }
    // second collision with both flight phases
    std::vector<std::complex<double>> Gdat((n + 1) * nt * nh);
    for (std::size_t j = 0; j <= n; ++j)
        for (std::size_t i = 0; i < nt; ++i) {
            double th = S.grid.theta.nodes[i];
            for (std::size_t l = 0; l < nh; ++l) {
                double ths = th + flight_rotation(S.grid.h.nodes[l]);
                Gdat[(j * nt + i) * nh + l] =
                    std::polar(1.0, kTwoPi * (j * S.dt) * dot(k, direction(ths))) *
                    mu0.eval(ths, j * S.dt, S.grid.h.nodes[l]);
            }
        }
    for (std::size_t d = 1; d <= std::min(n, S.weights.depth); ++d) {
        const double* A = S.weights.a_at(d);
        const double* B = S.weights.b_at(d);
        const std::complex<double>* Go = Gdat.data() + (n - d) * nt * nh;
        const std::complex<double>* Gn = Gdat.data() + (n - d + 1) * nt * nh;
        for (std::size_t i = 0; i < nt; ++i) {
            std::complex<double> ph =
                std::polar(1.0, kTwoPi * (d * S.dt) * dot(k, direction(S.grid.theta.nodes[i])));
            for (std::size_t m = 0; m < nh; ++m) {
                if (d > S.weights.depth_of_m[m]) continue;
                const double* wa = A + m * nh;
                const double* wb = B + m * nh;
                std::complex<double> acc = 0.0;
                for (std::size_t l = 0; l < nh; ++l)
                    acc += wa[l] * Go[i * nh + l] + wb[l] * Gn[i * nh + l];
                out[i * nh + m] += ph * acc;
            }
        }
    }
    // phi^k convolution over the (theta',h') probe rule
    for (std::size_t iq = 0; iq < ntq; ++iq) {
        double thp = kTwoPi * iq / ntq;
        double wth = kTwoPi / ntq;
        for (std::size_t lq = 0; lq < nh; ++lq) {
            const VarphiKSlice& sl = slices[iq * nh + lq];
            double gw = S.grid.h.weights[lq];
            for (std::size_t j = 0; j <= n; ++j) {
                double tw = (j == 0 || j == n) ? 0.5 * S.dt : S.dt;
                std::complex<double> mu =
                    std::polar(1.0, kTwoPi * (j * S.dt) * dot(k, direction(thp))) *
                    mu0.eval(thp, j * S.dt, S.grid.h.nodes[lq]);
                if (std::abs(mu) == 0.0) continue;
                std::complex<double> w = wth * gw * tw * mu;
                const auto& row = sl.data.trace[n - j];
                for (std::size_t i = 0; i < nt; ++i)
                    for (std::size_t m = 0; m < nh; ++m) out[i * nh + m] += w * row[i * nh + m];
            }
        }
    }
    return out;
}

}  // namespace lgkin
