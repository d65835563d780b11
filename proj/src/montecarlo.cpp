#include "lgkin/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lgkin {

namespace {
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97f4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Rng256::Rng256(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (0xD1342543DE82EF95ull * (stream + 1));
    for (int i = 0; i < 4; ++i) s[i] = splitmix64(x);
}

std::uint64_t Rng256::next() {
    std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
}

double Rng256::uniform() { return (next() >> 11) * 0x1.0p-53; }

std::pair<double, double> sample_transition(double hp, Rng256& rng, std::uint64_t* tries) {
    const double s_sup = 1.0 / (1.0 - std::abs(hp));
    std::uint64_t attempts = 0;
    constexpr std::uint64_t kCap = 1ull << 34;
    while (attempts < kCap) {
        ++attempts;
        double s = s_sup * rng.uniform();
        double h = -1.0 + 2.0 * rng.uniform();
        double u = kQScale * rng.uniform();
        if (u <= collision_kernel(s, h, hp)) {
            if (tries) *tries = attempts;
            return {s, h};
        }
    }
    if (tries) *tries = attempts;
    return {0.5 * s_sup, 0.0};  // unreachable in practice; reported by caller
}

Ensemble make_ensemble(std::size_t n, std::uint64_t seed, const std::vector<double>& cos_amp,
                       const AxisGrid& haxis) {
    Ensemble ens;
    ens.rng_seed = seed;
    ens.t_now = 0.0;
    ens.particles.resize(n);
    ens.streams.reserve(n);
    // alias-style table over h nodes: P(node l) ~ w_l int_0^inf E(s,h_l) ds
    const std::size_t nh = haxis.size();
    std::vector<double> cum(nh + 1, 0.0);
    for (std::size_t l = 0; l < nh; ++l)
        cum[l + 1] = cum[l] + haxis.weights[l] * equilibrium_s_integral(haxis.nodes[l]);
    for (double& c : cum) c /= cum[nh];
    // conditional inverse CDF of s for each node, on a fine grid
    const std::size_t ns = 512;
    std::vector<std::vector<double>> scdf(nh);
    std::vector<double> s_edge(nh);
    for (std::size_t l = 0; l < nh; ++l) {
        s_edge[l] = 1.0 / (1.0 - std::abs(haxis.nodes[l]));
        scdf[l].resize(ns + 1);
        double acc = 0.0;
        scdf[l][0] = 0.0;
        double prev = equilibrium(0.0, haxis.nodes[l]);
        for (std::size_t j = 1; j <= ns; ++j) {
            double s = s_edge[l] * j / ns;
            double cur = equilibrium(s, haxis.nodes[l]);
            acc += 0.5 * (prev + cur) * s_edge[l] / ns;
            scdf[l][j] = acc;
            prev = cur;
        }
        for (double& v : scdf[l]) v /= acc;
    }
    // inverse transform for theta ~ (1 + sum amp_m cos(m theta))/(2pi)
    auto theta_cdf = [&](double th) {
        double v = th;
        for (std::size_t m = 0; m < cos_amp.size(); ++m)
            v += cos_amp[m] * std::sin((m + 1.0) * th) / (m + 1.0);
        return v / kTwoPi;
    };
    for (std::size_t i = 0; i < n; ++i) {
        ens.streams.emplace_back(seed, i);
        Rng256& rng = ens.streams.back();
        // theta by bisection + Newton polish
        double u = rng.uniform();
        double lo = 0.0, hi = kTwoPi;
        for (int it = 0; it < 48; ++it) {
            double mid = 0.5 * (lo + hi);
            (theta_cdf(mid) < u ? lo : hi) = mid;
        }
        ens.particles[i].theta = 0.5 * (lo + hi);
        // h node by the cumulative table
        double uh = rng.uniform();
        std::size_t l =
            std::upper_bound(cum.begin(), cum.end(), uh) - cum.begin() - 1;
        if (l >= nh) l = nh - 1;
        ens.particles[i].h = haxis.nodes[l];
        // s by linear inverse of the tabulated conditional CDF
        double us = rng.uniform();
        const auto& F = scdf[l];
        std::size_t j = std::upper_bound(F.begin(), F.end(), us) - F.begin();
        if (j == 0) j = 1;
        if (j > ns) j = ns;
        double f0 = F[j - 1], f1 = F[j];
        double frac = f1 > f0 ? (us - f0) / (f1 - f0) : 0.5;
        ens.particles[i].s = s_edge[l] * (j - 1 + frac) / ns;
    }
    return ens;
}

void step_ensemble(Ensemble& ens, double until) {
    if (until < ens.t_now) throw std::invalid_argument("cannot step backwards");
    const double span = until - ens.t_now;
    for (std::size_t i = 0; i < ens.particles.size(); ++i) {
        Particle& p = ens.particles[i];
        Rng256& rng = ens.streams[i];
        double remaining = span;
        while (p.s <= remaining) {
            remaining -= p.s;
            p.theta += flight_rotation(p.h);
            if (p.theta >= kTwoPi || p.theta < 0.0)
                p.theta -= kTwoPi * std::floor(p.theta / kTwoPi);
            std::uint64_t tries = 0;
            auto [snew, hnew] = sample_transition(p.h, rng, &tries);
            if (tries >= (1ull << 34)) ++ens.rejection_caps_hit;
            p.s = snew;
            p.h = hnew;
        }
        p.s -= remaining;
    }
    ens.t_now = until;
}

RealField empirical_field(const Ensemble& ens, const PhaseGrid& grid) {
    if (ens.particles.empty()) throw std::invalid_argument("empty ensemble");
    RealField out(grid);
    const std::size_t nt = grid.theta.size(), ns = grid.s.size(), nh = grid.h.size();
    // Voronoi cell membership, quadrature-weight volumes
    auto cell = [](const std::vector<double>& nodes, double v) {
        std::size_t j =
            std::upper_bound(nodes.begin(), nodes.end(), v) - nodes.begin();
        if (j == 0) return std::size_t(0);
        if (j >= nodes.size()) return nodes.size() - 1;
        return (v - nodes[j - 1] < nodes[j] - v) ? j - 1 : j;
    };
    for (const Particle& p : ens.particles) {
        double th = p.theta - kTwoPi * std::floor(p.theta / kTwoPi);
        std::size_t it = static_cast<std::size_t>(std::llround(th / (kTwoPi / nt))) % nt;
        // long flights clamp into the boundary cell so the histogram keeps
        // the full ensemble mass
        std::size_t is = cell(grid.s.nodes, std::min(p.s, grid.s.nodes.back()));
        std::size_t ih = cell(grid.h.nodes, p.h);
        out.at(it, is, ih) += 1.0;
    }
    const double n = static_cast<double>(ens.particles.size());
    for (std::size_t it = 0; it < nt; ++it)
        for (std::size_t is = 0; is < ns; ++is)
            for (std::size_t ih = 0; ih < nh; ++ih)
                out.at(it, is, ih) /=
                    n * grid.theta.weights[it] * grid.s.weights[is] * grid.h.weights[ih];
    return out;
}

}  // namespace lgkin
