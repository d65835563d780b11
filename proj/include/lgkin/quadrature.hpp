// Gauss-Legendre rules, kink-aware composite integration and barycentric
// Lagrange weights. All rules are computed once and cached per order.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

namespace lgkin {

struct GaussRule {
    std::vector<double> x;  // nodes on (-1,1), ascending
    std::vector<double> w;  // weights, sum = 2
};

// Nodes/weights by Newton iteration on the Legendre recurrence.
inline const GaussRule& gauss_rule(int n) {
    static std::map<int, GaussRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p1 = 0, p2 = 0;
        for (int it2 = 0; it2 < 100; ++it2) {
            p1 = 1.0;
            p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
            }
            double dp = n * (x * p1 - p2) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 0; j < n; ++j) {
            double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
        }
        double dp = n * (x * p1 - p2) / (x * x - 1.0);
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

// integral of f over [a,b] with an n-point Gauss rule
template <typename F>
double gauss_integrate(F&& f, double a, double b, int n) {
    if (!(b > a)) return 0.0;
    const GaussRule& r = gauss_rule(n);
    const double m = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.w[i] * f(m + h * r.x[i]);
    return s * h;
}

// Composite Gauss over [a,b] split at the interior points in `cuts`
// (unsorted, possibly outside [a,b]; duplicates are fine).
template <typename F>
double gauss_integrate_split(F&& f, double a, double b, std::vector<double> cuts, int n) {
    if (!(b > a)) return 0.0;
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    double lo = a;
    for (double c : cuts) {
        if (c <= lo) continue;
        if (c > b) break;
        s += gauss_integrate(f, lo, c, n);
        lo = c;
    }
    if (lo < b) s += gauss_integrate(f, lo, b, n);
    return s;
}

// Barycentric weights for Lagrange interpolation through `nodes`.
inline std::vector<double> barycentric_weights(const std::vector<double>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<double> w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) w[i] /= (nodes[i] - nodes[j]);
    // rescale to avoid under/overflow at high orders
    double m = 0.0;
    for (double v : w) m = std::max(m, std::abs(v));
    for (double& v : w) v /= m;
    return w;
}

// Values of all cardinal functions L_l(x). `bw` from barycentric_weights.
inline void lagrange_cardinals(const std::vector<double>& nodes, const std::vector<double>& bw,
                               double x, std::vector<double>& out) {
    const std::size_t n = nodes.size();
    out.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (x == nodes[i]) {
            out[i] = 1.0;
            return;
        }
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = bw[i] / (x - nodes[i]);
        denom += out[i];
    }
    for (std::size_t i = 0; i < n; ++i) out[i] /= denom;
}

// Piecewise-linear (hat) cardinals on `nodes`, constant extension outside.
inline void hat_cardinals(const std::vector<double>& nodes, double x, std::vector<double>& out) {
    const std::size_t n = nodes.size();
    out.assign(n, 0.0);
    if (x <= nodes.front()) {
        out.front() = 1.0;
        return;
    }
    if (x >= nodes.back()) {
        out.back() = 1.0;
        return;
    }
    auto hi = std::upper_bound(nodes.begin(), nodes.end(), x);
    std::size_t j = static_cast<std::size_t>(hi - nodes.begin());
    double t = (x - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
    out[j - 1] = 1.0 - t;
    out[j] = t;
}

}  // namespace lgkin
