#include "lgkin/grid.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "lgkin/quadrature.hpp"

namespace lgkin {

AxisGrid make_periodic_axis(std::size_t n) {
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("periodic axis needs even n >= 4");
    AxisGrid a;
    a.kind = AxisKind::UniformPeriodic;
    a.nodes.resize(n);
    a.weights.assign(n, kTwoPi / n);
    for (std::size_t i = 0; i < n; ++i) a.nodes[i] = kTwoPi * i / n;
    return a;
}

AxisGrid make_gauss_axis(std::size_t n, double lo, double hi) {
    if (n < 2) throw std::invalid_argument("gauss axis needs n >= 2");
    const GaussRule& g = gauss_rule(static_cast<int>(n));
    AxisGrid a;
    a.kind = AxisKind::GaussLegendre;
    a.nodes.resize(n);
    a.weights.resize(n);
    double m = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < n; ++i) {
        a.nodes[i] = m + r * g.x[i];
        a.weights[i] = r * g.w[i];
    }
    return a;
}

AxisGrid make_graded_s_axis(std::size_t n, double s_max) {
    if (n < 2) throw std::invalid_argument("s axis needs n >= 2");
    if (!(s_max > 1.0)) throw std::invalid_argument("s_max must exceed 1");
    AxisGrid a;
    a.kind = AxisKind::Graded;
    a.nodes.resize(n);
    if (s_max <= 2.0) {
        for (std::size_t i = 0; i < n; ++i) a.nodes[i] = s_max * i / (n - 1.0);
    } else {
        std::size_t m = n / 2;  // uniform block on [0,2)
        for (std::size_t i = 0; i < m; ++i) a.nodes[i] = 2.0 * i / m;
        std::size_t k = n - m;
        for (std::size_t j = 1; j <= k; ++j)
            a.nodes[m + j - 1] = 2.0 * std::pow(s_max / 2.0, static_cast<double>(j) / k);
    }
    a.weights.assign(n, 0.0);
    a.weights[0] = 0.5 * (a.nodes[1] - a.nodes[0]);
    a.weights[n - 1] = 0.5 * (a.nodes[n - 1] - a.nodes[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) a.weights[i] = 0.5 * (a.nodes[i + 1] - a.nodes[i - 1]);
    return a;
}

PhaseGrid build_phase_grid(std::size_t n_theta, std::size_t n_s, double s_max, std::size_t n_h) {
    PhaseGrid g;
    g.theta = make_periodic_axis(n_theta);
    g.s = make_graded_s_axis(n_s, s_max);
    g.h = make_gauss_axis(n_h, -1.0, 1.0);
    return g;
}

double tail_estimate(double s_cut) { return equilibrium_tail_mass(s_cut); }

double trig_cardinal(std::size_t n, double x) {
    // (1/n) [1 + 2 sum_{m<n/2} cos(m x) + cos((n/2) x)] for even n
    double v = 1.0;
    std::size_t half = n / 2;
    for (std::size_t m = 1; m < half; ++m) v += 2.0 * std::cos(m * x);
    if (n % 2 == 0)
        v += std::cos(half * x);
    else
        v += 2.0 * std::cos(half * x);
    return v / n;
}

std::vector<double> trig_shift_matrix(std::size_t n, double delta) {
    std::vector<double> S(n * n);
    // row i samples at theta_i + delta; entry (i,j) = D(theta_i + delta - theta_j)
    std::vector<double> card(n);
    for (std::size_t d = 0; d < n; ++d)
        card[d] = trig_cardinal(n, delta + kTwoPi * static_cast<double>(d) / n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) S[i * n + j] = card[(i + n - j) % n];
    return S;
}

namespace {
template <typename T>
void field_csv(const std::string& path, const PhaseGrid& g, const std::vector<T>& vals) {
    std::string out = "theta,s,h,re,im\n";
    char buf[160];
    std::size_t p = 0;
    for (std::size_t it = 0; it < g.theta.size(); ++it)
        for (std::size_t is = 0; is < g.s.size(); ++is)
            for (std::size_t ih = 0; ih < g.h.size(); ++ih, ++p) {
                std::complex<double> z(vals[p]);
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                              g.theta.nodes[it], g.s.nodes[is], g.h.nodes[ih], z.real(), z.imag());
                out += buf;
            }
    atomic_write_text(path, out);
}

void axis_bin(std::ofstream& os, const AxisGrid& a) {
    os.write(reinterpret_cast<const char*>(a.nodes.data()),
             static_cast<std::streamsize>(a.nodes.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(a.weights.data()),
             static_cast<std::streamsize>(a.weights.size() * sizeof(double)));
}

template <typename T>
void field_bin(const std::string& path, const PhaseGrid& g, const std::vector<T>& vals,
               bool complex_valued) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + tmp);
        os.write("LGKF0001", 8);
        std::uint32_t hdr[4] = {static_cast<std::uint32_t>(g.theta.size()),
                                static_cast<std::uint32_t>(g.s.size()),
                                static_cast<std::uint32_t>(g.h.size()),
                                complex_valued ? 2u : 1u};
        os.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
        axis_bin(os, g.theta);
        axis_bin(os, g.s);
        axis_bin(os, g.h);
        for (const T& v : vals) {
            std::complex<double> z(v);
            double re = z.real(), im = z.imag();
            os.write(reinterpret_cast<const char*>(&re), sizeof re);
            if (complex_valued) os.write(reinterpret_cast<const char*>(&im), sizeof im);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed for " + path);
}
}  // namespace

void write_field_csv(const std::string& path, const ComplexField& f) {
    field_csv(path, *f.grid, f.values);
}
void write_field_csv(const std::string& path, const RealField& f) {
    field_csv(path, *f.grid, f.values);
}
void write_field_bin(const std::string& path, const ComplexField& f) {
    field_bin(path, *f.grid, f.values, true);
}
void write_field_bin(const std::string& path, const RealField& f) {
    field_bin(path, *f.grid, f.values, false);
}

LoadedField read_field_bin(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, "LGKF0001", 8) != 0) throw std::runtime_error("bad magic in " + path);
    std::uint32_t hdr[4];
    is.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    LoadedField out;
    out.complex_valued = hdr[3] == 2;
    auto read_axis = [&](std::size_t n) {
        AxisGrid a;
        a.nodes.resize(n);
        a.weights.resize(n);
        is.read(reinterpret_cast<char*>(a.nodes.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        is.read(reinterpret_cast<char*>(a.weights.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        return a;
    };
    out.grid.theta = read_axis(hdr[0]);
    out.grid.s = read_axis(hdr[1]);
    out.grid.h = read_axis(hdr[2]);
    std::size_t n = out.grid.size();
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double re = 0, im = 0;
        is.read(reinterpret_cast<char*>(&re), sizeof re);
        if (out.complex_valued) is.read(reinterpret_cast<char*>(&im), sizeof im);
        out.values[i] = {re, im};
    }
    if (!is) throw std::runtime_error("truncated field file " + path);
    return out;
}

void atomic_write_text(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + tmp);
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed for " + path);
}

}  // namespace lgkin
