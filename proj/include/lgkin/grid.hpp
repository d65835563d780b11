// Tensor grids over (theta, s, h), field containers with quadrature-weighted
// norms, trigonometric interpolation on the periodic axis, and field
// serialization (CSV and a compact binary dump).
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgkin/kernels.hpp"

namespace lgkin {

enum class AxisKind { UniformPeriodic, GaussLegendre, Graded };

struct AxisGrid {
    std::vector<double> nodes;    // strictly increasing
    std::vector<double> weights;  // positive quadrature weights
    AxisKind kind = AxisKind::Graded;
    std::size_t size() const { return nodes.size(); }
};

/// Uniform periodic axis on [0, 2pi): n nodes, weights 2pi/n. n >= 4, even.
AxisGrid make_periodic_axis(std::size_t n);

/// Gauss-Legendre axis on (lo, hi); nodes strictly inside the interval.
AxisGrid make_gauss_axis(std::size_t n, double lo, double hi);

/// Graded axis on [0, s_max]: node 0 always present, uniform spacing on
/// [0, min(2, s_max)], geometric stretching beyond; trapezoid weights.
AxisGrid make_graded_s_axis(std::size_t n, double s_max);

struct PhaseGrid {
    AxisGrid theta, s, h;
    std::size_t size() const { return theta.size() * s.size() * h.size(); }
    std::size_t idx(std::size_t it, std::size_t is, std::size_t ih) const {
        return (it * s.size() + is) * h.size() + ih;
    }
};

/// theta uniform-periodic, s graded on [0,s_max], h Gauss-Legendre on (-1,1).
/// Requires n_theta >= 4 and even, s_max > 1, n_s >= 2, n_h >= 2.
PhaseGrid build_phase_grid(std::size_t n_theta, std::size_t n_s, double s_max, std::size_t n_h);

template <typename T>
struct PhaseField {
    const PhaseGrid* grid = nullptr;
    std::vector<T> values;

    PhaseField() = default;
    explicit PhaseField(const PhaseGrid& g) : grid(&g), values(g.size(), T{}) {}
    T& at(std::size_t it, std::size_t is, std::size_t ih) { return values[grid->idx(it, is, ih)]; }
    const T& at(std::size_t it, std::size_t is, std::size_t ih) const {
        return values[grid->idx(it, is, ih)];
    }
};

using RealField = PhaseField<double>;
using ComplexField = PhaseField<std::complex<double>>;

/// Tensor-product quadrature of the field over theta x s x h.
template <typename T>
T integrate(const PhaseField<T>& f) {
    const PhaseGrid& g = *f.grid;
    T tot{};
    std::size_t p = 0;
    for (std::size_t it = 0; it < g.theta.size(); ++it)
        for (std::size_t is = 0; is < g.s.size(); ++is) {
            double w = g.theta.weights[it] * g.s.weights[is];
            for (std::size_t ih = 0; ih < g.h.size(); ++ih, ++p)
                tot += w * g.h.weights[ih] * f.values[p];
        }
    return tot;
}

/// Weighted L^p norm, p in {1, 2} or p = 0 for the sup norm.
template <typename T>
double lp_norm(const PhaseField<T>& f, int p) {
    const PhaseGrid& g = *f.grid;
    double tot = 0.0;
    std::size_t q = 0;
    for (std::size_t it = 0; it < g.theta.size(); ++it)
        for (std::size_t is = 0; is < g.s.size(); ++is) {
            double w = g.theta.weights[it] * g.s.weights[is];
            for (std::size_t ih = 0; ih < g.h.size(); ++ih, ++q) {
                double a = std::abs(f.values[q]);
                if (p == 0)
                    tot = std::max(tot, a);
                else
                    tot += w * g.h.weights[ih] * (p == 1 ? a : a * a);
            }
        }
    return p == 2 ? std::sqrt(tot) : tot;
}

/// Equilibrium mass beyond s_cut (semi-analytic; certifies s-truncation).
double tail_estimate(double s_cut);

// ---------------------------------------------------------------------------
// Trigonometric interpolation on the uniform periodic axis.
// ---------------------------------------------------------------------------

/// Cardinal value D_n(x): weight of node j when evaluating at theta_j + x.
/// Even n uses the cosine form with a pure-cosine Nyquist mode (real, exact
/// for band-limited data up to mode n/2-1).
double trig_cardinal(std::size_t n, double x);

/// Dense n x n matrix S with (S f)(theta_i) = f(theta_i + delta).
std::vector<double> trig_shift_matrix(std::size_t n, double delta);

/// Interpolate periodic nodal values at angle theta.
template <typename T>
T trig_interp(const std::vector<T>& nodal, double theta) {
    std::size_t n = nodal.size();
    T v{};
    for (std::size_t j = 0; j < n; ++j) v += trig_cardinal(n, theta - kTwoPi * j / n) * nodal[j];
    return v;
}

/// Same, for one column of a flat [theta][column] array.
template <typename T>
T trig_interp_at(const std::vector<T>& flat, std::size_t ncols, std::size_t col,
                 std::size_t ntheta, double theta) {
    T v{};
    for (std::size_t j = 0; j < ntheta; ++j)
        v += trig_cardinal(ntheta, theta - kTwoPi * j / ntheta) * flat[j * ncols + col];
    return v;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// CSV snapshot with columns theta,s,h,re,im.
void write_field_csv(const std::string& path, const ComplexField& f);
void write_field_csv(const std::string& path, const RealField& f);

/// Compact binary dump: header "LGKF0001", u32 sizes (n_theta,n_s,n_h,kind),
/// axis nodes+weights as f64, then row-major f64 values (re,im interleaved
/// for complex). Reader reconstructs grid and values.
void write_field_bin(const std::string& path, const ComplexField& f);
void write_field_bin(const std::string& path, const RealField& f);
struct LoadedField {
    PhaseGrid grid;
    std::vector<std::complex<double>> values;
    bool complex_valued = false;
};
LoadedField read_field_bin(const std::string& path);

/// Write a whole file atomically (temp file in the same directory + rename).
void atomic_write_text(const std::string& path, const std::string& content);

}  // namespace lgkin
