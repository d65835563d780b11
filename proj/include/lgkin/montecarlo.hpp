// Monte Carlo simulation of the limiting Markov renewal flight, used as an
// independent oracle for the transport solvers. Sampling is exact (rejection
// against the kernel's constant bound); every particle owns a counter-derived
// random stream so runs are reproducible regardless of scheduling.
#pragma once

#include <cstdint>
#include <vector>

#include "lgkin/evolution.hpp"

namespace lgkin {

// xoshiro256** seeded by splitmix64 from (seed, stream index)
struct Rng256 {
    std::uint64_t s[4];
    Rng256(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t next();
    double uniform();  // [0,1)
};

struct Particle {
    double theta = 0.0;  // velocity angle
    double s = 0.0;      // time to the next collision
    double h = 0.0;      // impact parameter of the next collision
};

struct Ensemble {
    std::vector<Particle> particles;
    std::vector<Rng256> streams;
    std::uint64_t rng_seed = 0;
    double t_now = 0.0;
    std::uint64_t rejection_caps_hit = 0;
};

/// Draw (s,h) ~ Q(.,.|hp) by rejection against the constant bound 6/pi^2 on
/// the support rectangle [0, 1/(1-|hp|)] x [-1,1]. `tries` reports the
/// attempt count when non-null.
std::pair<double, double> sample_transition(double hp, Rng256& rng, std::uint64_t* tries = nullptr);

/// Initial ensemble: theta ~ mu_in (1 + sum amp_m cos(m theta))/(2pi) via
/// inverse transform, (s,h) ~ E via an alias table over the h-axis nodes and
/// tabulated conditional inverse CDFs in s.
Ensemble make_ensemble(std::size_t n, std::uint64_t seed, const std::vector<double>& cos_amp,
                       const AxisGrid& haxis);

/// Advance each particle to `until`: free flight, then collisions with the
/// angle update theta += pi - 2 asin(h) and a fresh (s,h) draw.
void step_ensemble(Ensemble& ens, double until);

/// Histogram on the grid with quadrature-consistent bin volumes: cell value
/// count / (N * w_theta w_s w_h), so integrate(field) = 1 exactly.
RealField empirical_field(const Ensemble& ens, const PhaseGrid& grid);

}  // namespace lgkin
