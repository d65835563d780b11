// The memory kernels of the trace representation: phi (real, per conditioning
// impact parameter) and phi^k (complex, additionally per conditioning angle),
// their fixed-point Volterra equations, the contraction constant
// d(c) = sup_h || f - (c/2pi) E^(2) ||_L1, and the representation formulas
// that express the collision trace as explicit functionals of the datum.
#pragma once

#include "lgkin/evolution.hpp"
#include "lgkin/iterated.hpp"

namespace lgkin {

// phi(theta, t, h | hp) for one fixed hp, on the solver's (theta,h) axes.
struct VarphiSlice {
    double hp = 0.0;
    double dt = 0.0;
    MarchOutput<double> data;
};

// phi^k(theta, t, h | theta_p, hp) for one fixed (theta_p, hp).
struct VarphiKSlice {
    Vec2 k;
    double theta_p = 0.0, hp = 0.0;
    double dt = 0.0;
    MarchOutput<std::complex<double>> data;
};

/// Solve phi = f - E/(2pi) + Q-convolution of phi for the slice at hp.
VarphiSlice solve_varphi(const SolverSetup& S, double hp);

/// Solve phi^k = g^k + oscillatory Q-convolution of phi^k; requires k != 0.
VarphiKSlice solve_varphi_k(const SolverSetup& S, Vec2 k, double theta_p, double hp);

/// sup over the stored slice (restricted to t <= T) of (t+1)|phi|.
double sup_weighted_decay(const VarphiSlice& slice, double T);
double sup_weighted_decay(const VarphiKSlice& slice, double T);

/// Left side of the weighted identity
///   int phi(theta,t',h|hp) E^(2)(T-t',h) dtheta dt' dh
/// evaluated on the slice's grid; the right side is
///   tail2(T) - E^(2)(T,hp) - E^(3)(T,hp).
double varphi_weighted_identity_lhs(const SolverSetup& S, const VarphiSlice& slice, double T);

struct ContractionScan {
    std::vector<double> c_values, d_values;  // d = upper bound incl. tails
    double d0 = 0.0;                         // d at c = 0 (should be 1)
    double best_c = 0.0, best_d = 1.0;
};

/// Scan d(c) = sup over probe h of ||f(.,.,h|.) - (c/2pi) E^(2)||_L1 with the
/// time axis truncated at the E^(2)-table horizon and tail bounds added.
ContractionScan scan_contraction(const std::vector<double>& c_values, const EnTable& e2,
                                 std::size_t n_h_probes);

/// Trace at time t via the four-term representation: first collision, second
/// collision, running mean, and the phi-convolution. `slices` holds one
/// varphi slice per h-axis node.
std::vector<double> varphi_trace_representation(const SolverSetup& S,
                                                const std::vector<VarphiSlice>& slices,
                                                const InitialData& mu0, double t);

/// Mode trace at time t via the three-term representation; `slices` indexed
/// [iq * nh_q + lq] over a (theta', h') probe quadrature given by a periodic
/// theta'-rule of size ntq and the h-axis nodes.
std::vector<std::complex<double>> mode_trace_representation(
    const SolverSetup& S, Vec2 k, const std::vector<VarphiKSlice>& slices, std::size_t ntq,
    const ComplexInitialData& mu0, double t);

}  // namespace lgkin
