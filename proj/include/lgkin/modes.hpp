// Fourier-mode transport: evolution of mu_t^k(theta,s,h) with the oscillatory
// free-flight phase, mode-norm decay series, the contraction certificate for
// the two-collision mode kernel g^k, torus synthesis from a mode set, and the
// Schwartz-pairing bound used for the R^2 weak-decay demonstration.
#pragma once

#include "lgkin/evolution.hpp"

namespace lgkin {

struct ModeState {
    Vec2 k;
    double dt = 0.0;
    MarchOutput<std::complex<double>> data;
};

/// Largest stable step for the mode phase resolution: |2 pi k.v| dt <= pi/4.
inline double mode_dt_limit(Vec2 k) { return k.norm() > 0 ? 1.0 / (8.0 * k.norm()) : 1e30; }

/// March the s=0 trace of the mode equation. Requires S.dt within the phase
/// resolution limit for this k.
ModeState solve_mode_trace(const SolverSetup& S, Vec2 k, const ComplexInitialData& mu0);

/// mu_t^k(theta,s,h) on the grid at time t.
ComplexField reconstruct_mode(const SolverSetup& S, Vec2 k, const ComplexInitialData& mu0,
                              const ModeState& st, double t, std::size_t stride = 2);

/// L1 mass of |mu_t^k| over the truncated region s > s_max.
double mode_tail_norm(const SolverSetup& S, Vec2 k, const ComplexInitialData& mu0,
                      const ModeState& st, double t, std::size_t stride = 16);

/// Norm series with power-law fit over [lo,hi]; p in {1,2,0}. Norms include
/// the semi-analytic s-tail when `with_tail`.
DecayReport mode_norm_series(const SolverSetup& S, Vec2 k, const ComplexInitialData& mu0,
                             const ModeState& st, const std::vector<double>& times, int p,
                             double fit_lo, double fit_hi, bool with_tail = true);

struct ContractionCertificate {
    Vec2 k;
    double sup_l1 = 1.0;  // sup over probes of ||g^k(theta,.,h|.,.)||_L1 (upper bound)
    double margin = 0.0;  // 1 - sup_l1
};

/// Certificate for ||g^k||_L1 <= 1 - margin: the time integrals use
/// Filon-type product integration of the oscillatory pair convolution, the
/// (h',h'') integrals a composite Gauss rule, the time truncation a rigorous
/// remainder bound. Requires k != 0.
ContractionCertificate gk_contraction(Vec2 k, std::size_t n_theta_probes,
                                      std::size_t n_h_probes, double t_max = 24.0);

/// Truncated Fourier synthesis sum_k mu^k e^{-2pi i k.x} at one x sample;
/// the mode list must be closed under k <-> -k conjugation.
struct TorusMode {
    Vec2 k;
    const ComplexField* field = nullptr;
};
RealField assemble_torus(const std::vector<TorusMode>& modes, Vec2 x, double* imag_residue);

/// Upper bound of || int eta(x) mu_t(x,.) dx ||_L1 via the mode quadrature
///   (2pi)^-2 sum_q w_q |eta_hat(k_q)| |x_profile_hat(k_q/2pi)| n_{k_q/2pi}(t)
/// plus a mass-conservation bound for the excised |k| < r disk. Returns one
/// value per requested time.
std::vector<double> schwartz_pairing(const SolverSetup& S,
                                     const std::function<double(Vec2)>& eta_hat_abs,
                                     const std::function<double(Vec2)>& x_profile_hat_abs,
                                     const std::vector<std::pair<Vec2, double>>& k_quad,
                                     const ComplexInitialData& nu0,
                                     const std::vector<double>& times,
                                     double excluded_disk_bound);

}  // namespace lgkin
