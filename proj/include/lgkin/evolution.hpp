// Solver for the x-averaged kinetic equation: marches the renewal equation
// for the collision trace rho(theta,t,h), reconstructs mu_t(theta,s,h), and
// measures distances from the equilibrium c*E/(2pi).
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lgkin/volterra.hpp"

namespace lgkin {

// Initial datum in closure form: evaluable at any (theta, s, h), in particular
// at the shifted times s+t the renewal representation needs. The semi-analytic
// companions keep truncation accounting away from grid quadrature.
template <typename T>
struct Datum {
    std::string name;
    std::function<T(double theta, double s, double h)> eval;
    double total_mass = 0.0;                      // int over theta x [0,inf) x h
    std::function<double(double)> mass_upto;      // same integral with s <= arg
    std::function<double(double)> tail_beyond;    // |mass| of the s > arg part
};
using InitialData = Datum<double>;
using ComplexInitialData = Datum<std::complex<double>>;

/// E(s,h)/(2pi): the stationary probability density.
InitialData equilibrium_datum();
/// (1 + cos theta)/(2pi) * E(s,h).
InitialData cosine_datum();
/// (1 + sum_m amp_m cos(m theta) + amb_m sin(m theta))/(2pi) * E(s,h).
InitialData harmonic_datum(const std::vector<double>& cos_amp, const std::vector<double>& sin_amp);
/// mu_in(theta)/(2pi) * bump(s) * (1-h^2), bump supported on [0, s_hi]; used
/// for compactly supported test data.
InitialData compact_datum(double s_hi, int theta_mode);
/// Harmonic amplitudes from a CSV file with columns m,cos_amp,sin_amp.
InitialData file_datum(const std::string& path);

struct SolverSetup {
    PhaseGrid grid;
    RenewalWeights weights;
    ShiftOps shifts;
    double dt = 0.0;
    std::size_t nsteps = 0;
    std::vector<double> eq_nodes;  // E at (s,h) grid nodes

    static SolverSetup make(std::size_t n_theta, std::size_t n_s, double s_max, std::size_t n_h,
                            double T, double dt, HInterp kind = HInterp::Lagrange);
};

struct CollisionTrace {
    double dt = 0.0;
    MarchOutput<double> data;
    double t_max() const { return dt * (data.trace.size() - 1); }
};

/// March rho(theta,t,h) = mu0(theta,t,h)
///   + int_0^t dt' int dh' Q(t-t',h|h') rho(theta+pi-2asin h', t', h').
CollisionTrace solve_trace(const SolverSetup& S, const InitialData& mu0);

/// mu_t(theta,s,h) = mu0(theta,s+t,h)
///   + int_0^t dt' int dh' Q(s+t-t',h|h') rho(theta+pi-2asin h',t',h').
/// `stride` coarsens the reconstruction panels (must divide the step index).
RealField reconstruct(const SolverSetup& S, const InitialData& mu0, const CollisionTrace& tr,
                      double t, std::size_t stride = 1);

/// Mass of mu_t beyond the grid's s_max (semi-analytic; with the grid mass
/// this gives the conserved full-domain mass).
double reconstruct_tail_mass(const SolverSetup& S, const InitialData& mu0,
                             const CollisionTrace& tr, double t);

/// Full-domain mass of mu_t with the (s,h)-integrals of the representation
/// done in closed form (only the trace quadrature remains).
double reconstruct_mass(const SolverSetup& S, const InitialData& mu0, const CollisionTrace& tr,
                        double t);

/// mu_t evaluated at one arbitrary phase point.
double reconstruct_at(const SolverSetup& S, const InitialData& mu0, const CollisionTrace& tr,
                      double t, double theta, double s, double h, std::size_t stride = 4);

/// L1 mass of mu_t - mass0 E/(2pi) over the truncated region s > s_max
/// (quadrature on the support sliver |h| > 1 - 1/s in transformed
/// coordinates). Combined with the grid norm this gives the full-domain L1
/// distance from equilibrium.
double reconstruct_tail_norm(const SolverSetup& S, const InitialData& mu0,
                             const CollisionTrace& tr, double t, double mass0,
                             std::size_t stride = 16);

/// || mu_t - mass0 * E/(2pi) ||_p on the grid (p in {1,2}, 0 for sup).
double equilibrium_distance(const SolverSetup& S, const RealField& mu_t, double mass0, int p);

struct DecayReport {
    std::vector<double> times, l1, l2, linf;
    double fitted_exponent = 0.0;
    double fitted_constant = 0.0;
    double fit_residual = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
};

/// Least-squares power-law fit log(norm) ~ log(constant) + exponent*log(t)
/// restricted to samples with t in [lo,hi]. Requires >= 4 samples and
/// positive norms in the window.
void fit_decay(DecayReport& rep, const std::vector<double>& ts, const std::vector<double>& norms,
               double lo, double hi);

}  // namespace lgkin
