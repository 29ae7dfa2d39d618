// Zero-energy radial channels on the Langer line t = ln(rho), rho = kappa x:
//   g'' = [L^2 - lam^2 e^{2t} Phi(e^t)] g,   L = l + 1/2,
// with w(rho) = sqrt(rho) g(ln rho) solving w'' = [l(l+1)/rho^2 - lam^2 Phi(rho)] w.
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tfatom/ode.hpp"
#include "tfatom/specfun.hpp"
#include "tfatom/tf_core.hpp"

namespace tfatom {

// ---------------------------------------------------------------- potentials

struct PotentialSpec {
    double alpha = -1.0;       // Phi ~ c0 r^alpha at the origin
    double c0 = 1.0;
    double beta = -4.0;        // Phi ~ c_infinity r^beta at infinity
    double c_infinity = 0.0;
    std::function<double(double)> eval;
    std::string name;

    double operator()(double r) const { return eval(r); }
    // Exponent relating lam and kappa: lam = kappa^{-(2+beta)/2}.
    double kappa_of_lambda(double lam) const;
};

PotentialSpec thomas_fermi_spec(std::shared_ptr<const UniversalChi> chi);
// c0 r^alpha; no tail (beta, c_infinity unset).
PotentialSpec pure_power_spec(double alpha, double c0);
// c0 r^alpha / (1 + (c0/c_inf) r^{alpha-beta}): exact power laws at both ends.
PotentialSpec interpolating_spec(double alpha, double c0, double beta, double c_infinity);
// charge / r (outside the class above; used for spectral sanity checks).
PotentialSpec coulomb_spec(double charge);

struct SpecCheck {
    bool origin_ok = false, tail_ok = false, positive = false;
    double origin_ratio = 0.0, tail_ratio = 0.0;
    bool ok() const { return origin_ok && tail_ok && positive; }
};
SpecCheck validate_spec(const PotentialSpec& spec, double tol = 1e-3);

// ------------------------------------------------------------ angle helpers

double mod_pi(double theta);                        // into [0, pi)
double circular_distance_pi(double a, double b);    // min_k |a - b + k pi|
double signed_circular_difference_pi(double a, double b);  // a - b wrapped into [-pi/2, pi/2)

// ------------------------------------------------------- regular solutions

struct SeriesResult {
    double g = 0.0, dg = 0.0;
    double Q = 0.0;       // int_{-inf}^x |W|
    int terms = 0;
    double remainder = 0.0;  // e^{Lx} Q^i / (L^i i!) at truncation
};

struct SeriesOptions {
    double tolerance = 1e-15;
    double step = 2.5e-3;  // grid spacing on the Langer line
    int max_terms = 400;
};

// Picard series sum h_i, h_0 = e^{Lx}, h_i = (1/L) int_{-inf}^x sinh(L(x-y)) W(y) h_{i-1}(y) dy.
SeriesResult regular_solution_series(const std::function<double(double)>& W, double L, double x_eval,
                                     const SeriesOptions& opt = {});

// W(t) = -lam^2 e^{2t} Phi(e^t) for a potential spec.
std::function<double(double)> langer_potential(const PotentialSpec& spec, double lam);

struct PerturbationBound {
    double bound = 0.0;
    double Q = 0.0, Q_alt = 0.0, D = 0.0;
};
PerturbationBound perturbation_bound(const std::function<double(double)>& W,
                                     const std::function<double(double)>& W_alt, double L, double x);

struct TrajectoryOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double q_min = 1e-12;          // left start: Q(t_min) below this
    double steps_per_wavelength = 20.0;
    std::size_t max_steps = 2'000'000;
};

class ChannelTrajectory {
public:
    int ell = 0;
    double L = 0.5;
    double lam = 1.0;
    double kappa = 1.0;
    std::vector<double> t_grid, g_values, g_derivs;  // accepted steps
    double normalization = 1.0;  // e^{-L t} g at the left end

    double t_min() const { return t_grid.front(); }
    double t_max() const { return t_grid.back(); }
    // Dense output (g, g') at any t in [t_min, t_max].
    std::pair<double, double> at(double t) const;
    // Universal radial solution w(rho) = sqrt(rho) g(ln rho) and w'(rho).
    std::pair<double, double> w_at(double rho) const;
    std::size_t steps() const { return dense_.size(); }

    std::vector<ode::DenseStep<2>> dense_;
};

// t_range: {t_min, t_max}; a NaN t_min selects the Q(t_min) < q_min start.
ChannelTrajectory regular_solution_ode(const PotentialSpec& spec, double lam, int ell,
                                       std::pair<double, double> t_range, const TrajectoryOptions& opt = {});
double default_t_min(const PotentialSpec& spec, double lam, double q_min = 1e-12);

// ---------------------------------------------------------- phase extraction

struct PhaseWindow {
    double r_lo = 0.0, r_hi = 0.0;  // physical radii x = rho / kappa
    int samples = 33;
};

// Window between Bessel arguments z_hi > z_lo (r = a / z).
PhaseWindow bessel_window(const BasisPair& pair, double z_lo, double z_hi, int samples = 33);

struct PhaseMeasurement {
    double theta_mod_pi = 0.0;
    double r_lo = 0.0, r_hi = 0.0;
    double fit_residual = 0.0;
    double lam = 0.0;
    int ell = 0;
    bool valid = false;
    double tail_deviation = 0.0;  // max |Phi/Phi_inf - 1| over the window (needs spec)
    double theta_spread = 0.0;    // max pointwise distance from theta over the window
};

struct ExtractOptions {
    double fit_threshold = 0.05;
};

PhaseMeasurement extract_boundary_phase(const ChannelTrajectory& traj, const BasisPair& pair,
                                        const PhaseWindow& window, const ExtractOptions& opt = {});
// Same, with tail_deviation filled in from the potential.
PhaseMeasurement extract_boundary_phase(const ChannelTrajectory& traj, const BasisPair& pair,
                                        const PhaseWindow& window, const PotentialSpec& spec,
                                        const ExtractOptions& opt = {});

double predicted_theta(double tau, int ell, double alpha, double beta);

// Extraction window for the TF channel sweeps in Bessel-argument units z = a/r,
// as multiples of L = l + 1/2 (where a^2/r^4 balances the centrifugal term).
struct SweepWindow {
    double z_lo = 1.0;
    double z_hi = 2.0;
    bool scale_by_L = true;
};

// Full pipeline for one channel: integrate to the window and extract.
PhaseMeasurement measure_channel_phase(const PotentialSpec& spec, double lam, int ell, const SweepWindow& w = {},
                                       const TrajectoryOptions& topt = {}, const ExtractOptions& eopt = {});

// --------------------------------------------------------------- JWKB phase

struct WkbPhase {
    double phase = 0.0;
    double turning_point = 0.0;  // inner turning point, 0 if none
    bool forbidden = false;      // no classically allowed point on (0, x]
};

// lam int_0^x [Phi(y) - c^2/(lam^2 y^2)]_+^{1/2} dy with c^2 = (l+1/2)^2, or l(l+1) if !langer.
WkbPhase wkb_phase_integral(const PotentialSpec& spec, double lam, int ell, double x, bool langer = true);

// Closed form of the integral above for Phi = c0 y^alpha.
double wkb_phase_pure_power(double alpha, double c0, double lam, int ell, double x);

double phase_offset(double alpha, int ell);

// lam int_0^X Phi^{1/2} dr minus the Langer-truncated phase at X.
double phase_offset_measurement(const PotentialSpec& spec, double lam, int ell, double X);

// Unique X where the O(1/lam) term of the measurement above vanishes:
// K(X) = -int_X^inf r^-2 (c0 r^alpha)^{-1/2} + int_0^X r^-2 [Phi^{-1/2} - (c0 r^alpha)^{-1/2}] = 0.
double offset_balance_point(const PotentialSpec& spec);
double offset_first_order_coefficient(const PotentialSpec& spec, double X);

struct WkbAnsatzResult {
    double sup_deviation = 0.0;
    double amplitude = 0.0;         // least-squares a
    double phase_span = 0.0;        // S(x2) - S(x1)
    bool degenerate = false;        // less than half an oscillation on the interval
    bool outside_window = false;    // interval leaves the classically allowed region
    std::vector<double> envelope;   // local maxima of |Phi^{1/4} w| / a
};

WkbAnsatzResult wkb_ansatz_error(const PotentialSpec& spec, double lam, int ell, std::pair<double, double> interval,
                                 bool langer_corrected, int samples = 801);

}  // namespace tfatom
