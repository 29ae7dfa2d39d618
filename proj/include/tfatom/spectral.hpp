// Negative eigenvalues of the infinite-atom channels
//   -u'' + [l(l+1)/r^2 - C_inf r^-4] u = mu u,   boundary angle theta at r = 0,
// and of the finite TF channels -u'' + [l(l+1)/x^2 - Phi_Z] u = mu u.
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tfatom/ode.hpp"
#include "tfatom/specfun.hpp"
#include "tfatom/tf_core.hpp"
#include "tfatom/zero_energy.hpp"

namespace tfatom {

struct DecayOptions {
    double rtol = 1e-12;
    double atol = 1e-30;
    double radius_bound = 1e-8;   // |mu| r^4 / C_inf at the extraction radius
    double decay_span = 40.0;     // seed at (decay_span + l) / sqrt(-mu)
    double steps_per_wavelength = 20.0;
};

// Solution decaying at infinity, integrated inward and projected on (F, G).
struct DecayingSolution {
    int ell = 0;
    double mu = 0.0;
    double theta = 0.0;          // in [0, pi)
    double decay_start = 0.0;    // seed abscissa
    double r_extract = 0.0;
    double seed_remainder = 0.0; // smallest term of the asymptotic seed series (relative)
    double residual = 0.0;       // scaled sup of u'' - (V - mu) u on the dense output
    std::vector<ode::DenseStep<2>> steps;  // r decreasing
};

DecayingSolution decaying_solution(int ell, double mu, double c_infinity = c_infinity(), const DecayOptions& opt = {});
double theta_of_mu(int ell, double mu, double c_infinity = c_infinity(), const DecayOptions& opt = {});

struct EigenResult {
    int ell = 0;
    double mu = 0.0;
    double theta = 0.0;
    double decay_start = 0.0;
    double residual = 0.0;
    double matching = 0.0;  // signed circular mismatch at mu
};

// Root of m(mu) = wrap(theta_of_mu(mu) - theta) into [-pi/2, pi/2) inside the bracket.
// Sign changes where m jumps across the wrap are not roots and are skipped.
EigenResult channel_eigenvalue(int ell, double theta, std::pair<double, double> bracket,
                               double c_infinity = c_infinity(), const DecayOptions& opt = {});

// ---------------------------------------------------------- finite channels

struct PruferOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
    double q_min = 1e-14;
    double decay_lengths = 30.0;
    double steps_per_wavelength = 20.0;
    double mu_tolerance = 1e-11;
};

// Channel -w'' + [l(l+1)/rho^2 - lam^2 Phi(rho)] w = E w in the scaled variable rho = kappa x,
// physical eigenvalue mu = kappa^2 E.
struct ScaledChannel {
    PotentialSpec spec;
    double lam = 1.0;
    double kappa = 1.0;
    int ell = 0;
};

ScaledChannel tf_channel(std::shared_ptr<const UniversalChi> chi, double Z, int ell);

// Prüfer mismatch psi_L - psi_R at the outer turning point; increasing in mu,
// the k-th eigenvalue (k = 0, 1, ...) is where it equals k pi.
double prufer_mismatch(const ScaledChannel& ch, double mu, const PruferOptions& opt = {});
int eigenvalue_count_below(const ScaledChannel& ch, double mu, const PruferOptions& opt = {});

std::vector<double> channel_eigenvalues(const ScaledChannel& ch, std::pair<double, double> window,
                                        const PruferOptions& opt = {});
std::vector<double> finite_channel_eigenvalues(std::shared_ptr<const UniversalChi> chi, double Z, int ell,
                                               std::pair<double, double> window, const PruferOptions& opt = {});

// sup_r r^2 Phi_1(r) = b sup_x x chi(x).
double centrifugal_supremum(const UniversalChi& chi);
// Least l with l(l+1) >= Z^{2/3} sup_r r^2 Phi_1(r); 1 in the limit Z -> 0+.
int channel_positivity_threshold(const UniversalChi& chi, double Z);

struct CounterexampleRow {
    int ell = 0;
    double tau = 0.0;
    double theta = 0.0;    // theta(l, -1)
    long long n = 0;
    long long Z = 0;
    double mu = 0.0;
    double residual = 0.0; // |mu + 1|
};

struct CounterexampleReport {
    std::vector<CounterexampleRow> rows;
    bool complete = false;
    std::string diagnostics;
};

struct CounterexampleOptions {
    long long n_max = 100000;   // budget on the sequence index
    double stride_growth = 1.1;  // n_{k+1} = max(n_k + 1, ceil(growth n_k)); 1 probes every index
    int jobs = 1;             // candidate Z values probed in parallel
    PruferOptions prufer;
    DecayOptions decay;
};

CounterexampleReport norm_resolvent_counterexample(std::shared_ptr<const UniversalChi> chi, double d_cl, int ell_max,
                                                   const CounterexampleOptions& opt = {});

}  // namespace tfatom
