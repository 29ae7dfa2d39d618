// Universal Thomas-Fermi profile, the potentials built from it and the
// classical constant D_cl.
//
// Units: hbar = e = 2m = 1.  The neutral-atom potential is written
//   Phi_1(r) = chi(r / b) / r,   b = (3 pi / 4)^{2/3},
// with chi'' = chi^{3/2} / sqrt(x), chi(0) = 1, chi(inf) = 0.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tfatom/errors.hpp"

namespace tfatom {

struct TfConstants {
    double c_tf;        // (3/5)(3 pi^2)^{2/3}
    double c_infinity;  // 81 pi^2
    double b_length;    // (3 pi / 4)^{2/3}
    double d_cl;        // (1/pi) int_0^inf Phi_1^{1/2} dr, NaN until computed
};

double c_tf();
double c_infinity();
double b_length();
TfConstants tf_constants(double d_cl);

// Exponent of the first correction to the 144/x^3 tail, (sqrt(73) - 7) / 2.
double tail_exponent();

struct GridSpec {
    double x_min = 1e-6;
    double x_max = 1e4;
    std::size_t points = 4001;  // log spaced
};

struct SolveOptions {
    double tolerance = 1e-8;      // bound on tf_residual
    double ode_rtol = 1e-13;
    double ode_atol = 1e-22;
    double series_radius = 1e-3;  // origin series used for x <= series_radius
    double match_point = 4.0;     // outward/inward integrations meet here
    double tail_switch = 1e3;     // tail expansion used for x >= tail_switch
};

// Diagnostics of the solve; not needed to evaluate the profile.
struct SolveReport {
    double slope_shooting = 0.0;  // bisection on the initial slope
    double slope_matching = 0.0;  // two-sided Newton matching
    double bracket_lo = 0.0, bracket_hi = 0.0;
    int bisection_steps = 0;
    int newton_steps = 0;
    double match_defect = 0.0;
    double tail_mismatch = 0.0;  // tail expansion vs inward integration, relative
    double residual = 0.0;
    double seconds = 0.0;
};

class UniversalChi {
public:
    UniversalChi() = default;

    const std::vector<double>& grid() const { return x_; }
    const std::vector<double>& values() const { return chi_; }
    const std::vector<double>& derivs() const { return dchi_; }
    double slope_origin() const { return slope_; }
    double tail_amplitude() const { return amp_; }
    double tail_switch() const { return tail_switch_; }
    double series_radius() const { return series_radius_; }
    double match_point() const { return match_point_; }
    double tolerance() const { return tolerance_; }
    // int_0^inf sqrt(chi(u)/u) du accumulated alongside the ODE solve.
    double chi_integral() const { return chi_integral_; }
    const SolveReport& report() const { return report_; }

    double chi(double x) const;
    double dchi(double x) const;

    // Origin expansion chi = sum a_k x^{k/2} and tail expansion
    // chi = 144 x^-3 sum c_k (A x^-sigma)^k, exposed for tests.
    double chi_origin_series(double x, double* deriv = nullptr) const;
    double chi_tail_series(double x, double* deriv = nullptr) const;

    // Rebuilds a profile from exported samples and header data.
    static UniversalChi from_samples(std::vector<double> x, std::vector<double> chi, std::vector<double> dchi,
                                     double slope, double amplitude, double series_radius, double match_point,
                                     double tail_switch, double chi_integral, double tolerance);

    // Same profile with chi values shifted by `delta` (sensitivity checks only).
    UniversalChi perturbed(double delta) const;

private:
    friend UniversalChi solve_universal_chi(double, const GridSpec&, const SolveOptions&);
    void build_series();

    std::vector<double> x_, chi_, dchi_;
    std::vector<double> origin_coef_;  // a_k
    std::vector<double> tail_coef_;    // c_k
    double slope_ = 0.0, amp_ = 0.0;
    double series_radius_ = 1e-3, match_point_ = 4.0, tail_switch_ = 1e3;
    double chi_integral_ = 0.0, tolerance_ = 1e-8;
    double log_x0_ = 0.0, dlog_ = 1.0;
    SolveReport report_;
};

UniversalChi solve_universal_chi(double tolerance = 1e-8, const GridSpec& grid = {}, const SolveOptions& opt = {});

double phi1_at(const UniversalChi& chi, double r);
double phi_Z_at(const UniversalChi& chi, double Z, double x);

struct ClassicalConstant {
    double d_cl = 0.0;            // r-space quadrature
    double d_cl_chi_space = 0.0;  // from the ODE-accumulated chi-space integral
    double d_cl_3d = 0.0;         // (1/4pi^2) int Phi^{1/2}|x|^-2 d^3x, via the radial identity
    double quad_error = 0.0;
    int quad_intervals = 0;
};

ClassicalConstant classical_constant(const UniversalChi& chi, double tolerance = 1e-9);
// (1/pi) int_0^inf Phi_Z^{1/2} dx by the same quadrature route.
double classical_integral_Z(const UniversalChi& chi, double Z, double tolerance = 1e-12);

// Max normalized residual of chi'' = chi^{3/2}/sqrt(x) over interior nodes.
// Equivalent to the radial form Phi'' + (2/r)Phi' = 4pi(3Phi/(5 c_tf))^{3/2}
// divided by its local magnitude, since both sides carry the factor 1/(r b^2).
double tf_residual(const UniversalChi& chi);

struct TailRow {
    double x;
    double deviation;         // |x^3 chi / 144 - 1|
    double correction_order;  // |A| x^-sigma
};
std::vector<TailRow> sommerfeld_tail_report(const UniversalChi& chi, const std::vector<double>& xs);

// CSV "x,chi,dchi" at %.17g and the JSON header written next to it.
std::string profile_csv(const UniversalChi& chi);
std::string profile_header_json(const UniversalChi& chi);
void export_profile(const UniversalChi& chi, const std::string& csv_path, const std::string& json_path);
UniversalChi import_profile(const std::string& csv_path, const std::string& json_path);

}  // namespace tfatom
