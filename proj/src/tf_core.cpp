#include "tfatom/tf_core.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "tfatom/ode.hpp"
#include "tfatom/quadrature.hpp"

namespace tfatom {

using std::numbers::pi;

double c_tf() { return 0.6 * std::pow(3.0 * pi * pi, 2.0 / 3.0); }
double c_infinity() { return 81.0 * pi * pi; }
double b_length() { return std::pow(3.0 * pi / 4.0, 2.0 / 3.0); }
TfConstants tf_constants(double d_cl) { return {c_tf(), c_infinity(), b_length(), d_cl}; }
double tail_exponent() { return 0.5 * (std::sqrt(73.0) - 7.0); }

namespace {

constexpr int kOriginTerms = 120;
constexpr int kTailTerms = 60;

// Coefficients of (sum_k w_k t^k)^alpha for w_0 = 1.
std::vector<double> power_series(const std::vector<double>& w, double alpha, std::size_t n) {
    std::vector<double> p(n, 0.0);
    p[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k && j < w.size(); ++j)
            s += ((alpha + 1.0) * static_cast<double>(j) - static_cast<double>(k)) * w[j] * p[k - j];
        p[k] = s / static_cast<double>(k);
    }
    return p;
}

// chi = sum a_k t^k in t = sqrt(x): a_0 = 1, a_1 = 0, a_2 = B and
// a_m (m/2)(m/2 - 1) = [chi^{3/2}]_{m-3}.
std::vector<double> origin_coefficients(double slope) {
    std::vector<double> a(kOriginTerms, 0.0);
    a[0] = 1.0;
    a[2] = slope;
    std::vector<double> p(kOriginTerms, 0.0);
    p[0] = 1.0;
    for (int m = 3; m < kOriginTerms; ++m) {
        // p_{m-3} only needs a_0..a_{m-3}
        int k = m - 3;
        if (k >= 1) {
            double s = 0.0;
            for (int j = 1; j <= k; ++j) s += (2.5 * j - k) * a[j] * p[k - j];
            p[k] = s / k;
        }
        double h = 0.5 * m;
        a[m] = p[k] / (h * (h - 1.0));
    }
    return a;
}

// w = sum c_k y^k solving 12 w - 6 x w' + x^2 w'' = 12 w^{3/2} with y = A x^-sigma.
std::vector<double> tail_coefficients() {
    const double sigma = tail_exponent();
    std::vector<double> c(kTailTerms, 0.0), p(kTailTerms, 0.0);
    c[0] = 1.0;
    c[1] = 1.0;
    p[0] = 1.0;
    p[1] = 1.5;
    for (int k = 2; k < kTailTerms; ++k) {
        double rest = 0.0;
        for (int j = 1; j < k; ++j) rest += (2.5 * j - k) * c[j] * p[k - j];
        rest /= k;
        double ks = k * sigma;
        double Lk = 12.0 + 6.0 * ks + ks * (ks + 1.0);
        c[k] = 12.0 * rest / (Lk - 18.0);
        p[k] = rest + 1.5 * c[k];
    }
    return c;
}

double eval_origin(const std::vector<double>& a, double x, double* deriv) {
    const double t = std::sqrt(x);
    double s = 0.0, ds = 0.0, tk = 1.0;
    int small = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double term = a[k] * tk;
        s += term;
        if (k >= 1) ds += 0.5 * k * a[k] * tk;  // d/dx of a_k x^{k/2} times x
        if (k > 4 && std::abs(term) < 1e-19 * std::abs(s)) {
            if (++small >= 3) break;
        } else {
            small = 0;
        }
        tk *= t;
    }
    if (deriv) *deriv = ds / x;
    return s;
}

double eval_tail(const std::vector<double>& c, double amp, double x, double* deriv) {
    const double sigma = tail_exponent();
    const double y = amp * std::pow(x, -sigma);
    double w = 0.0, xw = 0.0, yk = 1.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        double term = c[k] * yk;
        w += term;
        xw += -sigma * k * term;  // x dw/dx
        if (k > 2 && std::abs(term) < 1e-19) break;
        yk *= y;
    }
    const double x3 = x * x * x;
    if (deriv) *deriv = 144.0 / (x3 * x) * (-3.0 * w + xw);
    return 144.0 / x3 * w;
}

// int_0^x sqrt(chi(u)/u) du = 2 int_0^sqrt(x) sqrt(chi(t^2)) dt from the series.
double origin_integral(const std::vector<double>& a, double x) {
    auto q = power_series(a, 0.5, a.size());
    const double t = std::sqrt(x);
    double s = 0.0, tk = t;
    for (std::size_t k = 0; k < q.size(); ++k) {
        double term = q[k] * tk / (k + 1.0);
        s += term;
        if (k > 4 && std::abs(term) < 1e-19 * std::abs(s)) break;
        tk *= t;
    }
    return 2.0 * s;
}

// int_x^inf sqrt(chi(u)/u) du = 12 int_x^inf u^-2 w^{1/2} du from the tail series.
double tail_integral(const std::vector<double>& c, double amp, double x) {
    const double sigma = tail_exponent();
    auto s = power_series(c, 0.5, c.size());
    const double y = amp * std::pow(x, -sigma);
    double acc = 0.0, yk = 1.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        double term = s[k] * yk / (1.0 + k * sigma);
        acc += term;
        if (k > 2 && std::abs(term) < 1e-19) break;
        yk *= y;
    }
    return 12.0 * acc / x;
}

using State3 = ode::State<3>;

State3 chi_rhs(double x, const State3& y) {
    double c = std::max(y[0], 0.0);
    double sx = std::sqrt(x);
    return {y[1], c * std::sqrt(c) / sx, std::sqrt(c) / sx};
}

enum class Shot { Low, High };

ode::Options chi_ode_options(const SolveOptions& o) {
    ode::Options opt;
    opt.rtol = o.ode_rtol;
    opt.atol = o.ode_atol;
    return opt;
}

// Outward trajectory from the origin series; classifies the slope.
Shot classify_slope(double slope, const SolveOptions& o, double x_end) {
    auto a = origin_coefficients(slope);
    double d;
    double c = eval_origin(a, o.series_radius, &d);
    State3 y{c, d, 0.0};
    Shot verdict = Shot::Low;
    bool decided = false;
    try {
        ode::integrate<3>(chi_rhs, o.series_radius, y, x_end, chi_ode_options(o), ode::NoCeiling{},
                          [&](const ode::DenseStep<3>& st, const State3& s) {
                              double x = st.t1();
                              if (s[0] < 0.0) {
                                  verdict = Shot::Low;
                                  decided = true;
                                  return false;
                              }
                              if (s[1] > 0.0 || x * x * x * s[0] > 144.0) {
                                  verdict = Shot::High;
                                  decided = true;
                                  return false;
                              }
                              return true;
                          });
    } catch (const ode::StepUnderflow&) {
        // chi driven to zero with a singular step: the slope is too negative.
        return Shot::Low;
    }
    if (!decided) verdict = x_end * x_end * x_end * y[0] > 144.0 ? Shot::High : Shot::Low;
    return verdict;
}

struct Match {
    double dchi, dder;
};

State3 outward_to(double slope, const SolveOptions& o, double x_end) {
    auto a = origin_coefficients(slope);
    double d;
    double c = eval_origin(a, o.series_radius, &d);
    State3 y{c, d, 0.0};
    ode::integrate<3>(chi_rhs, o.series_radius, y, x_end, chi_ode_options(o));
    return y;
}

State3 inward_to(const std::vector<double>& tc, double amp, const SolveOptions& o, double x_end) {
    double d;
    double c = eval_tail(tc, amp, o.tail_switch, &d);
    State3 y{c, d, 0.0};
    ode::integrate<3>(chi_rhs, o.tail_switch, y, x_end, chi_ode_options(o));
    return y;
}

Match mismatch(double slope, double amp, const std::vector<double>& tc, const SolveOptions& o) {
    State3 l = outward_to(slope, o, o.match_point);
    State3 r = inward_to(tc, amp, o, o.match_point);
    return {l[0] - r[0], l[1] - r[1]};
}

double seven_point_derivative(const double* f, double h) {
    return (-f[-3] + 9.0 * f[-2] - 45.0 * f[-1] + 45.0 * f[1] - 9.0 * f[2] + f[3]) / (60.0 * h);
}

}  // namespace

void UniversalChi::build_series() {
    origin_coef_ = origin_coefficients(slope_);
    tail_coef_ = tail_coefficients();
    if (!x_.empty()) {
        log_x0_ = std::log(x_.front());
        dlog_ = (std::log(x_.back()) - log_x0_) / static_cast<double>(x_.size() - 1);
    }
}

double UniversalChi::chi_origin_series(double x, double* deriv) const { return eval_origin(origin_coef_, x, deriv); }

double UniversalChi::chi_tail_series(double x, double* deriv) const {
    return eval_tail(tail_coef_, amp_, x, deriv);
}

namespace {

// Quintic Hermite interpolation on [x0, x1] from values, first and second derivatives.
void hermite5(double x0, double x1, const double f[2], const double d[2], const double s2[2], double x, double& v,
              double& dv) {
    const double h = x1 - x0, s = (x - x0) / h;
    const double s_2 = s * s, s3 = s_2 * s, s4 = s3 * s, s5 = s4 * s;
    double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5, H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    double H2 = 0.5 * (s_2 - 3 * s3 + 3 * s4 - s5), H3 = 10 * s3 - 15 * s4 + 6 * s5;
    double H4 = -4 * s3 + 7 * s4 - 3 * s5, H5 = 0.5 * (s3 - 2 * s4 + s5);
    double D0 = -30 * s_2 + 60 * s3 - 30 * s4, D1 = 1 - 18 * s_2 + 32 * s3 - 15 * s4;
    double D2 = 0.5 * (2 * s - 9 * s_2 + 12 * s3 - 5 * s4), D3 = -D0;
    double D4 = -12 * s_2 + 28 * s3 - 15 * s4, D5 = 0.5 * (3 * s_2 - 8 * s3 + 5 * s4);
    v = H0 * f[0] + h * H1 * d[0] + h * h * H2 * s2[0] + H3 * f[1] + h * H4 * d[1] + h * h * H5 * s2[1];
    dv = (D0 * f[0] + h * D1 * d[0] + h * h * D2 * s2[0] + D3 * f[1] + h * D4 * d[1] + h * h * D5 * s2[1]) / h;
}

}  // namespace

double UniversalChi::chi(double x) const {
    if (!(x > 0.0)) throw DomainError("chi: abscissa must be positive");
    if (x <= series_radius_ || x <= x_.front()) return chi_origin_series(x, nullptr);
    if (x >= tail_switch_ || x >= x_.back()) return chi_tail_series(x, nullptr);
    double v, dv;
    std::size_t i = static_cast<std::size_t>(std::floor((std::log(x) - log_x0_) / dlog_));
    i = std::min(i, x_.size() - 2);
    while (i > 0 && x_[i] > x) --i;
    while (i + 2 < x_.size() && x_[i + 1] < x) ++i;
    double f[2] = {chi_[i], chi_[i + 1]}, d[2] = {dchi_[i], dchi_[i + 1]};
    double s2[2] = {std::pow(std::max(f[0], 0.0), 1.5) / std::sqrt(x_[i]),
                    std::pow(std::max(f[1], 0.0), 1.5) / std::sqrt(x_[i + 1])};
    hermite5(x_[i], x_[i + 1], f, d, s2, x, v, dv);
    return v;
}

double UniversalChi::dchi(double x) const {
    if (!(x > 0.0)) throw DomainError("dchi: abscissa must be positive");
    double d;
    if (x <= series_radius_ || x <= x_.front()) {
        chi_origin_series(x, &d);
        return d;
    }
    if (x >= tail_switch_ || x >= x_.back()) {
        chi_tail_series(x, &d);
        return d;
    }
    double v, dv;
    std::size_t i = static_cast<std::size_t>(std::floor((std::log(x) - log_x0_) / dlog_));
    i = std::min(i, x_.size() - 2);
    while (i > 0 && x_[i] > x) --i;
    while (i + 2 < x_.size() && x_[i + 1] < x) ++i;
    double f[2] = {chi_[i], chi_[i + 1]}, dd[2] = {dchi_[i], dchi_[i + 1]};
    double s2[2] = {std::pow(std::max(f[0], 0.0), 1.5) / std::sqrt(x_[i]),
                    std::pow(std::max(f[1], 0.0), 1.5) / std::sqrt(x_[i + 1])};
    hermite5(x_[i], x_[i + 1], f, dd, s2, x, v, dv);
    return dv;
}

UniversalChi UniversalChi::from_samples(std::vector<double> x, std::vector<double> chi, std::vector<double> dchi,
                                        double slope, double amplitude, double series_radius, double match_point,
                                        double tail_switch, double chi_integral, double tolerance) {
    if (x.size() < 16 || chi.size() != x.size() || dchi.size() != x.size())
        throw DomainError("profile samples: need at least 16 nodes with matching columns");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw DomainError("profile samples: abscissae must be strictly increasing");
    if (!(x.front() > 0.0)) throw DomainError("profile samples: abscissae must be positive");
    UniversalChi u;
    u.x_ = std::move(x);
    u.chi_ = std::move(chi);
    u.dchi_ = std::move(dchi);
    u.slope_ = slope;
    u.amp_ = amplitude;
    u.series_radius_ = series_radius;
    u.match_point_ = match_point;
    u.tail_switch_ = tail_switch;
    u.chi_integral_ = chi_integral;
    u.tolerance_ = tolerance;
    u.build_series();
    return u;
}

UniversalChi UniversalChi::perturbed(double delta) const {
    UniversalChi u = *this;
    for (double& c : u.chi_) c += delta;
    return u;
}

UniversalChi solve_universal_chi(double tolerance, const GridSpec& grid, const SolveOptions& opt_in) {
    auto t_start = std::chrono::steady_clock::now();
    if (!(tolerance > 0.0)) throw DomainError("solve_universal_chi: tolerance must be positive");
    if (grid.points < 64 || !(grid.x_min > 0.0) || grid.x_min > 1e-6 || grid.x_max < 1e4)
        throw DomainError("solve_universal_chi: grid must cover [1e-6, 1e4] with at least 64 log-spaced nodes");
    SolveOptions o = opt_in;
    if (!(o.series_radius > 0.0 && o.series_radius < o.match_point && o.match_point < o.tail_switch))
        throw DomainError("solve_universal_chi: need 0 < series_radius < match_point < tail_switch");

    UniversalChi u;
    u.tolerance_ = tolerance;
    u.series_radius_ = o.series_radius;
    u.match_point_ = o.match_point;
    u.tail_switch_ = o.tail_switch;
    auto tc = tail_coefficients();
    SolveReport rep;

    // Method 1: bisection on the initial slope.
    double lo = -2.0, hi = -1.0;
    const double x_shoot = 1e4;
    try {
        if (classify_slope(lo, o, x_shoot) != Shot::Low || classify_slope(hi, o, x_shoot) != Shot::High) {
            std::ostringstream os;
            os << "shooting bracket [" << lo << ", " << hi << "] does not enclose the slope";
            throw NumericalError(os.str());
        }
    } catch (const ode::StepUnderflow& e) {
        throw NumericalError(std::string("step-size underflow near the origin (increase series_radius): ") +
                             e.what());
    }
    int it = 0;
    while (it < 200) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (classify_slope(mid, o, x_shoot) == Shot::Low ? lo : hi) = mid;
        ++it;
    }
    rep.bracket_lo = lo;
    rep.bracket_hi = hi;
    rep.bisection_steps = it;
    rep.slope_shooting = 0.5 * (lo + hi);

    // Starting amplitude of the tail correction from the shot trajectory.
    const double x_est = 15.0;
    State3 ys = outward_to(rep.slope_shooting, o, x_est);
    double target = x_est * x_est * x_est * ys[0] / 144.0;
    double yv = target - 1.0;
    for (int k = 0; k < 50; ++k) {
        double w = 0.0, dw = 0.0, yk = 1.0;
        for (std::size_t j = 0; j < tc.size(); ++j) {
            w += tc[j] * yk * 1.0;
            if (j + 1 < tc.size()) dw += (j + 1) * tc[j + 1] * yk;
            yk *= yv;
            if (std::abs(yk) < 1e-30) break;
        }
        double step = (w - target) / dw;
        yv -= step;
        if (std::abs(step) < 1e-15) break;
    }
    double amp = yv * std::pow(x_est, tail_exponent());

    // Method 2: two-sided Newton matching on (slope, amplitude).
    double slope = rep.slope_shooting;
    Match m = mismatch(slope, amp, tc, o);
    int nit = 0;
    for (; nit < 40; ++nit) {
        double norm = std::hypot(m.dchi, m.dder);
        if (norm < 1e-15) break;
        double hb = 1e-7, ha = 1e-6 * std::abs(amp);
        Match mb = mismatch(slope + hb, amp, tc, o);
        Match ma = mismatch(slope, amp + ha, tc, o);
        double j11 = (mb.dchi - m.dchi) / hb, j21 = (mb.dder - m.dder) / hb;
        double j12 = (ma.dchi - m.dchi) / ha, j22 = (ma.dder - m.dder) / ha;
        double det = j11 * j22 - j12 * j21;
        if (det == 0.0) throw NumericalError("matching Jacobian is singular");
        double ds = (m.dchi * j22 - m.dder * j12) / det;
        double da = (j11 * m.dder - j21 * m.dchi) / det;
        slope -= ds;
        amp -= da;
        Match mn = mismatch(slope, amp, tc, o);
        if (std::hypot(mn.dchi, mn.dder) >= norm && std::abs(ds) < 1e-13) {
            m = mn;
            break;
        }
        m = mn;
    }
    rep.newton_steps = nit;
    rep.match_defect = std::hypot(m.dchi, m.dder);
    if (!(rep.match_defect < 1e-10)) {
        std::ostringstream os;
        os << "two-sided matching did not converge: defect " << rep.match_defect << " at slope " << slope;
        throw NumericalError(os.str());
    }
    u.slope_ = slope;
    u.amp_ = amp;

    // Sample the profile on the grid.
    const std::size_t n = grid.points;
    u.x_.resize(n);
    u.chi_.assign(n, 0.0);
    u.dchi_.assign(n, 0.0);
    const double l0 = std::log(grid.x_min), l1 = std::log(grid.x_max);
    for (std::size_t i = 0; i < n; ++i) u.x_[i] = std::exp(l0 + (l1 - l0) * i / (n - 1));
    u.x_.front() = grid.x_min;
    u.x_.back() = grid.x_max;
    u.build_series();

    std::size_t i_out = 0;  // first node above series_radius
    while (i_out < n && u.x_[i_out] <= o.series_radius) {
        u.chi_[i_out] = u.chi_origin_series(u.x_[i_out], &u.dchi_[i_out]);
        ++i_out;
    }
    std::size_t i_tail = n;  // first node at or above tail_switch
    while (i_tail > 0 && u.x_[i_tail - 1] >= o.tail_switch) {
        --i_tail;
        u.chi_[i_tail] = u.chi_tail_series(u.x_[i_tail], &u.dchi_[i_tail]);
    }

    double integral = origin_integral(u.origin_coef_, o.series_radius);
    {
        double d;
        double c = u.chi_origin_series(o.series_radius, &d);
        State3 y{c, d, 0.0};
        std::size_t k = i_out;
        ode::integrate<3>(chi_rhs, o.series_radius, y, o.match_point, chi_ode_options(o), ode::NoCeiling{},
                          [&](const ode::DenseStep<3>& st, const State3&) {
                              while (k < i_tail && u.x_[k] <= st.t1() && u.x_[k] <= o.match_point) {
                                  auto v = st.value(u.x_[k]);
                                  u.chi_[k] = v[0];
                                  u.dchi_[k] = v[1];
                                  ++k;
                              }
                              return true;
                          });
        integral += y[2];
    }
    {
        double d;
        double c = u.chi_tail_series(o.tail_switch, &d);
        State3 y{c, d, 0.0};
        std::size_t k = i_tail;
        double probe_x = o.tail_switch / 4.0, probe_chi = 0.0;
        ode::integrate<3>(chi_rhs, o.tail_switch, y, o.match_point, chi_ode_options(o), ode::NoCeiling{},
                          [&](const ode::DenseStep<3>& st, const State3&) {
                              while (k > i_out && u.x_[k - 1] >= st.t1() && u.x_[k - 1] > o.match_point) {
                                  --k;
                                  auto v = st.value(u.x_[k]);
                                  u.chi_[k] = v[0];
                                  u.dchi_[k] = v[1];
                              }
                              if (probe_x <= st.t0 && probe_x >= st.t1()) probe_chi = st.value(probe_x)[0];
                              return true;
                          });
        integral += -y[2];
        rep.tail_mismatch = std::abs(u.chi_tail_series(probe_x, nullptr) / probe_chi - 1.0);
    }
    integral += tail_integral(u.tail_coef_, amp, o.tail_switch);
    u.chi_integral_ = integral;

    rep.slope_matching = slope;
    u.report_ = rep;
    rep.residual = tf_residual(u);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    u.report_ = rep;
    if (!(rep.residual < tolerance)) {
        std::ostringstream os;
        os << "profile residual " << rep.residual << " exceeds tolerance " << tolerance;
        throw NumericalError(os.str());
    }
    return u;
}

double phi1_at(const UniversalChi& chi, double r) {
    if (!(r > 0.0)) throw DomainError("phi1_at: radius must be positive");
    const double b = b_length();
    return chi.chi(r / b) / r;
}

double phi_Z_at(const UniversalChi& chi, double Z, double x) {
    if (!(Z > 0.0)) throw DomainError("phi_Z_at: Z must be positive");
    if (!(x > 0.0)) throw DomainError("phi_Z_at: radius must be positive");
    const double k = std::cbrt(Z);
    return Z * k * phi1_at(chi, k * x);
}

namespace {

// (1/pi) int_0^inf sqrt(Phi(r)) dr with r = s^2 on [0, 1] and r = 1/v beyond r_far.
double sqrt_potential_integral(const std::function<double(double)>& phi, double r_far, double tol,
                               double* err_out, int* intervals_out) {
    quad::Options q;
    q.abs_tol = tol / 3.0;
    q.rel_tol = 0.0;
    q.max_intervals = 20000;
    auto near = quad::integrate([&](double s) { return s > 0.0 ? 2.0 * s * std::sqrt(phi(s * s)) : 2.0; }, 0.0,
                                1.0, q);
    auto mid = quad::integrate([&](double r) { return std::sqrt(phi(r)); }, 1.0, r_far, q);
    auto far = quad::integrate(
        [&](double v) {
            if (v <= 0.0) return 9.0 * pi;  // r^2 sqrt(Phi) -> sqrt(C_inf)
            double r = 1.0 / v;
            return std::sqrt(phi(r)) * r * r;
        },
        0.0, 1.0 / r_far, q);
    if (err_out) *err_out = near.abs_error + mid.abs_error + far.abs_error;
    if (intervals_out) *intervals_out = near.intervals + mid.intervals + far.intervals;
    return (near.value + mid.value + far.value) / pi;
}

}  // namespace

ClassicalConstant classical_constant(const UniversalChi& chi, double tolerance) {
    if (!(tolerance > 0.0)) throw DomainError("classical_constant: tolerance must be positive");
    ClassicalConstant out;
    try {
        out.d_cl = sqrt_potential_integral([&](double r) { return phi1_at(chi, r); }, 100.0, tolerance,
                                           &out.quad_error, &out.quad_intervals);
    } catch (const quad::QuadratureError& e) {
        throw NumericalError(std::string("classical_constant: ") + e.what());
    }
    out.d_cl_chi_space = std::sqrt(b_length()) / pi * chi.chi_integral();
    // (1/4pi^2) int Phi^{1/2} |x|^-2 d^3x = (1/4pi^2) 4pi int Phi^{1/2} dr.
    out.d_cl_3d = out.d_cl * pi * 4.0 * pi / (4.0 * pi * pi);
    return out;
}

double classical_integral_Z(const UniversalChi& chi, double Z, double tolerance) {
    try {
        return sqrt_potential_integral([&](double x) { return phi_Z_at(chi, Z, x); }, 100.0 / std::cbrt(Z),
                                       tolerance, nullptr, nullptr);
    } catch (const quad::QuadratureError& e) {
        throw NumericalError(std::string("classical_integral_Z: ") + e.what());
    }
}

double tf_residual(const UniversalChi& chi) {
    const auto& x = chi.grid();
    const auto& c = chi.values();
    const auto& d = chi.derivs();
    const std::size_t n = x.size();
    if (n < 8) return std::numeric_limits<double>::infinity();
    // Uniform in s = ln x; p = x chi' = d chi/ds and x^2 chi'' = dp/ds - p.
    const double h = (std::log(x.back()) - std::log(x.front())) / static_cast<double>(n - 1);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = x[i] * d[i];
    double worst = 0.0;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        double dp = seven_point_derivative(&p[i], h);
        double dc = seven_point_derivative(&c[i], h);
        double lhs = (dp - p[i]) / (x[i] * x[i]);
        double cc = std::max(c[i], 0.0);
        double rhs = cc * std::sqrt(cc) / std::sqrt(x[i]);
        double scale = std::max(std::abs(lhs), std::abs(rhs));
        double r1 = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
        double r2 = std::abs(dc - p[i]) / std::max(std::abs(p[i]), std::abs(c[i]));
        if (c[i] <= 0.0) r1 = 1.0;
        worst = std::max({worst, r1, r2});
    }
    return worst;
}

std::vector<TailRow> sommerfeld_tail_report(const UniversalChi& chi, const std::vector<double>& xs) {
    std::vector<TailRow> rows;
    for (double x : xs) {
        double v = chi.chi(x);
        rows.push_back({x, std::abs(x * x * x * v / 144.0 - 1.0),
                        std::abs(chi.tail_amplitude()) * std::pow(x, -tail_exponent())});
    }
    return rows;
}

std::string profile_csv(const UniversalChi& chi) {
    std::string out = "x,chi,dchi\n";
    char buf[128];
    for (std::size_t i = 0; i < chi.grid().size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", chi.grid()[i], chi.values()[i], chi.derivs()[i]);
        out += buf;
    }
    return out;
}

std::string profile_header_json(const UniversalChi& chi) {
    nlohmann::json j;
    j["slope_origin"] = chi.slope_origin();
    j["b"] = b_length();
    j["tail_switch"] = chi.tail_switch();
    j["series_radius"] = chi.series_radius();
    j["match_point"] = chi.match_point();
    j["tail_amplitude"] = chi.tail_amplitude();
    j["chi_integral"] = chi.chi_integral();
    j["tolerances"] = {{"residual", chi.tolerance()}};
    j["points"] = chi.grid().size();
    return j.dump(2) + "\n";
}

void export_profile(const UniversalChi& chi, const std::string& csv_path, const std::string& json_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw DomainError("cannot open " + csv_path + " for writing");
    csv << profile_csv(chi);
    std::ofstream js(json_path);
    if (!js) throw DomainError("cannot open " + json_path + " for writing");
    js << profile_header_json(chi);
}

UniversalChi import_profile(const std::string& csv_path, const std::string& json_path) {
    std::ifstream js(json_path);
    if (!js) throw DomainError("cannot open " + json_path);
    nlohmann::json j;
    try {
        js >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(json_path + ": " + e.what());
    }
    std::ifstream csv(csv_path);
    if (!csv) throw DomainError("cannot open " + csv_path);
    std::string line;
    std::getline(csv, line);
    bool has_d = line.find("dchi") != std::string::npos;
    std::vector<double> x, c, d;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, e;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        x.push_back(std::stod(a));
        c.push_back(std::stod(b));
        if (has_d) {
            std::getline(ss, e, ',');
            d.push_back(std::stod(e));
        }
    }
    if (!has_d) {
        // Recover chi' from the samples: 7-point differences in ln x, one-sided fallback at the ends.
        const std::size_t n = x.size();
        if (n < 16) throw DomainError(csv_path + ": too few samples");
        d.assign(n, 0.0);
        const double h = (std::log(x.back()) - std::log(x.front())) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t k = std::clamp<std::size_t>(i, 3, n - 4);
            d[i] = seven_point_derivative(&c[k], h) / x[k];
        }
    }
    try {
        return UniversalChi::from_samples(std::move(x), std::move(c), std::move(d), j.at("slope_origin"),
                                          j.at("tail_amplitude"), j.at("series_radius"), j.at("match_point"),
                                          j.at("tail_switch"), j.at("chi_integral"),
                                          j.at("tolerances").at("residual"));
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(json_path + ": " + e.what());
    }
}

}  // namespace tfatom
