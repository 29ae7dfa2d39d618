#include "tfatom/zero_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tfatom/errors.hpp"
#include "tfatom/quadrature.hpp"

namespace tfatom {

using std::numbers::pi;

// ---------------------------------------------------------------- potentials

double PotentialSpec::kappa_of_lambda(double lam) const {
    if (!std::isfinite(beta)) return 1.0;
    return std::pow(lam, -2.0 / (2.0 + beta));
}

PotentialSpec thomas_fermi_spec(std::shared_ptr<const UniversalChi> chi) {
    PotentialSpec s;
    s.alpha = -1.0;
    s.c0 = 1.0;
    s.beta = -4.0;
    s.c_infinity = c_infinity();
    s.eval = [chi](double r) { return phi1_at(*chi, r); };
    s.name = "thomas-fermi";
    return s;
}

PotentialSpec pure_power_spec(double alpha, double c0) {
    if (!(alpha > -2.0) || !(c0 > 0.0)) throw DomainError("pure_power_spec: need alpha > -2 and c0 > 0");
    PotentialSpec s;
    s.alpha = alpha;
    s.c0 = c0;
    s.beta = std::numeric_limits<double>::quiet_NaN();
    s.c_infinity = std::numeric_limits<double>::quiet_NaN();
    s.eval = [alpha, c0](double r) { return c0 * std::pow(r, alpha); };
    std::ostringstream os;
    os << "power(alpha=" << alpha << ",c0=" << c0 << ")";
    s.name = os.str();
    return s;
}

PotentialSpec interpolating_spec(double alpha, double c0, double beta, double c_inf) {
    if (!(alpha > -2.0) || !(beta < -2.0) || !(c0 > 0.0) || !(c_inf > 0.0))
        throw DomainError("interpolating_spec: need alpha > -2, beta < -2, c0 > 0, c_inf > 0");
    PotentialSpec s;
    s.alpha = alpha;
    s.c0 = c0;
    s.beta = beta;
    s.c_infinity = c_inf;
    const double ratio = c0 / c_inf, gap = alpha - beta;
    s.eval = [=](double r) { return c0 * std::pow(r, alpha) / (1.0 + ratio * std::pow(r, gap)); };
    std::ostringstream os;
    os << "interpolating(alpha=" << alpha << ",beta=" << beta << ")";
    s.name = os.str();
    return s;
}

PotentialSpec coulomb_spec(double charge) {
    if (!(charge > 0.0)) throw DomainError("coulomb_spec: charge must be positive");
    PotentialSpec s;
    s.alpha = -1.0;
    s.c0 = charge;
    s.beta = -1.0;
    s.c_infinity = charge;
    s.eval = [charge](double r) { return charge / r; };
    s.name = "coulomb";
    return s;
}

SpecCheck validate_spec(const PotentialSpec& spec, double tol) {
    SpecCheck c;
    const double r0 = 1e-10;
    c.origin_ratio = spec(r0) / (spec.c0 * std::pow(r0, spec.alpha));
    c.origin_ok = std::abs(c.origin_ratio - 1.0) < tol;
    if (std::isfinite(spec.beta) && spec.beta < -2.0) {
        const double r1 = 1e8;
        c.tail_ratio = spec(r1) / (spec.c_infinity * std::pow(r1, spec.beta));
        c.tail_ok = std::abs(c.tail_ratio - 1.0) < tol;
    }
    c.positive = true;
    for (int k = 0; k <= 400; ++k) {
        double r = std::pow(10.0, -8.0 + 16.0 * k / 400.0);
        double v = spec(r);
        if (!(v > 0.0) || !std::isfinite(v)) c.positive = false;
    }
    return c;
}

// ------------------------------------------------------------ angle helpers

double mod_pi(double theta) {
    double m = std::fmod(theta, pi);
    if (m < 0.0) m += pi;
    if (m >= pi) m -= pi;
    return m;
}

double signed_circular_difference_pi(double a, double b) {
    double d = mod_pi(a - b);
    if (d >= 0.5 * pi) d -= pi;
    return d;
}

double circular_distance_pi(double a, double b) { return std::abs(signed_circular_difference_pi(a, b)); }

// ------------------------------------------------------- regular solutions

namespace {

double integrated_abs(const std::function<double(double)>& W, double x) {
    quad::Options q;
    q.abs_tol = 1e-300;
    q.rel_tol = 1e-13;
    q.max_intervals = 20000;
    q.throw_on_failure = false;
    auto r = quad::integrate_from_minus_infinity([&](double y) { return std::abs(W(y)); }, x, q);
    return r.value;
}

// Cumulative panel integrals with the 4-point rule h/24 (-f0 + 13 f1 + 13 f2 - f3).
double panel(const std::vector<double>& f, std::size_t k, double h) {
    const std::size_t n = f.size() - 1;
    if (k == 0) return h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    if (k + 1 == n) return h / 12.0 * (-f[n - 2] + 8.0 * f[n - 1] + 5.0 * f[n]);
    return h / 24.0 * (-f[k - 1] + 13.0 * f[k] + 13.0 * f[k + 1] - f[k + 2]);
}

}  // namespace

SeriesResult regular_solution_series(const std::function<double(double)>& W, double L, double x_eval,
                                     const SeriesOptions& opt) {
    if (!(L > 0.0)) throw DomainError("regular_solution_series: L must be positive");
    SeriesResult res;
    res.Q = integrated_abs(W, x_eval);
    if (!std::isfinite(res.Q)) throw DomainError("regular_solution_series: Q(x) is not finite");

    // Left cut-off where the neglected mass is far below the tolerance.
    const double neglect = opt.tolerance * 1e-3 * std::max(1.0, res.Q);
    double span = 1.0, t_lo = x_eval - span;
    while (integrated_abs(W, t_lo) > neglect) {
        span *= 1.5;
        t_lo = x_eval - span;
        if (span > 5000.0) throw DomainError("regular_solution_series: W does not decay towards -infinity");
    }
    std::size_t n = static_cast<std::size_t>(std::ceil((x_eval - t_lo) / opt.step));
    n = std::max<std::size_t>(n, 8);
    const double h = (x_eval - t_lo) / static_cast<double>(n);
    std::vector<double> t(n + 1), w(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        t[k] = t_lo + h * k;
        w[k] = W(t[k]);
    }
    std::vector<double> u(n + 1, 1.0), f(n + 1), ef(n + 1), A(n + 1), K(n + 1);
    double sum_u = 1.0, sum_d = L;  // e^{-Lx} g and e^{-Lx} g' accumulators at x_eval
    double bound = 1.0;
    int i = 0;
    const double decay = std::exp(-2.0 * L * h);
    for (i = 1; i <= opt.max_terms; ++i) {
        for (std::size_t k = 0; k <= n; ++k) f[k] = w[k] * u[k];
        A[0] = 0.0;
        K[0] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            A[k + 1] = A[k] + panel(f, k, h);
            // int_{t_k}^{t_k+1} e^{-2L(t_{k+1} - y)} f(y) dy
            std::size_t j0 = (k == 0) ? 0 : k - 1, j1 = std::min(n, k + 2);
            for (std::size_t j = j0; j <= j1; ++j) ef[j] = std::exp(-2.0 * L * (t[k + 1] - t[j])) * f[j];
            K[k + 1] = decay * K[k] + panel(ef, k, h);
        }
        for (std::size_t k = 0; k <= n; ++k) u[k] = (A[k] - K[k]) / (2.0 * L);
        sum_u += u[n];
        sum_d += L * u[n] + K[n];
        bound *= res.Q / (L * i);
        if (bound < opt.tolerance) break;
    }
    res.terms = i;
    const double e = std::exp(L * x_eval);
    res.remainder = e * bound;
    res.g = e * sum_u;
    res.dg = e * sum_d;
    return res;
}

std::function<double(double)> langer_potential(const PotentialSpec& spec, double lam) {
    return [spec, lam](double t) {
        double r = std::exp(t);
        if (r <= 0.0) return 0.0;
        return -lam * lam * r * r * spec(r);
    };
}

PerturbationBound perturbation_bound(const std::function<double(double)>& W,
                                     const std::function<double(double)>& W_alt, double L, double x) {
    if (!(L > 0.0)) throw DomainError("perturbation_bound: L must be positive");
    PerturbationBound b;
    b.Q = integrated_abs(W, x);
    b.Q_alt = integrated_abs(W_alt, x);
    b.D = integrated_abs([&](double y) { return W(y) - W_alt(y); }, x);
    if (!std::isfinite(b.Q) || !std::isfinite(b.Q_alt) || !std::isfinite(b.D))
        throw DomainError("perturbation_bound: divergent integral");
    b.bound = std::exp(L * x) / L * b.D * std::exp((b.Q + b.Q_alt) / L);
    return b;
}

double default_t_min(const PotentialSpec& spec, double lam, double q_min) {
    const double p = 2.0 + spec.alpha;
    return std::log(q_min * p / (lam * lam * spec.c0)) / p;
}

std::pair<double, double> ChannelTrajectory::at(double t) const {
    if (dense_.empty()) throw NumericalError("trajectory has no steps");
    if (t < t_min() - 1e-12 || t > t_max() + 1e-12) {
        std::ostringstream os;
        os << "trajectory evaluated at t=" << t << " outside [" << t_min() << ", " << t_max() << "]";
        throw DomainError(os.str());
    }
    auto it = std::lower_bound(dense_.begin(), dense_.end(), t,
                               [](const ode::DenseStep<2>& s, double v) { return s.t1() < v; });
    if (it == dense_.end()) it = std::prev(dense_.end());
    auto v = it->value(t);
    return {v[0], v[1]};
}

std::pair<double, double> ChannelTrajectory::w_at(double rho) const {
    auto [g, gt] = at(std::log(rho));
    const double s = std::sqrt(rho);
    return {s * g, (0.5 * g + gt) / s};
}

ChannelTrajectory regular_solution_ode(const PotentialSpec& spec, double lam, int ell,
                                       std::pair<double, double> t_range, const TrajectoryOptions& opt) {
    if (ell < 0) throw DomainError("regular_solution_ode: ell must be non-negative");
    if (!(lam > 0.0)) throw DomainError("regular_solution_ode: lambda must be positive");
    ChannelTrajectory tr;
    tr.ell = ell;
    tr.L = ell + 0.5;
    tr.lam = lam;
    tr.kappa = spec.kappa_of_lambda(lam);
    double t0 = std::isnan(t_range.first) ? default_t_min(spec, lam, opt.q_min) : t_range.first;
    double t1 = t_range.second;
    if (!(t1 > t0)) throw DomainError("regular_solution_ode: empty t range");
    const double L = tr.L, L2 = L * L, lam2 = lam * lam;
    auto V = [&](double t) {
        double r = std::exp(t);
        return lam2 * r * r * spec(r) - L2;
    };
    auto rhs = [&](double t, const ode::State<2>& y) -> ode::State<2> { return {y[1], -V(t) * y[0]}; };
    auto ceiling = [&](double t) {
        double v = V(t);
        if (v <= 0.0) return std::numeric_limits<double>::infinity();
        return 2.0 * pi / (opt.steps_per_wavelength * std::sqrt(v));
    };
    ode::Options o;
    o.rtol = opt.rtol;
    o.atol = 0.0;
    o.max_steps = opt.max_steps;
    const double e0 = std::exp(L * t0);
    ode::State<2> y{e0, L * e0};
    // Absolute tolerance relative to the local size of the solution.
    o.atol = opt.atol * e0;
    tr.t_grid.push_back(t0);
    tr.g_values.push_back(y[0]);
    tr.g_derivs.push_back(y[1]);
    tr.normalization = 1.0;
    try {
        // Integrate in chunks so the absolute floor follows the growth of g.
        double ta = t0;
        while (ta < t1) {
            double tb = std::min(t1, ta + 2.0);
            double scale = std::max(std::abs(y[0]), std::abs(y[1]));
            o.atol = opt.atol * scale;
            o.h_init = 0.0;
            ode::integrate<2>(rhs, ta, y, tb, o, ceiling, [&](const ode::DenseStep<2>& st, const ode::State<2>& s) {
                tr.dense_.push_back(st);
                tr.t_grid.push_back(st.t1());
                tr.g_values.push_back(s[0]);
                tr.g_derivs.push_back(s[1]);
                return true;
            });
            ta = tb;
            if (tr.dense_.size() > opt.max_steps) throw ode::StepBudgetExceeded(ta, 0.0, opt.max_steps);
        }
    } catch (const ode::StepBudgetExceeded& e) {
        double v = V(e.where());
        std::ostringstream os;
        os << e.what() << "; local wavelength " << (v > 0.0 ? 2.0 * pi / std::sqrt(v) : 0.0);
        throw NumericalError(os.str());
    } catch (const ode::StepUnderflow& e) {
        throw NumericalError(std::string("regular_solution_ode: ") + e.what());
    }
    return tr;
}

// ---------------------------------------------------------- phase extraction

PhaseWindow bessel_window(const BasisPair& pair, double z_lo, double z_hi, int samples) {
    if (!(z_lo > 0.0 && z_hi > z_lo)) throw DomainError("bessel_window: need 0 < z_lo < z_hi");
    return {pair.a / z_hi, pair.a / z_lo, samples};
}

namespace {

PhaseMeasurement extract_impl(const ChannelTrajectory& traj, const BasisPair& pair, const PhaseWindow& win,
                              const PotentialSpec* spec, const ExtractOptions& opt) {
    if (!(win.r_lo > 0.0 && win.r_hi >= win.r_lo) || win.samples < 1)
        throw DomainError("extract_boundary_phase: bad window");
    PhaseMeasurement m;
    m.lam = traj.lam;
    m.ell = traj.ell;
    m.r_lo = win.r_lo;
    m.r_hi = win.r_hi;
    const double k = traj.kappa, W = basis_wronskian();
    const int n = win.samples;
    std::vector<double> xs(n), fs(n), Fs(n), Gs(n), As(n), Bs(n);
    double A = 0.0, B = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = n == 1 ? win.r_lo : win.r_lo * std::pow(win.r_hi / win.r_lo, static_cast<double>(i) / (n - 1));
        auto [w, dw] = traj.w_at(k * x);
        double f = w, df = k * dw;
        auto bv = basis_eval(pair, x);
        As[i] = (f * bv.dG - df * bv.G) / W;
        Bs[i] = -(f * bv.dF - df * bv.F) / W;
        A += As[i];
        B += Bs[i];
        xs[i] = x;
        fs[i] = f;
        Fs[i] = bv.F;
        Gs[i] = bv.G;
    }
    A /= n;
    B /= n;
    m.theta_mod_pi = mod_pi(std::atan2(B, A));
    double fmax = 0.0, dev = 0.0, spread = 0.0;
    for (int i = 0; i < n; ++i) {
        fmax = std::max(fmax, std::abs(fs[i]));
        dev = std::max(dev, std::abs(fs[i] - (A * Fs[i] + B * Gs[i])));
        spread = std::max(spread, circular_distance_pi(std::atan2(Bs[i], As[i]), m.theta_mod_pi));
    }
    m.fit_residual = fmax > 0.0 ? dev / fmax : std::numeric_limits<double>::infinity();
    m.theta_spread = spread;
    if (spec && std::isfinite(spec->beta)) {
        for (int i = 0; i < n; ++i) {
            double rho = k * xs[i];
            double tail = spec->c_infinity * std::pow(rho, spec->beta);
            m.tail_deviation = std::max(m.tail_deviation, std::abs((*spec)(rho) / tail - 1.0));
        }
    }
    m.valid = m.fit_residual < opt.fit_threshold;
    return m;
}

}  // namespace

PhaseMeasurement extract_boundary_phase(const ChannelTrajectory& traj, const BasisPair& pair,
                                        const PhaseWindow& window, const ExtractOptions& opt) {
    return extract_impl(traj, pair, window, nullptr, opt);
}

PhaseMeasurement extract_boundary_phase(const ChannelTrajectory& traj, const BasisPair& pair,
                                        const PhaseWindow& window, const PotentialSpec& spec,
                                        const ExtractOptions& opt) {
    return extract_impl(traj, pair, window, &spec, opt);
}

double predicted_theta(double tau, int ell, double alpha, double beta) {
    const double k = 2.0 * ell + 1.0;
    return mod_pi(pi * (tau - k / (4.0 + 2.0 * alpha) - k / (4.0 + 2.0 * beta) - 0.5));
}

PhaseMeasurement measure_channel_phase(const PotentialSpec& spec, double lam, int ell, const SweepWindow& w,
                                       const TrajectoryOptions& topt, const ExtractOptions& eopt) {
    if (!(spec.beta == -4.0)) throw DomainError("measure_channel_phase: only the beta = -4 tail basis is available");
    BasisPair pair = make_basis(ell, spec.c_infinity);
    const double s = w.scale_by_L ? ell + 0.5 : 1.0;
    PhaseWindow win = bessel_window(pair, s * w.z_lo, s * w.z_hi);
    const double kappa = spec.kappa_of_lambda(lam);
    double t_max = std::log(kappa * win.r_hi) + 0.05;
    auto tr = regular_solution_ode(spec, lam, ell, {std::numeric_limits<double>::quiet_NaN(), t_max}, topt);
    return extract_boundary_phase(tr, pair, win, spec, eopt);
}

// --------------------------------------------------------------- JWKB phase

namespace {

quad::Options tight_quad() {
    quad::Options q;
    q.abs_tol = 1e-13;
    q.rel_tol = 1e-13;
    q.max_intervals = 20000;
    return q;
}

double bisect_root(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        double fm = f(m);
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Sign changes of y^2 Phi(y) - c2/lam^2 on (0, x].
std::vector<double> turning_points(const PotentialSpec& spec, double lam, double c2, double x) {
    auto s = [&](double y) { return y * y * spec(y) - c2 / (lam * lam); };
    double guess = std::pow(c2 / (lam * lam * spec.c0), 1.0 / (2.0 + spec.alpha));
    double y = std::min(guess * 1e-3, x * 1e-3);
    while (s(y) > 0.0 && y > 1e-300) y *= 1e-3;
    std::vector<double> roots;
    const int per_decade = 64;
    const double ratio = std::pow(10.0, 1.0 / per_decade);
    double prev = s(y);
    while (y < x) {
        double yn = std::min(x, y * ratio);
        double cur = s(yn);
        if ((cur > 0.0) != (prev > 0.0)) roots.push_back(bisect_root(s, y, yn));
        y = yn;
        prev = cur;
    }
    return roots;
}

// lam int_{a}^{b} sqrt(V) where V >= 0 on [a, b] and may vanish like a square root at the ends.
double allowed_integral(const PotentialSpec& spec, double lam, double c2, double a, double b) {
    auto V = [&](double y) { return std::max(spec(y) - c2 / (lam * lam * y * y), 0.0); };
    // y = a + (b - a)(1 - cos(pi u))/2 smooths both square-root ends.
    auto f = [&](double u) {
        double y = a + (b - a) * 0.5 * (1.0 - std::cos(pi * u));
        double dy = (b - a) * 0.5 * pi * std::sin(pi * u);
        return std::sqrt(V(y)) * dy;
    };
    // Split so that the substitution does not smear decades of scale.
    if (b / a > 4.0) {
        double m = 2.0 * a;
        double head = allowed_integral(spec, lam, c2, a, m);
        auto g = [&](double s) {
            double y = std::exp(s);
            return std::sqrt(V(y)) * y;
        };
        auto tail = quad::integrate(g, std::log(m), std::log(b), tight_quad());
        return head + lam * tail.value;
    }
    return lam * quad::integrate(f, 0.0, 1.0, tight_quad()).value;
}

// lam int_0^X sqrt(Phi) dr with r = X s^p, p = 4/(2+alpha).
double full_phase(const PotentialSpec& spec, double lam, double X) {
    const double p = 4.0 / (2.0 + spec.alpha);
    auto f = [&](double s) {
        double r = X * std::pow(s, p);
        if (r < 1e-200) return 0.0;
        return std::sqrt(spec(r)) * X * p * std::pow(s, p - 1.0);
    };
    return lam * quad::integrate(f, 0.0, 1.0, tight_quad()).value;
}

}  // namespace

WkbPhase wkb_phase_integral(const PotentialSpec& spec, double lam, int ell, double x, bool langer) {
    if (!(x > 0.0)) throw DomainError("wkb_phase_integral: x must be positive");
    if (!(lam > 0.0)) throw DomainError("wkb_phase_integral: lambda must be positive");
    WkbPhase out;
    const double c2 = langer ? (ell + 0.5) * (ell + 0.5) : ell * (ell + 1.0);
    if (c2 == 0.0) {
        out.phase = full_phase(spec, lam, x);
        return out;
    }
    auto roots = turning_points(spec, lam, c2, x);
    auto allowed = [&](double y) { return y * y * spec(y) - c2 / (lam * lam) > 0.0; };
    if (roots.empty()) {
        out.forbidden = !allowed(x);
        if (!out.forbidden) out.phase = allowed_integral(spec, lam, c2, x * 1e-300, x);
        return out;
    }
    out.turning_point = roots.front();
    roots.push_back(x);
    for (std::size_t i = 0; i + 1 < roots.size(); i += 2) out.phase += allowed_integral(spec, lam, c2, roots[i], roots[i + 1]);
    return out;
}

double wkb_phase_pure_power(double alpha, double c0, double lam, int ell, double x) {
    const double L = ell + 0.5, k = 1.0 + 0.5 * alpha;
    const double u = lam * std::sqrt(c0) * std::pow(x, k);
    if (u <= L) return 0.0;
    const double s = std::sqrt(u * u - L * L);
    return (s - L * std::atan(s / L)) / k;
}

double phase_offset(double alpha, int ell) { return (2.0 * ell + 1.0) * pi / (4.0 + 2.0 * alpha); }

double phase_offset_measurement(const PotentialSpec& spec, double lam, int ell, double X) {
    if (!(X > 0.0)) throw DomainError("phase_offset_measurement: X must be positive");
    const double L = ell + 0.5, c2 = L * L;
    auto roots = turning_points(spec, lam, c2, X);
    if (roots.empty()) return full_phase(spec, lam, X);
    const double y1 = roots.front();
    double d = full_phase(spec, lam, y1);
    // Beyond y1: lam (sqrt(Phi) - sqrt(V_+)) = (c2/(lam y^2)) / (sqrt(Phi) + sqrt(V)) where V > 0.
    auto f = [&](double y) {
        double phi = spec(y);
        double e = c2 / (lam * lam * y * y);
        if (phi <= e) return lam * std::sqrt(phi);
        return (c2 / (lam * y * y)) / (std::sqrt(phi) + std::sqrt(phi - e));
    };
    const double m = std::min(X, 2.0 * y1);
    d += quad::integrate([&](double u) { return f(y1 + (m - y1) * u * u) * 2.0 * (m - y1) * u; }, 0.0, 1.0,
                         tight_quad())
             .value;
    if (X > m) {
        d += quad::integrate(
                 [&](double s) {
                     double y = std::exp(s);
                     return f(y) * y;
                 },
                 std::log(m), std::log(X), tight_quad())
                 .value;
    }
    return d;
}

double offset_first_order_coefficient(const PotentialSpec& spec, double X) {
    const double a = spec.alpha, c0 = spec.c0, k = 1.0 + 0.5 * a;
    double K = -std::pow(X, -k) / (std::sqrt(c0) * k);
    // Written through q = Phi / (c0 r^alpha) so that q -> 1 does not amplify rounding.
    auto integrand = [&](double r) {
        double q = spec(r) / (c0 * std::pow(r, a));
        return (1.0 / std::sqrt(q) - 1.0) * std::pow(r, -0.5 * a - 2.0) / std::sqrt(c0);
    };
    // Below r_c the integrand is a power law; its exponent is read off two samples.
    const double rc = 1e-6 * std::min(X, 1.0);
    const double f1 = integrand(rc), f2 = integrand(2.0 * rc);
    if (f1 != 0.0 && f2 != 0.0 && (f1 > 0.0) == (f2 > 0.0)) {
        double p = std::log2(f2 / f1);
        if (p > -1.0) K += f1 * rc / (p + 1.0);
    }
    quad::Options q = tight_quad();
    q.abs_tol = 1e-11;
    K += quad::integrate(
             [&](double u) {
                 double r = std::exp(u);
                 return integrand(r) * r;
             },
             std::log(rc), std::log(X), q)
             .value;
    return K;
}

double offset_balance_point(const PotentialSpec& spec) {
    double lo = std::log(1e-6), hi = std::log(1e6);
    if (offset_first_order_coefficient(spec, std::exp(lo)) >= 0.0 ||
        offset_first_order_coefficient(spec, std::exp(hi)) <= 0.0)
        throw NumericalError("offset_balance_point: no sign change of the first-order term on [1e-6, 1e6]");
    for (int i = 0; i < 100 && hi - lo > 1e-13; ++i) {
        double m = 0.5 * (lo + hi);
        (offset_first_order_coefficient(spec, std::exp(m)) < 0.0 ? lo : hi) = m;
    }
    return std::exp(0.5 * (lo + hi));
}

WkbAnsatzResult wkb_ansatz_error(const PotentialSpec& spec, double lam, int ell, std::pair<double, double> interval,
                                 bool langer_corrected, int samples) {
    const double x1 = interval.first, x2 = interval.second;
    if (!(x1 > 0.0 && x2 > x1)) throw DomainError("wkb_ansatz_error: bad interval");
    if (samples < 16) throw DomainError("wkb_ansatz_error: need at least 16 samples");
    WkbAnsatzResult res;
    auto tr = regular_solution_ode(spec, lam, ell, {std::numeric_limits<double>::quiet_NaN(), std::log(x2) + 0.01});
    const double c2 = langer_corrected ? (ell + 0.5) * (ell + 0.5) : ell * (ell + 1.0);
    const double L2 = (ell + 0.5) * (ell + 0.5);
    std::vector<double> xs(samples), S(samples), y(samples), c(samples);
    auto Vp = [&](double r) { return std::max(spec(r) - c2 / (lam * lam * r * r), 0.0); };
    S[0] = wkb_phase_integral(spec, lam, ell, x1, langer_corrected).phase;
    for (int i = 0; i < samples; ++i) {
        xs[i] = x1 + (x2 - x1) * i / (samples - 1);
        if (i > 0)
            S[i] = S[i - 1] +
                   lam * quad::integrate([&](double r) { return std::sqrt(Vp(r)); }, xs[i - 1], xs[i], tight_quad()).value;
        if (spec(xs[i]) - L2 / (lam * lam * xs[i] * xs[i]) <= 0.0) res.outside_window = true;
        auto [w, dw] = tr.w_at(xs[i]);
        (void)dw;
        y[i] = std::pow(spec(xs[i]), 0.25) * w;
        c[i] = std::cos(S[i] - 0.25 * pi);
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < samples; ++i) {
        num += y[i] * c[i];
        den += c[i] * c[i];
    }
    res.phase_span = S.back() - S.front();
    res.degenerate = res.phase_span < pi || den == 0.0;
    res.amplitude = den > 0.0 ? num / den : 0.0;
    if (res.amplitude == 0.0) {
        res.degenerate = true;
        res.sup_deviation = std::numeric_limits<double>::infinity();
        return res;
    }
    for (int i = 0; i < samples; ++i) {
        res.sup_deviation = std::max(res.sup_deviation, std::abs(y[i] / res.amplitude - c[i]));
        if (i > 0 && i + 1 < samples && std::abs(y[i]) >= std::abs(y[i - 1]) && std::abs(y[i]) >= std::abs(y[i + 1]))
            res.envelope.push_back(std::abs(y[i] / res.amplitude));
    }
    return res;
}

}  // namespace tfatom
