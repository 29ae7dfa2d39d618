#include "tfatom/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "tfatom/errors.hpp"

namespace tfatom {

using std::numbers::pi;

// ------------------------------------------------------------ infinite atom

namespace {

// Asymptotic series u = e^{-kr} sum a_m r^-m of the decaying solution:
// 2 k m a_m = [l(l+1) - m(m-1)] a_{m-1} - C a_{m-3}.
struct Seed {
    double u, du, smallest;
};

Seed decaying_seed(int ell, double k, double C, double X) {
    const double ll = ell * (ell + 1.0);
    std::vector<double> a{1.0};
    double v = 1.0, dv = 0.0, prev = std::numeric_limits<double>::infinity();
    double smallest = 1.0;
    for (int m = 1; m < 2000; ++m) {
        double am = (ll - m * (m - 1.0)) * a[m - 1];
        if (m >= 3) am -= C * a[m - 3];
        am /= 2.0 * k * m;
        a.push_back(am);
        double term = am * std::pow(X, -m);
        double mag = std::abs(term);
        // a_1, a_2 vanish for l = 0, so the stopping rules start at m = 4
        if (m > 3 && mag > prev) break;  // optimal truncation
        v += term;
        dv += -m * term / X;
        if (m >= 3) {
            prev = mag;
            smallest = mag;
            if (mag < 1e-18 * std::abs(v)) break;
        }
    }
    return {v, dv - k * v, smallest / std::abs(v)};
}

}  // namespace

DecayingSolution decaying_solution(int ell, double mu, double C, const DecayOptions& opt) {
    if (ell < 0) throw DomainError("decaying_solution: ell must be non-negative");
    if (!(mu < 0.0)) throw DomainError("decaying_solution: mu must be negative");
    if (!(C > 0.0)) throw DomainError("decaying_solution: C_inf must be positive");
    DecayingSolution s;
    s.ell = ell;
    s.mu = mu;
    const double k = std::sqrt(-mu), ll = ell * (ell + 1.0);
    s.decay_start = (opt.decay_span + ell) / k;
    s.r_extract = std::pow(opt.radius_bound * C / -mu, 0.25);
    if (s.r_extract >= s.decay_start) throw DomainError("decaying_solution: extraction radius beyond the seed");
    Seed seed = decaying_seed(ell, k, C, s.decay_start);
    s.seed_remainder = seed.smallest;

    auto V = [&](double r) { return ll / (r * r) - C / (r * r * r * r) - mu; };
    auto rhs = [&](double r, const ode::State<2>& y) -> ode::State<2> { return {y[1], V(r) * y[0]}; };
    auto ceiling = [&](double r) {
        double w = -V(r);
        if (w <= 0.0) return std::numeric_limits<double>::infinity();
        return 2.0 * pi / (opt.steps_per_wavelength * std::sqrt(w));
    };
    ode::Options o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    ode::State<2> y{seed.u, seed.du};
    try {
        ode::integrate<2>(rhs, s.decay_start, y, s.r_extract, o, ceiling,
                          [&](const ode::DenseStep<2>& st, const ode::State<2>&) {
                              s.steps.push_back(st);
                              return true;
                          });
    } catch (const std::runtime_error& e) {
        throw NumericalError(std::string("decaying_solution: extraction radius unreachable: ") + e.what());
    }
    BasisPair pair = make_basis(ell, C);
    auto bv = basis_eval(pair, s.r_extract);
    const double W = basis_wronskian();
    const double A = (y[0] * bv.dG - y[1] * bv.G) / W;
    const double B = -(y[0] * bv.dF - y[1] * bv.F) / W;
    s.theta = mod_pi(std::atan2(B, A));

    // u'' from the interpolant against (V - mu) u, scaled by the largest |u''| seen.
    double worst = 0.0, scale = 0.0;
    for (const auto& st : s.steps) {
        for (double f : {0.25, 0.5, 0.75}) {
            double r = st.t0 + f * st.h;
            auto val = st.value(r);
            auto der = st.derivative(r);
            double rhs2 = V(r) * val[0];
            worst = std::max(worst, std::abs(der[1] - rhs2));
            scale = std::max(scale, std::abs(rhs2));
        }
    }
    s.residual = scale > 0.0 ? worst / scale : 0.0;
    return s;
}

double theta_of_mu(int ell, double mu, double C, const DecayOptions& opt) {
    return decaying_solution(ell, mu, C, opt).theta;
}

EigenResult channel_eigenvalue(int ell, double theta, std::pair<double, double> bracket, double C,
                               const DecayOptions& opt) {
    auto [lo, hi] = bracket;
    if (lo > hi) std::swap(lo, hi);
    if (!(hi < 0.0)) throw DomainError("channel_eigenvalue: bracket must lie in mu < 0");
    auto m = [&](double mu) { return signed_circular_difference_pi(theta_of_mu(ell, mu, C, opt), theta); };

    // Scan for sign changes; a genuine root has small |m| on both sides, a wrap jump has |m| near pi/2.
    const int N = 48;
    std::vector<double> mus(N + 1), ms(N + 1);
    for (int i = 0; i <= N; ++i) {
        mus[i] = lo + (hi - lo) * i / N;
        ms[i] = m(mus[i]);
    }
    const double mid = 0.5 * (lo + hi);
    int best = -1;
    for (int i = 0; i < N; ++i) {
        bool change = (ms[i] < 0.0) != (ms[i + 1] < 0.0) || ms[i] == 0.0;
        if (!change) continue;
        if (std::abs(ms[i]) > pi / 4 && std::abs(ms[i + 1]) > pi / 4) continue;
        if (best < 0 || std::abs(0.5 * (mus[i] + mus[i + 1]) - mid) < std::abs(0.5 * (mus[best] + mus[best + 1]) - mid))
            best = i;
    }
    if (best < 0) throw NumericalError("channel_eigenvalue: no eigenvalue in bracket");
    double a = mus[best], b = mus[best + 1], fa = ms[best];
    while (b - a > 1e-10) {
        double c = 0.5 * (a + b);
        double fc = m(c);
        if ((fc < 0.0) == (fa < 0.0)) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    EigenResult r;
    r.ell = ell;
    r.mu = 0.5 * (a + b);
    auto ds = decaying_solution(ell, r.mu, C, opt);
    r.theta = theta;
    r.decay_start = ds.decay_start;
    r.residual = ds.residual;
    r.matching = signed_circular_difference_pi(ds.theta, theta);
    return r;
}

// ---------------------------------------------------------- finite channels

ScaledChannel tf_channel(std::shared_ptr<const UniversalChi> chi, double Z, int ell) {
    if (!(Z > 0.0)) throw DomainError("tf_channel: Z must be positive");
    if (ell < 0) throw DomainError("tf_channel: ell must be non-negative");
    ScaledChannel ch;
    ch.spec = thomas_fermi_spec(std::move(chi));
    ch.lam = std::cbrt(Z);
    ch.kappa = ch.lam;
    ch.ell = ell;
    return ch;
}

namespace {

struct PruferSetup {
    double t_min, t_match, t_right;
    bool allowed;  // some classically allowed region exists
};

// q(t) of g'' = q g on the Langer line, E = mu / kappa^2.
double langer_q(const ScaledChannel& ch, double E, double t) {
    const double L = ch.ell + 0.5, r = std::exp(t);
    return L * L - ch.lam * ch.lam * r * r * ch.spec(r) - E * r * r;
}

PruferSetup prufer_setup(const ScaledChannel& ch, double E, const PruferOptions& opt) {
    const double L = ch.ell + 0.5;
    PruferSetup s;
    s.t_min = std::min(default_t_min(ch.spec, ch.lam, opt.q_min), 0.5 * std::log(opt.q_min / -E));
    const double dt = 0.01;
    double t = s.t_min, q_prev = langer_q(ch, E, t);
    double best_q = q_prev, best_t = t;
    s.allowed = false;
    double t_o = t;
    while (true) {
        double tn = t + dt;
        double q = langer_q(ch, E, tn);
        if (q < best_q) {
            best_q = q;
            best_t = tn;
        }
        if (q_prev < 0.0 && q >= 0.0) {
            s.allowed = true;
            t_o = tn;
        }
        t = tn;
        q_prev = q;
        double r = std::exp(t);
        if (q > 0.0 && -E * r * r > 100.0 * L * L && -E > 100.0 * ch.lam * ch.lam * ch.spec(r)) break;
        if (t - s.t_min > 400.0) throw NumericalError("prufer_setup: no confining region found");
    }
    s.t_match = s.allowed ? t_o : best_t;
    s.t_right = std::log(std::exp(s.t_match) + opt.decay_lengths / std::sqrt(-E));
    return s;
}

double prufer_integrate(const ScaledChannel& ch, double E, double psi, double ta, double tb, const PruferOptions& opt) {
    auto rhs = [&](double t, const ode::State<1>& y) -> ode::State<1> {
        double c = std::cos(y[0]), s = std::sin(y[0]);
        return {c * c - langer_q(ch, E, t) * s * s};
    };
    auto ceiling = [&](double t) {
        double q = langer_q(ch, E, t);
        double w = std::sqrt(std::max(std::abs(q), 1.0));
        return 2.0 * pi / (opt.steps_per_wavelength * w);
    };
    ode::Options o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    ode::State<1> y{psi};
    try {
        ode::integrate<1>(rhs, ta, y, tb, o, ceiling, [](const ode::DenseStep<1>&, const ode::State<1>&) { return true; });
    } catch (const std::runtime_error& e) {
        throw NumericalError(std::string("prufer_integrate: ") + e.what());
    }
    return y[0];
}

}  // namespace

double prufer_mismatch(const ScaledChannel& ch, double mu, const PruferOptions& opt) {
    if (!(mu < 0.0)) throw DomainError("prufer_mismatch: mu must be negative");
    const double E = mu / (ch.kappa * ch.kappa);
    const double L = ch.ell + 0.5;
    auto s = prufer_setup(ch, E, opt);
    double psi_l = prufer_integrate(ch, E, std::atan2(1.0, L), s.t_min, s.t_match, opt);
    double q_r = langer_q(ch, E, s.t_right);
    double psi_r = prufer_integrate(ch, E, std::atan2(1.0, -std::sqrt(std::max(q_r, 0.0))), s.t_right, s.t_match, opt);
    return psi_l - psi_r;
}

int eigenvalue_count_below(const ScaledChannel& ch, double mu, const PruferOptions& opt) {
    double d = prufer_mismatch(ch, mu, opt);
    return std::max(0, static_cast<int>(std::ceil(d / pi)));
}

std::vector<double> channel_eigenvalues(const ScaledChannel& ch, std::pair<double, double> window,
                                        const PruferOptions& opt) {
    auto [lo, hi] = window;
    if (lo > hi) std::swap(lo, hi);
    if (!(hi < 0.0)) throw DomainError("channel_eigenvalues: window must lie in mu < 0");
    std::vector<double> out;
    const double d_lo = prufer_mismatch(ch, lo, opt), d_hi = prufer_mismatch(ch, hi, opt);
    const int n_lo = std::max(0, static_cast<int>(std::ceil(d_lo / pi)));
    const int n_hi = std::max(0, static_cast<int>(std::ceil(d_hi / pi)));
    for (int k = n_lo; k < n_hi; ++k) {
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > opt.mu_tolerance * std::max(1.0, std::abs(a)); ++it) {
            double c = 0.5 * (a + b);
            if (prufer_mismatch(ch, c, opt) < k * pi)
                a = c;
            else
                b = c;
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

std::vector<double> finite_channel_eigenvalues(std::shared_ptr<const UniversalChi> chi, double Z, int ell,
                                               std::pair<double, double> window, const PruferOptions& opt) {
    return channel_eigenvalues(tf_channel(std::move(chi), Z, ell), window, opt);
}

double centrifugal_supremum(const UniversalChi& chi) {
    const auto& xs = chi.grid();
    const auto& vs = chi.values();
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] * vs[i] > xs[best] * vs[best]) best = i;
    double a = xs[best > 0 ? best - 1 : 0], b = xs[std::min(best + 1, xs.size() - 1)];
    auto f = [&](double x) { return -x * chi.chi(x); };
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    for (int i = 0; i < 200 && b - a > 1e-12 * b; ++i) {
        if (f(c) < f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    double x = 0.5 * (a + b);
    return b_length() * x * chi.chi(x);
}

int channel_positivity_threshold(const UniversalChi& chi, double Z) {
    if (!(Z > 0.0)) throw DomainError("channel_positivity_threshold: Z must be positive");
    const double S = std::pow(Z, 2.0 / 3.0) * centrifugal_supremum(chi);
    int l = std::max(1, static_cast<int>(std::ceil(0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * S)))));
    while (l > 1 && (l - 1.0) * l >= S) --l;
    while (l * (l + 1.0) < S) ++l;
    return l;
}

CounterexampleReport norm_resolvent_counterexample(std::shared_ptr<const UniversalChi> chi, double d_cl, int ell_max,
                                                   const CounterexampleOptions& opt) {
    if (ell_max < 1) throw DomainError("norm_resolvent_counterexample: ell_max must be at least 1");
    if (!(d_cl > 0.0)) throw DomainError("norm_resolvent_counterexample: d_cl must be positive");
    CounterexampleReport rep;
    long long z_prev = 0;
    const long double inv = 1.0L / (static_cast<long double>(d_cl) * d_cl * d_cl);
    const int jobs = std::max(1, opt.jobs);
    std::ostringstream diag;
    for (int l = 1; l <= ell_max; ++l) {
        CounterexampleRow row;
        row.ell = l;
        row.theta = theta_of_mu(l, -1.0, c_infinity(), opt.decay);
        row.tau = mod_pi(row.theta - 0.5 * l * pi - 0.25 * pi) / pi;
        const double tol = 1.0 / l;
        auto charge = [&](long long n) {
            long double x = n + static_cast<long double>(row.tau);
            return static_cast<long long>(std::floor(inv * x * x * x));
        };
        // First index past the previous row, then a geometric stride through the sequence.
        long long n0 = std::max(1LL, static_cast<long long>(std::floor(d_cl * std::cbrt(static_cast<double>(z_prev)))) - 2);
        while (charge(n0) <= z_prev) ++n0;
        std::vector<std::pair<long long, long long>> cand;  // (n, Z)
        for (long long n = n0; n <= opt.n_max;
             n = std::max(n + 1, static_cast<long long>(std::ceil(n * opt.stride_growth)))) {
            long long Z = charge(n);
            if (Z > z_prev && Z >= 1 && (cand.empty() || Z > cand.back().second)) cand.emplace_back(n, Z);
        }
        auto probe = [&](long long Z) {
            // Upper edge pulled in slightly so l = 1 does not probe mu = 0.
            auto mus = finite_channel_eigenvalues(chi, static_cast<double>(Z), l, {-1.0 - tol, -1.0 + 0.999 * tol},
                                                  opt.prufer);
            double best = std::numeric_limits<double>::quiet_NaN();
            for (double m : mus)
                if (std::abs(m + 1.0) < tol && (std::isnan(best) || std::abs(m + 1.0) < std::abs(best + 1.0))) best = m;
            return best;
        };
        bool found = false;
        for (std::size_t i = 0; i < cand.size() && !found; i += jobs) {
            std::vector<std::future<double>> fut;
            for (std::size_t j = i; j < std::min(cand.size(), i + jobs); ++j)
                fut.push_back(std::async(std::launch::async, probe, cand[j].second));
            for (std::size_t j = 0; j < fut.size(); ++j) {
                double m = fut[j].get();
                if (!found && !std::isnan(m)) {
                    found = true;
                    row.n = cand[i + j].first;
                    row.Z = cand[i + j].second;
                    row.mu = m;
                    row.residual = std::abs(m + 1.0);
                }
            }
        }
        if (!found) {
            diag << "l=" << l << ": no eigenvalue within " << tol << " of -1 for n <= " << opt.n_max;
            rep.diagnostics = diag.str();
            return rep;
        }
        z_prev = row.Z;
        rep.rows.push_back(row);
    }
    rep.complete = true;
    return rep;
}

}  // namespace tfatom
