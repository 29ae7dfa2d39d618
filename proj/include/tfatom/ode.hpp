// Adaptive DOP853 integrator with continuous (dense) output.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tfatom/dop853_tableau.hpp"

namespace tfatom::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Options {
    double rtol = 1e-10;
    double atol = 1e-10;
    double h_init = 0.0;  // 0 selects the starting step automatically
    double h_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_calls = 0;
    bool stopped = false;  // observer requested termination
};

class StepUnderflow : public std::runtime_error {
public:
    StepUnderflow(double t, double h)
        : std::runtime_error(message(t, h)), t_(t), h_(h) {}
    double where() const { return t_; }
    double step() const { return h_; }

private:
    static std::string message(double t, double h) {
        std::ostringstream os;
        os << "step size underflow at t=" << t << " (h=" << h << ")";
        return os.str();
    }
    double t_, h_;
};

class StepBudgetExceeded : public std::runtime_error {
public:
    StepBudgetExceeded(double t, double h, std::size_t steps)
        : std::runtime_error(message(t, h, steps)), t_(t), h_(h) {}
    double where() const { return t_; }
    double step() const { return h_; }

private:
    static std::string message(double t, double h, std::size_t steps) {
        std::ostringstream os;
        os << "step budget of " << steps << " exhausted at t=" << t << " (last h=" << h << ")";
        return os.str();
    }
    double t_, h_;
};

// One accepted step together with its interpolation polynomial.
template <std::size_t N>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<State<N>, 8> r{};

    double t1() const { return t0 + h; }

    State<N> value(double t) const {
        State<N> y{};
        const double s = (t - t0) / h, s1 = 1.0 - s;
        for (std::size_t i = 0; i < N; ++i) {
            double a6 = r[6][i] + s * r[7][i];
            double a5 = r[5][i] + s1 * a6;
            double a4 = r[4][i] + s * a5;
            double a3 = r[3][i] + s1 * a4;
            double a2 = r[2][i] + s * a3;
            double a1 = r[1][i] + s1 * a2;
            y[i] = r[0][i] + s * a1;
        }
        return y;
    }

    // Time derivative of the interpolant.
    State<N> derivative(double t) const {
        State<N> dy{};
        const double s = (t - t0) / h, s1 = 1.0 - s;
        for (std::size_t i = 0; i < N; ++i) {
            double a6 = r[6][i] + s * r[7][i], d6 = r[7][i];
            double a5 = r[5][i] + s1 * a6, d5 = -a6 + s1 * d6;
            double a4 = r[4][i] + s * a5, d4 = a5 + s * d5;
            double a3 = r[3][i] + s1 * a4, d3 = -a4 + s1 * d4;
            double a2 = r[2][i] + s * a3, d2 = a3 + s * d3;
            double a1 = r[1][i] + s1 * a2, d1 = -a2 + s1 * d2;
            dy[i] = (a1 + s * d1) / h;
        }
        return dy;
    }
};

struct NoCeiling {
    double operator()(double) const { return std::numeric_limits<double>::infinity(); }
};

namespace detail {

template <std::size_t N>
double rms_scaled(const State<N>& v, const State<N>& y, double atol, double rtol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double sk = atol + rtol * std::abs(y[i]);
        acc += (v[i] / sk) * (v[i] / sk);
    }
    return std::sqrt(acc / N);
}

}  // namespace detail

// Integrates y' = f(t, y) from t0 to t1 (either direction).  `ceiling(t)`
// bounds |h| locally; `observer(step, y_new)` is called after every accepted
// step and may return false to stop early.
template <std::size_t N, class Rhs, class Ceiling, class Observer>
Stats integrate(Rhs&& f, double t0, State<N>& y, double t1, const Options& opt,
                Ceiling&& ceiling, Observer&& observer) {
    using namespace dop853;
    Stats st;
    if (t0 == t1) return st;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double eps = std::numeric_limits<double>::epsilon();
    auto rhs = [&](double t, const State<N>& u) {
        ++st.rhs_calls;
        return f(t, u);
    };

    double t = t0;
    State<N> k1 = rhs(t, y);

    auto hcap = [&](double tt) {
        return std::min(opt.h_max, std::min(std::abs(t1 - t0), ceiling(tt)));
    };

    double h = opt.h_init;
    if (h <= 0.0) {
        double d0 = detail::rms_scaled<N>(y, y, opt.atol, opt.rtol);
        double d1 = detail::rms_scaled<N>(k1, y, opt.atol, opt.rtol);
        double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, hcap(t));
        State<N> y1;
        for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + dir * h0 * k1[i];
        State<N> f1 = rhs(t + dir * h0, y1);
        State<N> df;
        for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - k1[i];
        double d2 = detail::rms_scaled<N>(df, y, opt.atol, opt.rtol) / h0;
        double dm = std::max(d1, d2);
        double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 8.0);
        h = std::min(100.0 * h0, h1);
    }
    h = std::min(h, hcap(t));

    const double safe = 0.9, facc1 = 1.0 / 0.333, facc2 = 1.0 / 6.0, expo1 = 0.125;
    bool reject = false, last = false;
    State<N> k2, k3, k4, k5, k6, k7, k8, k9, k10, yw;

    DenseStep<N> step;
    while (true) {
        if (st.accepted + st.rejected >= opt.max_steps) throw StepBudgetExceeded(t, h, opt.max_steps);
        if (0.1 * h <= std::abs(t) * eps * 10.0) throw StepUnderflow(t, h);
        h = std::min(h, hcap(t));
        if ((t + dir * 1.01 * h - t1) * dir >= 0.0) {
            h = std::abs(t1 - t);
            last = true;
        }
        const double hs = dir * h;

        for (std::size_t i = 0; i < N; ++i) yw[i] = y[i] + hs * a21 * k1[i];
        k2 = rhs(t + c2 * hs, yw);
        for (std::size_t i = 0; i < N; ++i) yw[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(t + c3 * hs, yw);
        for (std::size_t i = 0; i < N; ++i) yw[i] = y[i] + hs * (a41 * k1[i] + a43 * k3[i]);
        k4 = rhs(t + c4 * hs, yw);
        for (std::size_t i = 0; i < N; ++i) yw[i] = y[i] + hs * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(t + c5 * hs, yw);
        for (std::size_t i = 0; i < N; ++i) yw[i] = y[i] + hs * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = rhs(t + c6 * hs, yw);
        for (std::size_t i = 0; i < N; ++i)
            yw[i] = y[i] + hs * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = rhs(t + c7 * hs, yw);
        for (std::size_t i = 0; i < N; ++i)
            yw[i] = y[i] + hs * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
        k8 = rhs(t + c8 * hs, yw);
        for (std::size_t i = 0; i < N; ++i)
            yw[i] = y[i] + hs * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] +
                                 a98 * k8[i]);
        k9 = rhs(t + c9 * hs, yw);
        for (std::size_t i = 0; i < N; ++i)
            yw[i] = y[i] + hs * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] +
                                 a107 * k7[i] + a108 * k8[i] + a109 * k9[i]);
        k10 = rhs(t + c10 * hs, yw);
        for (std::size_t i = 0; i < N; ++i)
            yw[i] = y[i] + hs * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] +
                                 a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
        State<N> k11 = rhs(t + c11 * hs, yw);
        for (std::size_t i = 0; i < N; ++i)
            yw[i] = y[i] + hs * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] +
                                 a127 * k7[i] + a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] +
                                 a1211 * k11[i]);
        State<N> k12 = rhs(t + hs, yw);

        State<N> bsum, ynew;
        for (std::size_t i = 0; i < N; ++i) {
            bsum[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] +
                      b11 * k11[i] + b12 * k12[i];
            ynew[i] = y[i] + hs * bsum[i];
        }

        double err3 = 0.0, err5 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sk = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double e3 = bsum[i] - e31 * k1[i] - e32 * k9[i] - e33 * k12[i];
            double e5 = e51 * k1[i] + e56 * k6[i] + e57 * k7[i] + e58 * k8[i] + e59 * k9[i] +
                        e510 * k10[i] + e511 * k11[i] + e512 * k12[i];
            err3 += (e3 / sk) * (e3 / sk);
            err5 += (e5 / sk) * (e5 / sk);
        }
        double deno = err5 + 0.01 * err3;
        if (deno <= 0.0) deno = 1.0;
        double err = h * err5 * std::sqrt(1.0 / (N * deno));
        if (!std::isfinite(err)) err = 1e10;

        double fac11 = std::pow(err, expo1);
        double fac = std::max(facc2, std::min(facc1, fac11 / safe));
        double hnew = h / fac;

        if (err <= 1.0) {
            ++st.accepted;
            State<N> fnew = rhs(t + hs, ynew);

            step.t0 = t;
            step.h = hs;
            for (std::size_t i = 0; i < N; ++i) {
                step.r[0][i] = y[i];
                step.r[1][i] = ynew[i] - y[i];
                step.r[2][i] = hs * k1[i] - step.r[1][i];
                step.r[3][i] = step.r[1][i] - hs * fnew[i] - step.r[2][i];
                step.r[4][i] = d41 * k1[i] + d46 * k6[i] + d47 * k7[i] + d48 * k8[i] + d49 * k9[i] +
                               d410 * k10[i] + d411 * k11[i] + d412 * k12[i];
                step.r[5][i] = d51 * k1[i] + d56 * k6[i] + d57 * k7[i] + d58 * k8[i] + d59 * k9[i] +
                               d510 * k10[i] + d511 * k11[i] + d512 * k12[i];
                step.r[6][i] = d61 * k1[i] + d66 * k6[i] + d67 * k7[i] + d68 * k8[i] + d69 * k9[i] +
                               d610 * k10[i] + d611 * k11[i] + d612 * k12[i];
                step.r[7][i] = d71 * k1[i] + d76 * k6[i] + d77 * k7[i] + d78 * k8[i] + d79 * k9[i] +
                               d710 * k10[i] + d711 * k11[i] + d712 * k12[i];
            }
            for (std::size_t i = 0; i < N; ++i)
                yw[i] = y[i] + hs * (a141 * k1[i] + a147 * k7[i] + a148 * k8[i] + a149 * k9[i] +
                                     a1410 * k10[i] + a1411 * k11[i] + a1412 * k12[i] + a1413 * fnew[i]);
            State<N> k14 = rhs(t + c14 * hs, yw);
            for (std::size_t i = 0; i < N; ++i)
                yw[i] = y[i] + hs * (a151 * k1[i] + a156 * k6[i] + a157 * k7[i] + a158 * k8[i] +
                                     a1511 * k11[i] + a1512 * k12[i] + a1513 * fnew[i] + a1514 * k14[i]);
            State<N> k15 = rhs(t + c15 * hs, yw);
            for (std::size_t i = 0; i < N; ++i)
                yw[i] = y[i] + hs * (a161 * k1[i] + a166 * k6[i] + a167 * k7[i] + a168 * k8[i] +
                                     a169 * k9[i] + a1613 * fnew[i] + a1614 * k14[i] + a1615 * k15[i]);
            State<N> k16 = rhs(t + c16 * hs, yw);
            for (std::size_t i = 0; i < N; ++i) {
                step.r[4][i] = hs * (step.r[4][i] + d413 * fnew[i] + d414 * k14[i] + d415 * k15[i] + d416 * k16[i]);
                step.r[5][i] = hs * (step.r[5][i] + d513 * fnew[i] + d514 * k14[i] + d515 * k15[i] + d516 * k16[i]);
                step.r[6][i] = hs * (step.r[6][i] + d613 * fnew[i] + d614 * k14[i] + d615 * k15[i] + d616 * k16[i]);
                step.r[7][i] = hs * (step.r[7][i] + d713 * fnew[i] + d714 * k14[i] + d715 * k15[i] + d716 * k16[i]);
            }

            k1 = fnew;
            y = ynew;
            t = last ? t1 : t + hs;
            if (!observer(static_cast<const DenseStep<N>&>(step), static_cast<const State<N>&>(y))) {
                st.stopped = true;
                return st;
            }
            if (last) return st;
            if (reject) hnew = std::min(hnew, h);
            reject = false;
            h = hnew;
        } else {
            ++st.rejected;
            h = h / std::min(facc1, fac11 / safe);
            reject = true;
            last = false;
        }
    }
}

template <std::size_t N, class Rhs>
Stats integrate(Rhs&& f, double t0, State<N>& y, double t1, const Options& opt) {
    return integrate<N>(std::forward<Rhs>(f), t0, y, t1, opt, NoCeiling{},
                        [](const DenseStep<N>&, const State<N>&) { return true; });
}

}  // namespace tfatom::ode
