#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "support.hpp"
#include "tfatom/ode.hpp"
#include "tfatom/specfun.hpp"
#include "tfatom/zero_energy.hpp"

using namespace tfatom;
using std::numbers::pi;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

PotentialSpec tf() { return thomas_fermi_spec(fixture::chi()); }
PotentialSpec synthetic() { return interpolating_spec(0.0, 1.0, -4.0, 1.0); }

// Exact tail-equation solution cos(th) F + sin(th) G, stored as a Langer-line trajectory.
ChannelTrajectory tail_trajectory(int ell, double th, double r0, double r1) {
    auto pair = make_basis(ell, c_infinity());
    ChannelTrajectory tr;
    tr.ell = ell;
    tr.L = ell + 0.5;
    auto v = basis_eval(pair, r0);
    double f = std::cos(th) * v.F + std::sin(th) * v.G, df = std::cos(th) * v.dF + std::sin(th) * v.dG;
    ode::State<2> y{f / std::sqrt(r0), std::sqrt(r0) * df - 0.5 * f / std::sqrt(r0)};
    const double L2 = tr.L * tr.L, C = c_infinity();
    ode::Options o;
    o.rtol = 1e-13;
    o.atol = 1e-300;
    ode::integrate<2>(
        [&](double t, const ode::State<2>& u) { return ode::State<2>{u[1], (L2 - C * std::exp(-2 * t)) * u[0]}; },
        std::log(r0), y, std::log(r1), o, ode::NoCeiling{}, [&](const ode::DenseStep<2>& s, const ode::State<2>& u) {
            if (tr.dense_.empty()) tr.t_grid.push_back(s.t0);
            tr.dense_.push_back(s);
            tr.t_grid.push_back(s.t1());
            tr.g_values.push_back(u[0]);
            tr.g_derivs.push_back(u[1]);
            return true;
        });
    return tr;
}

}  // namespace

TEST_CASE("angle helpers") {
    CHECK(mod_pi(-0.1) == doctest::Approx(pi - 0.1));
    CHECK(mod_pi(3 * pi + 0.2) == doctest::Approx(0.2));
    CHECK(circular_distance_pi(0.01, pi - 0.01) == doctest::Approx(0.02));
    CHECK(signed_circular_difference_pi(0.01, pi - 0.01) == doctest::Approx(0.02));
    CHECK(signed_circular_difference_pi(pi - 0.01, 0.01) == doctest::Approx(-0.02));
}

TEST_CASE("predicted angle") {
    CHECK(predicted_theta(0.0, 0, -1.0, -4.0) == doctest::Approx(pi / 4));
    for (int l = 0; l < 6; ++l)
        for (double tau : {0.0, 0.3, 0.5}) {
            CHECK(circular_distance_pi(predicted_theta(tau, l, -1.0, -4.0), pi * (tau + l / 2.0 + 0.25)) < 1e-12);
            CHECK(predicted_theta(tau + 1, l, -0.5, -5.0) == doctest::Approx(predicted_theta(tau, l, -0.5, -5.0)));
        }
    CHECK(circular_distance_pi(predicted_theta(0, 0, -1, -4), predicted_theta(0, 2, -1, -4)) < 1e-12);
    CHECK(circular_distance_pi(predicted_theta(0, 0, -1, -4), predicted_theta(0, 1, -1, -4)) ==
          doctest::Approx(pi / 2));
}

TEST_CASE("specs") {
    CHECK(validate_spec(tf()).ok());
    CHECK(validate_spec(synthetic()).ok());
    CHECK(tf().kappa_of_lambda(5.0) == doctest::Approx(5.0));
    auto s = synthetic();
    CHECK(s(1e-6) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s(1e3) * 1e12 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Picard series") {
    auto zero = [](double) { return 0.0; };
    auto r = regular_solution_series(zero, 1.5, 0.7);
    CHECK(r.g == doctest::Approx(std::exp(1.05)).epsilon(1e-15));
    CHECK(r.dg == doctest::Approx(1.5 * std::exp(1.05)).epsilon(1e-15));

    auto W = langer_potential(tf(), 5.0);
    for (double x : {-6.0, -3.0, -1.5, 0.0}) {
        auto s = regular_solution_series(W, 0.5, x);
        CHECK(std::abs(s.g) <= std::exp(0.5 * x + s.Q / 0.5));
    }

    for (int l : {0, 1}) {
        auto spec = tf();
        double t0 = default_t_min(spec, 5.0);
        auto tr = regular_solution_ode(spec, 5.0, l, {t0, t0 + 2.5});
        auto s = regular_solution_series(langer_potential(spec, 5.0), l + 0.5, t0 + 2);
        CHECK(tr.at(t0 + 2).first == doctest::Approx(s.g).epsilon(1e-8));
    }
}

TEST_CASE("trajectory contracts") {
    auto spec = tf();
    auto tr = regular_solution_ode(spec, 10.0, 1, {kNaN, 0.0});
    double t0 = tr.t_min();
    CHECK(std::exp(-tr.L * t0) * tr.at(t0).first == doctest::Approx(1.0).epsilon(1e-10));
    double rho = std::exp(t0 + 0.5);
    CHECK(tr.w_at(rho).first / std::pow(rho, 2) == doctest::Approx(1.0).epsilon(1e-6));

    // Wronskian with a second solution started in the oscillatory region stays constant
    const double L2 = tr.L * tr.L;
    auto W = langer_potential(spec, 10.0);
    ode::State<2> y{0.0, 1.0};
    ode::Options o;
    o.rtol = 1e-12;
    o.atol = 1e-14;
    double a = -3.0, first = 0.0, worst = 0.0;
    for (double t = a; t < -0.5; t += 0.5) {
        ode::State<2> u = y;
        ode::integrate<2>([&](double s, const ode::State<2>& v) { return ode::State<2>{v[1], (L2 + W(s)) * v[0]}; },
                          a, u, t, o);
        auto [g, dg] = tr.at(t);
        double wr = g * u[1] - dg * u[0];
        if (t == a) first = wr;
        worst = std::max(worst, std::abs(wr / first - 1));
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("perturbation bound") {
    auto W = langer_potential(tf(), 20.0);
    auto Wc = langer_potential(coulomb_spec(1.0), 20.0);
    CHECK(perturbation_bound(W, W, 1.5, -3.0).bound == 0.0);
    double prev = 0.0;
    for (double x = -8.0; x <= -2.0; x += 1.0) {
        auto b = perturbation_bound(W, Wc, 1.5, x);
        auto g = regular_solution_series(W, 1.5, x), gc = regular_solution_series(Wc, 1.5, x);
        CHECK(std::abs(g.g - gc.g) <= b.bound);
        CHECK(b.bound >= prev);
        prev = b.bound;
    }
}

TEST_CASE("extraction round trip") {
    const double a = std::sqrt(c_infinity());
    for (int l : {0, 1, 2}) {
        for (double th : {0.3, 1.9, 3.0}) {
            auto tr = tail_trajectory(l, th, a / 40, a / 0.5);
            auto pair = make_basis(l, c_infinity());
            auto m = extract_boundary_phase(tr, pair, bessel_window(pair, 1.0, 3.0));
            CHECK(circular_distance_pi(m.theta_mod_pi, th) < 1e-10);
            CHECK(m.valid);
        }
    }
}

TEST_CASE("window shift on the synthetic potential") {
    auto spec = synthetic();
    const double s = std::pow(10.0, 0.25);
    for (int l : {0, 1}) {
        SweepWindow near{1.0 / s, 2.0 / s, true}, far{1.0 / (s * s * s), 2.0 / (s * s * s), true};
        auto m1 = measure_channel_phase(spec, 30.0, l, near);
        auto m2 = measure_channel_phase(spec, 30.0, l, far);
        CAPTURE(l);
        CHECK(circular_distance_pi(m1.theta_mod_pi, m2.theta_mod_pi) < 1e-3);
    }
    CHECK_THROWS_AS(measure_channel_phase(pure_power_spec(-1.0, 1.0), 10.0, 0), DomainError);
}

TEST_CASE("JWKB phase integral") {
    for (double alpha : {-1.0, 0.0, -0.5}) {
        auto spec = pure_power_spec(alpha, 2.0);
        for (int l : {0, 1, 3}) {
            for (double x : {0.8, 2.5}) {
                CHECK(wkb_phase_integral(spec, 20.0, l, x).phase ==
                      doctest::Approx(wkb_phase_pure_power(alpha, 2.0, 20.0, l, x)).epsilon(1e-8));
            }
        }
        double x = 1.7, k = 1 + alpha / 2;
        CHECK(wkb_phase_integral(spec, 20.0, 0, x, false).phase ==
              doctest::Approx(20.0 * std::sqrt(2.0) * std::pow(x, k) / k).epsilon(1e-10));
    }
    auto spec = tf();
    CHECK(wkb_phase_integral(spec, 40.0, 2, 1.0).phase > 2 * wkb_phase_integral(spec, 20.0, 2, 1.0).phase);
    auto forbidden = wkb_phase_integral(spec, 1.0, 5, 1e-3);
    CHECK(forbidden.forbidden);
    CHECK(forbidden.phase == 0.0);
}

TEST_CASE("phase offset") {
    CHECK(phase_offset(-1.0, 0) == doctest::Approx(pi / 2));
    CHECK(phase_offset(0.0, 1) == doctest::Approx(3 * pi / 4));
    for (auto spec : {tf(), synthetic()}) {
        double X = offset_balance_point(spec);
        CHECK(std::abs(offset_first_order_coefficient(spec, X)) < 1e-8);
        for (int l : {0, 1}) {
            double prev = 1e9;
            for (double lam : {20.0, 40.0, 80.0}) {
                double err = std::abs(phase_offset_measurement(spec, lam, l, X) - phase_offset(spec.alpha, l));
                CHECK(err < prev);
                prev = err;
            }
            CHECK(prev < 1e-3);
        }
    }
}

TEST_CASE("JWKB ansatz") {
    auto spec = tf();
    for (int l : {0, 1}) {
        double prev = 1e9;
        for (double lam : {10.0, 20.0, 40.0, 80.0}) {
            auto r = wkb_ansatz_error(spec, lam, l, {0.5, 2.0}, true);
            CHECK_FALSE(r.degenerate);
            CHECK_FALSE(r.outside_window);
            CHECK(r.sup_deviation < prev);
            prev = r.sup_deviation;
            for (double e : r.envelope) CHECK(std::abs(e - 1) < 0.02);
        }
        CHECK(wkb_ansatz_error(spec, 80.0, l, {0.5, 2.0}, false).sup_deviation > prev);
    }
    CHECK(wkb_ansatz_error(spec, 10.0, 3, {1e-4, 1e-3}, true).outside_window);
    CHECK(wkb_ansatz_error(spec, 0.5, 0, {0.5, 0.6}, true).degenerate);
}
