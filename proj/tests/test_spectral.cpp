#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "tfatom/spectral.hpp"

using namespace tfatom;
using std::numbers::pi;

TEST_CASE("decaying solution") {
    auto s = decaying_solution(0, -1.0);
    CHECK(s.residual < 1e-7);
    CHECK(s.r_extract < 0.1);
    CHECK(std::abs(-1.0) * std::pow(s.r_extract, 4) / c_infinity() < 1e-6);
    CHECK(s.theta >= 0.0);
    CHECK(s.theta < pi);
    CHECK_THROWS_AS(decaying_solution(0, 0.5), DomainError);
}

TEST_CASE("extraction radius independence and continuity") {
    for (int l : {0, 1, 2}) {
        DecayOptions o;
        o.radius_bound /= 16;  // halves r_extract
        double a = theta_of_mu(l, -1.0), b = theta_of_mu(l, -1.0, c_infinity(), o);
        CHECK(circular_distance_pi(a, b) < 1e-4);
        double c = theta_of_mu(l, -1.0001);
        CHECK(circular_distance_pi(a, c) < 1e-2);
    }
}

TEST_CASE("round trip") {
    for (int l : {0, 1, 2}) {
        for (double mu : {-0.5, -1.0, -2.0}) {
            double th = theta_of_mu(l, mu);
            auto e = channel_eigenvalue(l, th, {mu - 0.5 * std::abs(mu), mu + 0.4 * std::abs(mu)});
            CAPTURE(l);
            CAPTURE(mu);
            CHECK(std::abs(e.mu - mu) < 1e-8);
            CHECK(e.residual < 1e-7);
        }
    }
    auto e = channel_eigenvalue(0, theta_of_mu(0, -1.0), {-1.5, -0.5});
    CHECK(e.mu == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("other extension has a different eigenvalue") {
    double th = mod_pi(theta_of_mu(0, -1.0) + pi / 2);
    try {
        auto e = channel_eigenvalue(0, th, {-1.5, -0.5});
        CHECK(std::abs(e.mu + 1) > 1e-3);
    } catch (const NumericalError&) {
        // no eigenvalue of this extension in the bracket
    }
}

TEST_CASE("bracket must be negative") {
    CHECK_THROWS_AS(channel_eigenvalue(0, 1.0, {0.5, 2.0}), DomainError);
    CHECK_THROWS_AS(channel_eigenvalue(0, 1.0, {-0.5, 0.5}), DomainError);
}

// -u'' + [l(l+1)/x^2 - Z/x] u = mu u has mu_n = -Z^2 / (4 n^2) in these units.
TEST_CASE("Coulomb oracle") {
    const double Z = 3.0;
    for (int l : {0, 1, 2}) {
        ScaledChannel ch{coulomb_spec(1.0), std::sqrt(Z), 1.0, l};
        auto mus = channel_eigenvalues(ch, {-3.0, -0.1});
        int n_top = static_cast<int>(std::floor(Z / (2 * std::sqrt(0.1))));
        REQUIRE(mus.size() == static_cast<std::size_t>(n_top - l));
        for (std::size_t k = 0; k < mus.size(); ++k) {
            int n = l + 1 + static_cast<int>(k);
            CHECK(mus[k] == doctest::Approx(-Z * Z / (4.0 * n * n)).epsilon(1e-9));
        }
    }
}

TEST_CASE("finite TF channels") {
    auto chi = fixture::chi();
    for (int l : {0, 1}) {
        for (double Z : {10.0, 40.0}) {
            CHECK(eigenvalue_count_below(tf_channel(chi, 2 * Z, l), -0.5) >=
                  eigenvalue_count_below(tf_channel(chi, Z, l), -0.5));
        }
    }
    auto mus = finite_channel_eigenvalues(chi, 20.0, 0, {-500.0, -0.01});
    REQUIRE(mus.size() >= 2);
    for (std::size_t i = 1; i < mus.size(); ++i) CHECK(mus[i] > mus[i - 1]);
    // eigenvalues are where the Prufer mismatch equals k pi
    auto ch = tf_channel(chi, 20.0, 0);
    for (std::size_t k = 0; k < mus.size(); ++k)
        CHECK(prufer_mismatch(ch, mus[k]) == doctest::Approx(k * pi).epsilon(1e-6));
    CHECK(finite_channel_eigenvalues(chi, 20.0, 0, {-1e6, -1e5}).empty());
}

TEST_CASE("positivity threshold") {
    auto chi = fixture::chi();
    CHECK(centrifugal_supremum(*chi) == doctest::Approx(0.8611689687).epsilon(1e-8));
    CHECK(channel_positivity_threshold(*chi, 1e-9) == 1);
    for (double Z : {125.0, 1000.0, 8000.0}) {
        double ratio = static_cast<double>(channel_positivity_threshold(*chi, 8 * Z)) /
                       channel_positivity_threshold(*chi, Z);
        CHECK(ratio == doctest::Approx(2.0).epsilon(0.15));
    }
    for (double Z : {8.0, 92.0, 1000.0}) {
        int l = channel_positivity_threshold(*chi, Z);
        double min_at = 1e300, min_below = 1e300;
        for (double t = -8; t < 6; t += 1e-3) {
            double x = std::exp(t);
            double phi = phi_Z_at(*chi, Z, x);
            min_at = std::min(min_at, l * (l + 1) / (x * x) - phi);
            min_below = std::min(min_below, (l - 1) * l / (x * x) - phi);
        }
        CHECK(min_at >= 0.0);
        CHECK(min_below < 0.0);
        CHECK(finite_channel_eigenvalues(chi, Z, l, {-100.0, -1e-3}).empty());
    }
}

TEST_CASE("counterexample at small l") {
    auto chi = fixture::chi();
    auto rep = norm_resolvent_counterexample(chi, fixture::d_cl(), 3);
    CHECK(rep.complete);
    REQUIRE(rep.rows.size() == 3);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& r = rep.rows[i];
        CHECK(r.ell == static_cast<int>(i) + 1);
        CHECK(std::abs(r.mu + 1) < 1.0 / r.ell);
        CHECK(r.ell < channel_positivity_threshold(*chi, static_cast<double>(r.Z)));
        if (i > 0) CHECK(r.Z > rep.rows[i - 1].Z);
    }
    CHECK_THROWS_AS(norm_resolvent_counterexample(chi, fixture::d_cl(), 0), DomainError);
}
