#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "support.hpp"
#include "tfatom/aufbau.hpp"
#include "tfatom/errors.hpp"

using namespace tfatom;

TEST_CASE("Madelung integers") {
    const std::vector<std::vector<long long>> listed{{1, 3, 11, 19, 37, 55, 87}, {5, 13, 31, 49, 81, 113}, {21, 39, 71}};
    for (int l = 0; l < 3; ++l)
        for (std::size_t n = 0; n < listed[l].size(); ++n) CHECK(madelung_Z(l, n + 1) == listed[l][n]);
    // leading term (n + 2l)^3 / 6
    CHECK(static_cast<double>(madelung_Z(0, 2000)) / std::pow(2000.0, 3) == doctest::Approx(1.0 / 6).epsilon(1e-3));
    CHECK_THROWS_AS(madelung_Z(0, 0), DomainError);
    CHECK_THROWS_AS(madelung_Z(-1, 3), DomainError);
}

TEST_CASE("TF sequence") {
    const double d = fixture::d_cl();
    auto s = tf_sequence(0.0, 400, d);
    for (std::size_t i = 1; i < s.values.size(); ++i) REQUIRE(s.values[i] > s.values[i - 1]);
    // cubic growth
    auto at = [&](long long n) { return static_cast<double>(std::floor(std::pow(n / d, 3))); };
    CHECK(at(400) / at(200) == doctest::Approx(8.0).epsilon(1e-2));
    CHECK_THROWS_AS(tf_sequence(1.0, 10, d), DomainError);
    CHECK_THROWS_AS(tf_sequence(0.2, 10, -1.0), DomainError);
}

// frac(d Z_n^{1/3}) - tau = O(n^-2): floor removes less than 1 from d^-3 (n+tau)^3.
TEST_CASE("TF sequence converges at rate n^-2") {
    const double d = fixture::d_cl(), tau = 0.3;
    std::vector<double> lx, ly;
    auto s = tf_sequence(tau, 4000, d);
    for (std::size_t i = 0; i < s.n.size(); ++i) {
        long long n = s.n[i];
        if (n < 1000) continue;
        double dist = circular_distance_mod1(d * std::cbrt(static_cast<double>(s.values[i])), tau);
        if (dist <= 0) continue;
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(dist));
    }
    // the floor residue is erratic, so fit the upper envelope: max distance per octave
    std::vector<double> ex, ey;
    for (double lo = std::log(1000.0); lo < std::log(4000.0) - 1e-9; lo += std::log(2.0) / 4) {
        double best = -1e9, bx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i)
            if (lx[i] >= lo && lx[i] < lo + std::log(2.0) / 4 && ly[i] > best) best = ly[i], bx = lx[i];
        ex.push_back(bx);
        ey.push_back(best);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < ex.size(); ++i) mx += ex[i], my += ey[i];
    mx /= ex.size();
    my /= ex.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < ex.size(); ++i) sxy += (ex[i] - mx) * (ey[i] - my), sxx += (ex[i] - mx) * (ex[i] - mx);
    CHECK(sxy / sxx == doctest::Approx(-2.0).epsilon(0.25));
}

TEST_CASE("mod-one convergence") {
    const double d = fixture::d_cl();
    auto v = converges_mod1(tf_sequence(0.3, 300, d).values, d);
    CHECK(v.status == Mod1Status::converged);
    CHECK(circular_distance_mod1(v.tau, 0.3) < 1e-3);
    CHECK(v.dispersion < 1e-4);

    // shifting Z_n by C n^2 moves the limit to tau + C d^3 / 3
    const double C = 0.05;
    std::vector<long long> shifted;
    auto base = tf_sequence(0.3, 600, d);
    for (std::size_t i = 0; i < base.n.size(); ++i)
        shifted.push_back(base.values[i] + static_cast<long long>(std::llround(C * base.n[i] * base.n[i])));
    auto w = converges_mod1(shifted, d);
    CHECK(w.status == Mod1Status::converged);
    CHECK(circular_distance_mod1(w.tau, 0.3 + C * d * d * d / 3) < 5e-3);

    // two accumulation points
    auto a = tf_sequence(0.1, 200, d), b = tf_sequence(0.6, 200, d);
    std::vector<long long> mixed;
    for (std::size_t i = 0; i < std::min(a.values.size(), b.values.size()); ++i) {
        mixed.push_back(a.values[i]);
        mixed.push_back(b.values[i]);
    }
    std::sort(mixed.begin(), mixed.end());
    mixed.erase(std::unique(mixed.begin(), mixed.end()), mixed.end());
    CHECK(converges_mod1(mixed, d).status == Mod1Status::divergent);

    std::vector<long long> flat(20, 7);
    CHECK(converges_mod1(flat, d).status == Mod1Status::inconclusive);
    CHECK(converges_mod1({1, 2, 3}, d).status == Mod1Status::inconclusive);
    CHECK(std::string(to_string(Mod1Status::divergent)) == "divergent");
}

TEST_CASE("comparison table") {
    const double d = fixture::d_cl();
    auto rep = compare_tables(d, 20);
    REQUIRE(rep.rows.size() == 20);
    for (const auto& r : rep.rows)
        for (int l = 0; l < 4; ++l) CHECK(r.madelung[l] == madelung_Z(l, r.n));
    CHECK(rep.madelung_cubic == doctest::Approx(1.0 / 6).epsilon(0.02));
    CHECK(rep.tf_cubic == doctest::Approx(1 / (d * d * d)).epsilon(0.02));
    CHECK_THROWS_AS(compare_tables(d, 3), DomainError);
}

TEST_CASE("cubic fit recovers a cubic") {
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
        x.push_back(i);
        y.push_back(1 - 2 * i + 0.5 * i * i + 0.25 * i * i * i);
    }
    auto c = cubic_fit(x, y);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[1] == doctest::Approx(-2.0));
    CHECK(c[2] == doctest::Approx(0.5));
    CHECK(c[3] == doctest::Approx(0.25));
}
