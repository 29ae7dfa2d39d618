#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "support.hpp"
#include "tfatom/tf_core.hpp"

using namespace tfatom;
using std::numbers::pi;

TEST_CASE("constants") {
    CHECK(c_infinity() == doctest::Approx(81 * pi * pi).epsilon(1e-15));
    CHECK(b_length() == doctest::Approx(std::pow(3 * pi / 4, 2.0 / 3.0)).epsilon(1e-15));
    // The Sommerfeld tail 144/x^3 in r-space: chi(r/b)/r -> 144 b^3 / r^4.
    CHECK(std::abs(144 * std::pow(b_length(), 3) - c_infinity()) < 1e-9);
    CHECK(tail_exponent() == doctest::Approx((std::sqrt(73.0) - 7) / 2));
}

TEST_CASE("Sommerfeld solution is exact") {
    for (double x : {0.5, 3.0, 40.0}) {
        double chi = 144 / (x * x * x);
        double lhs = 144.0 * 12.0 / std::pow(x, 5);
        double rhs = std::pow(chi, 1.5) / std::sqrt(x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
    }
}

TEST_CASE("universal profile") {
    const auto& chi = *fixture::chi();
    CHECK(chi.chi(1e-6) == doctest::Approx(1.0 + chi.slope_origin() * 1e-6).epsilon(1e-9));
    CHECK(chi.slope_origin() == doctest::Approx(-1.588071).epsilon(1e-6));
    CHECK(chi.slope_origin() == doctest::Approx(-1.588071022611400).epsilon(1e-12));
    CHECK(std::abs(chi.report().slope_shooting - chi.report().slope_matching) < 1e-6);
    CHECK(tf_residual(chi) < 1e-8);
    // chi is positive, decreasing, below the Sommerfeld bound
    for (std::size_t i = 1; i < chi.grid().size(); ++i) {
        REQUIRE(chi.values()[i] > 0.0);
        REQUIRE(chi.values()[i] < chi.values()[i - 1]);
        double x = chi.grid()[i];
        REQUIRE(x * x * x * chi.values()[i] < 144.0);
    }
}

TEST_CASE("solve is fast") {
    auto t0 = std::chrono::steady_clock::now();
    auto c = solve_universal_chi();
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(s < 5.0);
    CHECK(c.slope_origin() == fixture::chi()->slope_origin());
}

TEST_CASE("bad inputs") {
    CHECK_THROWS_AS(solve_universal_chi(-1.0), DomainError);
    GridSpec g;
    g.x_max = 10;
    CHECK_THROWS_AS(solve_universal_chi(1e-8, g), DomainError);
    CHECK_THROWS_AS(phi1_at(*fixture::chi(), 0.0), DomainError);
    CHECK_THROWS_AS(phi_Z_at(*fixture::chi(), -1.0, 1.0), DomainError);
}

TEST_CASE("residual is sensitive to perturbation") {
    const auto& chi = *fixture::chi();
    CHECK(tf_residual(chi.perturbed(1e-3)) >= 10 * tf_residual(chi));
}

TEST_CASE("potential limits") {
    const auto& chi = *fixture::chi();
    CHECK(1e-8 * phi1_at(chi, 1e-8) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(phi1_at(chi, b_length()) == doctest::Approx(chi.chi(1.0) / b_length()).epsilon(1e-14));
    double prev = 0.0;
    for (double r : {10.0, 100.0, 1e3, 1e4, 1e6}) {
        double v = std::pow(r, 4) * phi1_at(chi, r);
        CHECK(v > prev);
        CHECK(v < c_infinity());
        prev = v;
    }
    CHECK(prev == doctest::Approx(c_infinity()).epsilon(1e-3));
}

TEST_CASE("continuity across switch points") {
    const auto& chi = *fixture::chi();
    const double b = b_length();
    for (double x : {chi.series_radius(), chi.tail_switch()}) {
        double lo = phi1_at(chi, b * x * (1 - 1e-12)), hi = phi1_at(chi, b * x * (1 + 1e-12));
        CHECK(std::abs(lo / hi - 1) < 1e-9);
    }
}

TEST_CASE("charge scaling") {
    const auto& chi = *fixture::chi();
    for (double x : {1e-3, 0.2, 5.0, 300.0}) CHECK(phi_Z_at(chi, 1.0, x) == phi1_at(chi, x));
    for (double Z : {2.0, 8.0, 92.0}) {
        const double s = std::cbrt(Z);
        for (double x : {1e-4, 0.3, 7.0}) CHECK(phi_Z_at(chi, Z, x) == doctest::Approx(Z * s * phi1_at(chi, s * x)).epsilon(1e-15));
        CHECK(1e-10 * phi_Z_at(chi, Z, 1e-10) == doctest::Approx(Z).epsilon(1e-4));
        double x = 1e6 / s;
        CHECK(std::pow(x, 4) * phi_Z_at(chi, Z, x) == doctest::Approx(c_infinity()).epsilon(1e-3));
    }
}

TEST_CASE("classical constant") {
    const auto& chi = *fixture::chi();
    auto cc = classical_constant(chi);
    CHECK(std::abs(cc.d_cl - cc.d_cl_chi_space) < 1e-6);
    CHECK(cc.d_cl == doctest::Approx(1.6586532012).epsilon(1e-9));
    CHECK(cc.d_cl_3d == doctest::Approx(cc.d_cl).epsilon(1e-14));
    CHECK(std::abs(classical_integral_Z(chi, 8.0) - 2 * cc.d_cl) < 1e-9);
    CHECK(std::abs(1.0 / std::pow(cc.d_cl, 3) - 6.0) > 1.0);

    GridSpec fine;
    fine.points = 2 * fine.points - 1;
    auto chi2 = solve_universal_chi(1e-8, fine);
    CHECK(std::abs(classical_constant(chi2).d_cl - cc.d_cl) < 1e-7);
}

TEST_CASE("tail report") {
    const auto& chi = *fixture::chi();
    auto rows = sommerfeld_tail_report(chi, {1e2, 1e3, 1e4});
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        // the deviation is the first correction to within its own square
        CHECK(std::abs(r.deviation - r.correction_order) < 2 * r.correction_order * r.correction_order + 1e-9);
    }
    CHECK(rows[2].deviation < rows[0].deviation);
}

TEST_CASE("profile export round trip") {
    const auto& chi = *fixture::chi();
    auto dir = std::filesystem::temp_directory_path() / "tfatom_profile_test";
    std::filesystem::create_directories(dir);
    auto csv = (dir / "chi.csv").string(), json = (dir / "chi.json").string();
    export_profile(chi, csv, json);
    auto back = import_profile(csv, json);
    CHECK(back.slope_origin() == chi.slope_origin());
    for (double x : {1e-5, 0.37, 2.0, 55.0, 3e3}) CHECK(back.chi(x) == doctest::Approx(chi.chi(x)).epsilon(1e-13));
    std::filesystem::remove_all(dir);
}
