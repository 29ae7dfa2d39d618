#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tfatom/errors.hpp"
#include "tfatom/specfun.hpp"
#include "tfatom/tf_core.hpp"

using namespace tfatom;
using std::numbers::pi;

TEST_CASE("closed forms") {
    CHECK(std::abs(spherical_j(0, pi)) < 1e-16);
    CHECK(spherical_y(0, pi) == doctest::Approx(1 / pi).epsilon(1e-15));
    CHECK(spherical_j(1, pi) == doctest::Approx(1 / pi).epsilon(1e-15));
    CHECK_THROWS_AS(spherical_j(0, 0.0), DomainError);
    CHECK_THROWS_AS(spherical_y(2, -1.0), DomainError);
}

// std::sph_bessel / std::sph_neumann are an independent implementation.
TEST_CASE("agreement with the standard library") {
    for (int l = 0; l <= 12; ++l) {
        for (double z : {0.05, 0.7, 2.0, 5.5, 11.0, 30.0, 140.0}) {
            CAPTURE(l);
            CAPTURE(z);
            double j = std::sph_bessel(l, z), y = std::sph_neumann(l, z);
            const double tol = l <= 2 ? 1e-12 : 1e-10;
            // relative to the local amplitude, since either function may sit near a zero
            const double amp = std::hypot(j, y);
            CHECK(std::abs(spherical_j(l, z) - j) <= tol * amp);
            CHECK(std::abs(spherical_y(l, z) - y) <= tol * amp);
        }
    }
}

TEST_CASE("derivatives") {
    for (int l = 0; l <= 6; ++l) {
        for (double z : {0.3, 1.9, 8.0, 25.0}) {
            double h = 1e-5 * z;
            double dj = (spherical_j(l, z + h) - spherical_j(l, z - h)) / (2 * h);
            double dy = (spherical_y(l, z + h) - spherical_y(l, z - h)) / (2 * h);
            CHECK(spherical_j_prime(l, z) == doctest::Approx(dj).epsilon(1e-7));
            CHECK(spherical_y_prime(l, z) == doctest::Approx(dy).epsilon(1e-7));
        }
    }
}

TEST_CASE("Wronskian is constant") {
    for (int l : {0, 1, 2, 5}) {
        auto p = make_basis(l, c_infinity());
        for (double r : {0.1, 1.0, 10.0}) {
            auto v = basis_eval(p, r);
            CHECK(v.F * v.dG - v.dF * v.G == doctest::Approx(-2 / pi).epsilon(1e-12));
        }
    }
    CHECK(basis_wronskian() == doctest::Approx(-2 / pi));
}

TEST_CASE("basis solves the tail equation") {
    const double C = c_infinity();
    for (int l : {0, 1, 2}) {
        auto p = make_basis(l, C);
        for (double r : {0.1, 1.0, 10.0}) {
            // Richardson-extrapolated central difference of the analytic first derivative
            auto d2 = [&](double h, bool use_F) {
                auto a = basis_eval(p, r + h), b = basis_eval(p, r - h);
                return use_F ? (a.dF - b.dF) / (2 * h) : (a.dG - b.dG) / (2 * h);
            };
            for (bool use_F : {true, false}) {
                double h = 1e-5 * r;
                double f2 = (4 * d2(h / 2, use_F) - d2(h, use_F)) / 3;
                auto v = basis_eval(p, r);
                double f = use_F ? v.F : v.G;
                double rhs = (l * (l + 1) / (r * r) - C / std::pow(r, 4)) * f;
                double scale = C / std::pow(r, 4) * std::hypot(v.F, v.G);  // f may sit on a node
                CHECK(std::abs(f2 - rhs) < 1e-9 * scale);
            }
        }
    }
}

TEST_CASE("l = 0 elementary solutions") {
    const double C = c_infinity(), a = std::sqrt(C);
    auto p = make_basis(0, C);
    const double k = std::sqrt(2 / (pi * a));
    for (double r : {0.3, 2.0, 17.0}) {
        auto v = basis_eval(p, r);
        CHECK(v.F == doctest::Approx(k * r * std::cos(a / r)).epsilon(1e-13));
        CHECK(v.G == doctest::Approx(k * r * std::sin(a / r)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(basis_eval(p, 0.0), DomainError);
}

TEST_CASE("limit domain function") {
    const double C = c_infinity(), a = std::sqrt(C);
    auto p = make_basis(0, C);
    CHECK(limit_domain_function(0.0, 0, p, a / pi) == doctest::Approx(-std::sqrt(2.0) / (2 * pi)).epsilon(1e-14));
    for (int l : {0, 1, 3}) {
        auto q = make_basis(l, C);
        for (double r : {0.5, 4.0}) {
            CHECK(limit_domain_function(1.3, l, q, r) == doctest::Approx(-limit_domain_function(0.3, l, q, r)));
            // j_l(a/r) and y_l(a/r) are multiples of G and F, so the combination solves the tail equation
            auto u = [&](double x) { return limit_domain_function(0.3, l, q, x); };
            double h = 2e-4 * r;
            double u2 = (-u(r + 2 * h) + 16 * u(r + h) - 30 * u(r) + 16 * u(r - h) - u(r - 2 * h)) / (12 * h * h);
            double rhs = (l * (l + 1) / (r * r) - C / std::pow(r, 4)) * u(r);
            CHECK(std::abs(u2 - rhs) < 1e-6 * C / std::pow(r, 4) * std::hypot(spherical_j(l, a / r), spherical_y(l, a / r)));
        }
    }
}
