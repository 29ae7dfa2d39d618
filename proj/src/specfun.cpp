#include "tfatom/specfun.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "tfatom/errors.hpp"

namespace tfatom {

using std::numbers::pi;

namespace {

void check_args(int ell, double z, const char* who) {
    if (ell < 0) throw DomainError(std::string(who) + ": ell must be non-negative");
    if (!(z > 0.0)) throw DomainError(std::string(who) + ": argument must be positive");
}

// Power series z^l/(2l+1)!! sum_k (-z^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1)).
double j_series(int ell, double z) {
    double lead = 1.0;
    for (int k = 1; k <= ell; ++k) lead *= z / (2.0 * k + 1.0);
    double term = 1.0, sum = 1.0, q = -0.5 * z * z;
    for (int k = 1; k < 200; ++k) {
        term *= q / (k * (2.0 * ell + 2.0 * k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return lead * sum;
}

double j_closed(int ell, double z) {
    if (z < 1.0) return j_series(ell, z);
    const double s = std::sin(z), c = std::cos(z);
    switch (ell) {
        case 0: return s / z;
        case 1: return s / (z * z) - c / z;
        default: return (3.0 / (z * z) - 1.0) * s / z - 3.0 * c / (z * z);
    }
}

double y_closed(int ell, double z) {
    const double s = std::sin(z), c = std::cos(z);
    switch (ell) {
        case 0: return -c / z;
        case 1: return -c / (z * z) - s / z;
        default: return (-3.0 / (z * z) + 1.0) * c / z - 3.0 * s / (z * z);
    }
}

// Miller's downward recurrence normalized against j_0 or j_1.
double j_miller(int ell, double z) {
    int start = ell + 20 + static_cast<int>(std::sqrt(40.0 * (ell + 1)));
    double jp1 = 0.0, jn = 1e-280, result = 0.0, j1 = 0.0;
    for (int n = start; n > 0; --n) {
        double jm1 = (2.0 * n + 1.0) / z * jn - jp1;
        jp1 = jn;
        jn = jm1;
        if (n - 1 == ell) result = jn;
        if (n - 1 == 1) j1 = jn;
        if (std::abs(jn) > 1e250) {
            jn *= 1e-250;
            jp1 *= 1e-250;
            result *= 1e-250;
            j1 *= 1e-250;
        }
    }
    // jn now holds the unnormalized j_0
    double true0 = j_closed(0, z), true1 = j_closed(1, z);
    if (std::abs(true0) >= std::abs(true1)) return result * (true0 / jn);
    return result * (true1 / j1);
}

}  // namespace

double spherical_j(int ell, double z) {
    check_args(ell, z, "spherical_j");
    if (ell <= 2) return j_closed(ell, z);
    if (z < ell) return j_miller(ell, z);
    double a = j_closed(0, z), b = j_closed(1, z);
    for (int n = 1; n < ell; ++n) {
        double c = (2.0 * n + 1.0) / z * b - a;
        a = b;
        b = c;
    }
    return b;
}

double spherical_y(int ell, double z) {
    check_args(ell, z, "spherical_y");
    if (ell <= 2) return y_closed(ell, z);
    double a = y_closed(0, z), b = y_closed(1, z);
    for (int n = 1; n < ell; ++n) {
        double c = (2.0 * n + 1.0) / z * b - a;
        a = b;
        b = c;
    }
    return b;
}

double spherical_j_prime(int ell, double z) {
    check_args(ell, z, "spherical_j_prime");
    if (ell == 0) return -spherical_j(1, z);
    return spherical_j(ell - 1, z) - (ell + 1.0) / z * spherical_j(ell, z);
}

double spherical_y_prime(int ell, double z) {
    check_args(ell, z, "spherical_y_prime");
    if (ell == 0) return -spherical_y(1, z);
    return spherical_y(ell - 1, z) - (ell + 1.0) / z * spherical_y(ell, z);
}

BasisPair make_basis(int ell, double c_infinity) {
    if (ell < 0) throw DomainError("make_basis: ell must be non-negative");
    if (!(c_infinity > 0.0)) throw DomainError("make_basis: C_inf must be positive");
    BasisPair p;
    p.ell = ell;
    p.a = std::sqrt(c_infinity);
    return p;
}

BasisValues basis_eval(const BasisPair& pair, double r) {
    if (!(r > 0.0)) throw DomainError("basis_eval: radius must be positive");
    const int l = pair.ell;
    const double z = pair.a / r, dz = -pair.a / (r * r);
    const double c = std::sqrt(2.0 * pair.a / pi);
    const double sf = (l % 2 == 0) ? -1.0 : 1.0;  // (-1)^{l+1}
    const double sg = -sf;                        // (-1)^l
    return {sf * c * spherical_y(l, z), sg * c * spherical_j(l, z), sf * c * spherical_y_prime(l, z) * dz,
            sg * c * spherical_j_prime(l, z) * dz};
}

double basis_wronskian() { return -2.0 / pi; }

double limit_domain_function(double tau, int ell, const BasisPair& pair, double r) {
    if (!(r > 0.0)) throw DomainError("limit_domain_function: radius must be positive");
    const double phi = pi * (tau + 0.5 * ell + 0.25);
    const double z = pair.a / r;
    return std::sin(phi) * spherical_j(ell, z) - std::cos(phi) * spherical_y(ell, z);
}

}  // namespace tfatom
