// Spherical Bessel functions and the zero-energy basis of the r^-4 tail.
//
// For beta = -4 the channel equation f'' = [l(l+1)/r^2 - a^2 r^-4] f is solved by
//   F(r) = sqrt(r) J_{-l-1/2}(a/r) = (-1)^{l+1} sqrt(2a/pi) y_l(a/r),
//   G(r) = sqrt(r) Y_{-l-1/2}(a/r) = (-1)^l     sqrt(2a/pi) j_l(a/r),
// using J_{-n-1/2} = (-1)^{n+1} Y_{n+1/2}, Y_{-n-1/2} = (-1)^n J_{n+1/2} and
// j_n(z) = sqrt(pi/(2z)) J_{n+1/2}(z).  With these constants W(F, G) = -2/pi.
#pragma once

#include <string>

namespace tfatom {

double spherical_j(int ell, double z);
double spherical_y(int ell, double z);
// Derivatives with respect to z.
double spherical_j_prime(int ell, double z);
double spherical_y_prime(int ell, double z);

struct BasisPair {
    int ell = 0;
    double a = 0.0;  // sqrt(C_inf)
    std::string convention =
        "F=sqrt(r)J_{-l-1/2}(a/r)=(-1)^(l+1)sqrt(2a/pi)y_l(a/r); G=sqrt(r)Y_{-l-1/2}(a/r)=(-1)^l sqrt(2a/pi)j_l(a/r)";
};

BasisPair make_basis(int ell, double c_infinity);

struct BasisValues {
    double F, G, dF, dG;
};

BasisValues basis_eval(const BasisPair& pair, double r);

// Wronskian F G' - F' G, constant -2/pi.
double basis_wronskian();

// sin(phi) j_l(a/r) - cos(phi) y_l(a/r) with phi = pi (tau + l/2 + 1/4).
double limit_domain_function(double tau, int ell, const BasisPair& pair, double r);

}  // namespace tfatom
