// Globally adaptive Gauss-Kronrod (7/15) quadrature.
#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace tfatom::quad {

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    int intervals = 0;
    int evaluations = 0;
    bool converged = false;
    // Subinterval carrying the largest error estimate at exit.
    double worst_lo = 0.0, worst_hi = 0.0, worst_error = 0.0;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, Result r) : std::runtime_error(what), result_(r) {}
    const Result& result() const { return result_; }

private:
    Result result_;
};

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_intervals = 4000;
    bool throw_on_failure = true;
};

// Integral of f over the finite interval [a, b].
Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opt = {});

// Integral of f over [a, inf) using x = a + (1 - s)/s.
Result integrate_to_infinity(const std::function<double(double)>& f, double a, const Options& opt = {});

// Integral of f over (-inf, b] using x = b - (1 - s)/s.
Result integrate_from_minus_infinity(const std::function<double(double)>& f, double b,
                                     const Options& opt = {});

}  // namespace tfatom::quad
