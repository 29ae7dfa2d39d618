// Atomic-number sequences: Madelung filling, the TF periodicity sequences
// Z_n = floor(D^-3 (n + tau)^3), and convergence of D Z^{1/3} modulo one.
#pragma once

#include <array>
#include <string>
#include <vector>

namespace tfatom {

// Charge at which the n-th shell of angular momentum l starts filling.
long long madelung_Z(int ell, long long n);

enum class SequenceKind { madelung, tf, custom };

struct AufbauSequence {
    double tau = 0.0;
    std::vector<long long> n;       // sequence indices kept
    std::vector<long long> values;  // strictly increasing
    SequenceKind kind = SequenceKind::custom;
    double d_cl = 0.0;
};

// Z_n = floor(d^-3 (n + tau)^3) for n = 1..n_max; non-positive and repeated leading values are dropped.
AufbauSequence tf_sequence(double tau, long long n_max, double d_cl);

enum class Mod1Status { converged, divergent, inconclusive };
const char* to_string(Mod1Status s);

struct TailStat {
    double fraction = 0.0;   // last fraction of the points
    std::size_t count = 0;
    double mean = 0.0;       // circular mean in [0, 1)
    double dispersion = 0.0; // 1 - mean resultant length
};

struct Mod1Verdict {
    Mod1Status status = Mod1Status::inconclusive;
    double tau = 0.0;
    double dispersion = 0.0;  // on the last half
    std::vector<TailStat> tails;
    std::string reason;
};

// Circular statistics of frac(d Z^{1/3}) over the last 1/2, 1/4, 1/8 of the values.
Mod1Verdict converges_mod1(const std::vector<long long>& values, double d_cl, double threshold = 0.05);

double frac(double x);
double circular_distance_mod1(double a, double b);

struct CompareRow {
    long long n = 0;
    std::array<long long, 4> madelung{};  // l = 0..3
    long long tf = 0;                     // tau = 0 sequence
};

struct CompareReport {
    std::vector<CompareRow> rows;
    double madelung_cubic = 0.0;  // leading coefficient of a cubic fit of Z_0(n)
    double tf_cubic = 0.0;
    double madelung_expected = 1.0 / 6.0;
    double tf_expected = 0.0;     // d^-3
};

CompareReport compare_tables(double d_cl, long long n_max);

// Least-squares coefficients c0..c3 of c0 + c1 x + c2 x^2 + c3 x^3.
std::array<double, 4> cubic_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tfatom
