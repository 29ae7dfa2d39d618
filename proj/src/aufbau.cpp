#include "tfatom/aufbau.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "tfatom/errors.hpp"

namespace tfatom {

long long madelung_Z(int ell, long long n) {
    if (ell < 0 || n < 1) throw DomainError("madelung_Z: need ell >= 0 and n >= 1");
    const long long m = n + 2LL * ell;
    const long long parity = (n % 2 == 0) ? 2 : 0;  // 1 + (-1)^n
    const long long twelve_z =
        2 * (m - 1) * (m * m + 4 * m + 9) - 3 * parity * (m + 1) + 12 - 24LL * ell * (ell + 2);
    return twelve_z / 12;
}

AufbauSequence tf_sequence(double tau, long long n_max, double d_cl) {
    if (!(tau >= 0.0 && tau < 1.0)) throw DomainError("tf_sequence: tau must lie in [0, 1)");
    if (!(d_cl > 0.0)) throw DomainError("tf_sequence: d_cl must be positive");
    AufbauSequence s;
    s.tau = tau;
    s.kind = SequenceKind::tf;
    s.d_cl = d_cl;
    const long double inv = 1.0L / (static_cast<long double>(d_cl) * d_cl * d_cl);
    for (long long n = 1; n <= n_max; ++n) {
        long double x = n + static_cast<long double>(tau);
        long long z = static_cast<long long>(std::floor(inv * x * x * x));
        if (z <= 0) continue;
        if (!s.values.empty() && z <= s.values.back()) continue;
        s.n.push_back(n);
        s.values.push_back(z);
    }
    return s;
}

const char* to_string(Mod1Status s) {
    switch (s) {
        case Mod1Status::converged: return "converged";
        case Mod1Status::divergent: return "divergent";
        default: return "inconclusive";
    }
}

double frac(double x) { return x - std::floor(x); }

double circular_distance_mod1(double a, double b) {
    double d = frac(a - b);
    return std::min(d, 1.0 - d);
}

Mod1Verdict converges_mod1(const std::vector<long long>& values, double d_cl, double threshold) {
    Mod1Verdict v;
    if (values.size() < 8) {
        v.reason = "fewer than 8 values";
        return v;
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] <= values[i - 1]) {
            v.reason = "values not strictly increasing";
            return v;
        }
    }
    const double two_pi = 2.0 * std::numbers::pi;
    bool all_above = true;
    for (double f : {0.5, 0.25, 0.125}) {
        std::size_t count = static_cast<std::size_t>(std::floor(f * values.size()));
        if (count < 4) continue;
        double c = 0.0, s = 0.0;
        for (std::size_t i = values.size() - count; i < values.size(); ++i) {
            double ph = two_pi * frac(d_cl * std::cbrt(static_cast<double>(values[i])));
            c += std::cos(ph);
            s += std::sin(ph);
        }
        c /= count;
        s /= count;
        TailStat t;
        t.fraction = f;
        t.count = count;
        t.mean = frac(std::atan2(s, c) / two_pi);
        t.dispersion = 1.0 - std::hypot(c, s);
        if (t.dispersion <= threshold) all_above = false;
        v.tails.push_back(t);
    }
    v.tau = v.tails.front().mean;
    v.dispersion = v.tails.front().dispersion;
    if (v.dispersion <= threshold) {
        v.status = Mod1Status::converged;
    } else if (all_above) {
        v.status = Mod1Status::divergent;
        v.reason = "dispersion above threshold on every tail";
    } else {
        v.reason = "only the shortest tails concentrate";
    }
    return v;
}

std::array<double, 4> cubic_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 4) throw DomainError("cubic_fit: need at least 4 matching points");
    Eigen::MatrixXd A(x.size(), 4);
    Eigen::VectorXd b(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = x[i];
        A(i, 2) = x[i] * x[i];
        A(i, 3) = x[i] * x[i] * x[i];
        b(i) = y[i];
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    return {c(0), c(1), c(2), c(3)};
}

CompareReport compare_tables(double d_cl, long long n_max) {
    if (n_max < 4) throw DomainError("compare_tables: need n_max >= 4");
    if (!(d_cl > 0.0)) throw DomainError("compare_tables: d_cl must be positive");
    CompareReport rep;
    rep.tf_expected = 1.0 / (d_cl * d_cl * d_cl);
    const long double inv = 1.0L / (static_cast<long double>(d_cl) * d_cl * d_cl);
    std::vector<double> ns, m0, tf;
    for (long long n = 1; n <= n_max; ++n) {
        CompareRow r;
        r.n = n;
        for (int l = 0; l < 4; ++l) r.madelung[l] = madelung_Z(l, n);
        long double x = static_cast<long double>(n);
        r.tf = static_cast<long long>(std::floor(inv * x * x * x));
        rep.rows.push_back(r);
        ns.push_back(static_cast<double>(n));
        m0.push_back(static_cast<double>(r.madelung[0]));
        tf.push_back(static_cast<double>(r.tf));
    }
    rep.madelung_cubic = cubic_fit(ns, m0)[3];
    rep.tf_cubic = cubic_fit(ns, tf)[3];
    return rep;
}

}  // namespace tfatom
