#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace pks::quad {

struct Rule {
    std::vector<double> x; // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre nodes by Newton iteration on P_n.
inline Rule gauss_legendre(int n) {
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

inline const Rule& gl8() {
    static const Rule rule = gauss_legendre(8);
    return rule;
}

template <class F>
double integrate_panel(F&& f, double lo, double hi, const Rule& rule = gl8()) {
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo), s = 0.0;
    for (std::size_t k = 0; k < rule.x.size(); ++k) s += rule.w[k] * f(mid + half * rule.x[k]);
    return s * half;
}

// Breakpoints on [lo, hi] clustered towards both ends.
inline std::vector<double> cosine_graded(double lo, double hi, int panels) {
    std::vector<double> t(panels + 1);
    for (int k = 0; k <= panels; ++k)
        t[k] = lo + (hi - lo) * 0.5 * (1.0 - std::cos(std::numbers::pi * k / panels));
    t.front() = lo;
    t.back() = hi;
    return t;
}

} // namespace pks::quad
