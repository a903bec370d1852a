#pragma once

// Independent reference computations for the unit and acceptance tests. None
// of these reuse the library code paths they are compared against.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

// Power law f(u) = u^m/(m-1) plus the optional alpha/(beta(beta-1)) u^beta term,
// written out again here.
struct Law {
    double m = 3.0, alpha = 0.0, beta = 2.0, sigma = 1.0;
    double f(double u) const {
        double v = std::pow(u, m) / (m - 1.0);
        if (alpha > 0.0) v += alpha / (beta * (beta - 1.0)) * std::pow(u, beta);
        return v;
    }
    double fp(double u) const {
        double v = m / (m - 1.0) * std::pow(u, m - 1.0);
        if (alpha > 0.0) v += alpha / (beta - 1.0) * std::pow(u, beta - 1.0);
        return v;
    }
};

// Minimum of g on [lo, hi] by repeated uniform scans, each zooming onto the
// best sample. Does not assume convexity of g.
inline std::pair<double, double> scan_min(const std::function<double(double)>& g, double lo, double hi,
                                          int samples = 2001, int rounds = 8) {
    double best_u = lo, best = g(lo);
    for (int r = 0; r < rounds; ++r) {
        double h = (hi - lo) / (samples - 1);
        for (int k = 0; k < samples; ++k) {
            double u = lo + h * k;
            double val = g(u);
            if (val < best) {
                best = val;
                best_u = u;
            }
        }
        double nlo = std::max(lo, best_u - 2.0 * h), nhi = std::min(hi, best_u + 2.0 * h);
        lo = nlo;
        hi = nhi;
    }
    return {best_u, best};
}

// Plain brute force: the best of n equally spaced samples.
inline std::pair<double, double> dense_scan_min(const std::function<double(double)>& g, double lo, double hi,
                                                long n) {
    double best_u = lo, best = g(lo);
    for (long k = 1; k < n; ++k) {
        double u = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
        double v = g(u);
        if (v < best) {
            best = v;
            best_u = u;
        }
    }
    return {best_u, best};
}

// Adaptive Simpson with Richardson correction.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                          double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                               int depth = 50) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Sum in long double with Kahan compensation.
inline long double compensated_sum(const std::vector<double>& v) {
    long double s = 0.0L, c = 0.0L;
    for (double x : v) {
        long double y = static_cast<long double>(x) - c;
        long double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

// Euclidean projection onto {x >= 0, sum x = total} by sorting.
inline std::vector<double> project_simplex(const std::vector<double>& y, double total) {
    std::vector<double> s(y);
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0, tau = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        cum += s[k];
        double t = (cum - total) / static_cast<double>(k + 1);
        if (k + 1 == s.size() || s[k + 1] <= t) {
            tau = t;
            break;
        }
    }
    std::vector<double> x(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) x[k] = std::max(0.0, y[k] - tau);
    return x;
}

// Minimizes h * sum (f(rho) - rho phi) over {rho >= 0, h * sum rho = mass} by
// projected gradient with Barzilai-Borwein steps and a monotone backtracking
// safeguard.
inline std::vector<double> projected_gradient_density(const Law& law, const std::vector<double>& phi, double h,
                                                      double mass = 1.0, int max_iter = 100000,
                                                      double tol = 1e-14) {
    const std::size_t n = phi.size();
    const double total = mass / h;
    auto energy = [&](const std::vector<double>& r) {
        double e = 0.0;
        for (std::size_t k = 0; k < n; ++k) e += law.f(r[k]) - r[k] * phi[k];
        return e;
    };
    auto grad = [&](const std::vector<double>& r) {
        std::vector<double> g(n);
        for (std::size_t k = 0; k < n; ++k) g[k] = law.fp(r[k]) - phi[k];
        return g;
    };
    std::vector<double> x(n, total / static_cast<double>(n));
    std::vector<double> g = grad(x);
    double step = 0.1;
    double e = energy(x);
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> y(n);
        for (std::size_t k = 0; k < n; ++k) y[k] = x[k] - g[k];
        auto pg = project_simplex(y, total);
        double stat = 0.0;
        for (std::size_t k = 0; k < n; ++k) stat = std::max(stat, std::abs(pg[k] - x[k]));
        if (stat < tol) break;
        std::vector<double> xn;
        double en = 0.0;
        double t = step;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t k = 0; k < n; ++k) y[k] = x[k] - t * g[k];
            xn = project_simplex(y, total);
            en = energy(xn);
            double lin = 0.0, sq = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                lin += g[k] * (xn[k] - x[k]);
                sq += (xn[k] - x[k]) * (xn[k] - x[k]);
            }
            if (en <= e + lin + 0.5 / t * sq + 1e-16 * std::abs(e)) break;
            t *= 0.5;
        }
        auto gn = grad(xn);
        double ss = 0.0, sy = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double s = xn[k] - x[k], yy = gn[k] - g[k];
            ss += s * s;
            sy += s * yy;
        }
        step = sy > 0.0 ? std::clamp(ss / sy, 1e-10, 1e10) : 2.0 * t;
        x = std::move(xn);
        g = std::move(gn);
        e = en;
    }
    return x;
}

// Classical RK4 for a small autonomous system.
template <std::size_t N>
std::array<double, N> rk4(const std::function<std::array<double, N>(const std::array<double, N>&)>& rhs,
                          std::array<double, N> y, double dt) {
    auto add = [](std::array<double, N> a, const std::array<double, N>& b, double s) {
        for (std::size_t k = 0; k < N; ++k) a[k] += s * b[k];
        return a;
    };
    auto k1 = rhs(y);
    auto k2 = rhs(add(y, k1, 0.5 * dt));
    auto k3 = rhs(add(y, k2, 0.5 * dt));
    auto k4 = rhs(add(y, k3, dt));
    for (std::size_t k = 0; k < N; ++k) y[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    return y;
}

// Smooth random field on [0, lx] x [0, ly] from a few cosine modes.
struct SmoothRandom {
    std::vector<std::array<double, 4>> modes; // kx, ky, amplitude, phase
    double offset = 0.0;
    SmoothRandom(std::mt19937_64& rng, int count, double amp, double offset_) : offset(offset_) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < count; ++k)
            modes.push_back({std::floor(1 + 3 * u(rng)), std::floor(4 * u(rng)), amp * (u(rng) - 0.5),
                             2 * 3.141592653589793 * u(rng)});
    }
    double operator()(double x, double y, double lx, double ly) const {
        double v = offset;
        for (const auto& md : modes)
            v += md[2] * std::cos(3.141592653589793 * (md[0] * x / lx + md[1] * y / ly) + md[3]);
        return v;
    }
};

} // namespace oracle
