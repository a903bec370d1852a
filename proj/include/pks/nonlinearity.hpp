#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"

namespace pks {

enum class LawKind { PowerLaw, RegularizedPowerLaw };

// f(u) = u^m/(m-1), optionally plus alpha/(beta(beta-1)) u^beta.
struct PressureLaw {
    LawKind kind = LawKind::PowerLaw;
    double m = 3.0;
    double alpha = 0.0;
    double beta = 2.0;
    double sigma = 1.0;

    static PressureLaw power(double m, double sigma = 1.0) {
        PressureLaw law;
        law.m = m;
        law.sigma = sigma;
        law.validate();
        return law;
    }
    static PressureLaw regularized(double m, double alpha, double beta, double sigma = 1.0) {
        PressureLaw law;
        law.kind = LawKind::RegularizedPowerLaw;
        law.m = m;
        law.alpha = alpha;
        law.beta = beta;
        law.sigma = sigma;
        law.validate();
        return law;
    }

    void validate() const {
        if (!(m > 2.0) || !std::isfinite(m)) throw ConfigError("pressure law exponent m must be > 2");
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be > 0");
        if (kind == LawKind::RegularizedPowerLaw) {
            if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be >= 0");
            if (!(beta > 1.0 && beta <= 2.0)) throw ConfigError("beta must lie in (1, 2]");
        }
    }

    bool regularized_term() const { return kind == LawKind::RegularizedPowerLaw && alpha > 0.0; }

    bool operator==(const PressureLaw&) const = default;
};

// c_m = ((m-1)/m)^{1/(m-1)}, the density-formula constant of the power law.
inline double power_law_cm(double m) { return std::pow((m - 1.0) / m, 1.0 / (m - 1.0)); }

inline double eval_f(const PressureLaw& law, double u) {
    if (u < 0.0 || std::isnan(u)) throw DomainError("f evaluated at negative density");
    double v = std::pow(u, law.m) / (law.m - 1.0);
    if (law.regularized_term()) v += law.alpha / (law.beta * (law.beta - 1.0)) * std::pow(u, law.beta);
    return v;
}

inline double eval_f_prime(const PressureLaw& law, double u) {
    if (u < 0.0 || std::isnan(u)) throw DomainError("f' evaluated at negative density");
    double v = law.m / (law.m - 1.0) * std::pow(u, law.m - 1.0);
    if (law.regularized_term()) v += law.alpha / (law.beta - 1.0) * std::pow(u, law.beta - 1.0);
    return v;
}

namespace detail {

// Solves f'(u) = v for v > 0 on the regularized law. Both terms of f' are
// increasing powers, so the root is bracketed by inverting each term alone.
inline double regularized_inverse(const PressureLaw& law, double v) {
    const double m = law.m, b = law.beta, al = law.alpha;
    auto inv1 = [&](double y) { return std::pow((m - 1.0) * y / m, 1.0 / (m - 1.0)); };
    auto inv2 = [&](double y) { return std::pow((b - 1.0) * y / al, 1.0 / (b - 1.0)); };
    double lo = std::min(inv1(0.5 * v), inv2(0.5 * v));
    double hi = std::min(inv1(v), inv2(v));
    auto g = [&](double u) { return eval_f_prime(law, u) - v; };
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double gu = g(u);
        if (gu == 0.0) return u;
        if (gu > 0.0) hi = u; else lo = u;
        double fpp = m * std::pow(u, m - 2.0) + al * std::pow(u, b - 2.0);
        double next = u - gu / fpp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - u) <= 1e-16 * u) return next;
        u = next;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    return u;
}

} // namespace detail

// (f')^{-1}(v_+).
inline double invert_f_prime(const PressureLaw& law, double v) {
    if (!(v > 0.0)) return 0.0;
    if (!law.regularized_term()) return power_law_cm(law.m) * std::pow(v, 1.0 / (law.m - 1.0));
    return detail::regularized_inverse(law, v);
}

// f*(v) = sup_{u>=0} (uv - f(u)).
inline double legendre_star(const PressureLaw& law, double v) {
    if (!(v > 0.0)) return 0.0;
    if (!law.regularized_term()) {
        const double m = law.m;
        return (m - 1.0) / m * power_law_cm(m) * std::pow(v, m / (m - 1.0));
    }
    double u = invert_f_prime(law, v);
    return u * v - eval_f(law, u);
}

// f*'(v) by branch; never differentiate across 0.
inline double legendre_star_prime(const PressureLaw& law, double v) { return invert_f_prime(law, v); }

struct WellParameters {
    double theta = 0.0;
    double a = 0.0;
    double gamma = 0.0;
};

inline double eval_W(const PressureLaw& law, const WellParameters& w, double u) {
    if (u < 0.0 || std::isnan(u)) throw DomainError("W evaluated at negative density");
    return eval_f(law, u) + w.a * u - u * u / (2.0 * law.sigma);
}

inline double eval_W_prime(const PressureLaw& law, const WellParameters& w, double u) {
    return eval_f_prime(law, u) + w.a - u / law.sigma;
}

inline double eval_W_sigma_prime(const PressureLaw& law, const WellParameters& w, double v) {
    const double s = law.sigma;
    return (v - legendre_star_prime(law, v / s - w.a)) / s;
}

// Moreau-Yosida envelope through its Legendre closed form. Close to theta the
// closed form cancels to noise (the value is O((v - theta)^2)), so there we
// integrate W_sigma' from theta instead.
inline double eval_W_sigma(const PressureLaw& law, const WellParameters& w, double v) {
    const double s = law.sigma;
    if (std::abs(v - w.theta) < 0.05 * w.theta) {
        const auto& r = quad::gl8();
        double h = 0.5 * (v - w.theta), c = 0.5 * (v + w.theta), acc = 0.0;
        for (std::size_t k = 0; k < r.x.size(); ++k) acc += r.w[k] * eval_W_sigma_prime(law, w, c + h * r.x[k]);
        return std::max(0.0, acc * h);
    }
    return std::max(0.0, v * v / (2.0 * s) - legendre_star(law, v / s - w.a));
}

namespace detail {

inline void double_tangency(const PressureLaw& law, double& theta, double& a) {
    const double m = law.m, s = law.sigma;
    if (!law.regularized_term()) {
        theta = std::pow(1.0 / (2.0 * s), 1.0 / (m - 2.0));
        a = (m - 2.0) / (m - 1.0) * std::pow(theta, m - 1.0);
        return;
    }
    // W(t) = W'(t) = 0 reduces to h(t) = 0 with
    // h(u) = u^{m-2} + (alpha/beta) u^{beta-2} - 1/(2 sigma), which has a single minimum.
    const double al = law.alpha, b = law.beta;
    auto h = [&](double u) { return std::pow(u, m - 2.0) + al / b * std::pow(u, b - 2.0) - 0.5 / s; };
    double ustar = 0.0;
    if (b < 2.0) ustar = std::pow(al * (2.0 - b) / (b * (m - 2.0)), 1.0 / (m - b));
    double hmin = ustar > 0.0 ? h(ustar) : al / b * (b == 2.0 ? 1.0 : 0.0) - 0.5 / s;
    if (!(hmin < 0.0)) throw ConfigError("regularized pressure law admits no double-well tilt");
    double lo = ustar, hi = std::max(1.0, 2.0 * ustar);
    for (int k = 0; h(hi) <= 0.0; ++k) {
        if (k > 2000) throw ConfigError("double-tangency bracket failed");
        hi *= 2.0;
    }
    for (int it = 0; it < 300 && hi - lo > 1e-17 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    theta = 0.5 * (lo + hi);
    a = theta / (2.0 * s) - eval_f(law, theta) / theta;
    WellParameters w{theta, a, 0.0};
    double scale = eval_f(law, theta) + theta * theta / s;
    if (std::abs(eval_W(law, w, theta)) > 1e-8 * scale) throw ConfigError("double-tangency residual too large");
    for (int k = 1; k < 2000; ++k) {
        double u = 4.0 * theta * k / 2000.0;
        if (std::abs(u - theta) < 1e-3 * theta) continue;
        if (!(eval_W(law, w, u) > 0.0)) throw ConfigError("tilted potential is not a double well");
    }
}

} // namespace detail

// gamma = (1/theta) int_0^theta sqrt(2 W_sigma). The integrand switches branch at
// v = sigma a (f* turns on), so panels are graded towards 0, sigma a and theta.
inline double surface_tension_gamma(const PressureLaw& law, int panels = 256) {
    law.validate();
    WellParameters w;
    detail::double_tangency(law, w.theta, w.a);
    auto g = [&](double v) { return std::sqrt(2.0 * eval_W_sigma(law, w, v)); };
    double brk = law.sigma * w.a;
    std::vector<double> edges;
    if (brk > 0.0 && brk < w.theta) {
        edges = quad::cosine_graded(0.0, brk, panels);
        auto right = quad::cosine_graded(brk, w.theta, panels);
        for (std::size_t k = 1; k < right.size(); ++k) edges.push_back(right[k]);
    } else {
        edges = quad::cosine_graded(0.0, w.theta, 2 * panels);
    }
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) s += quad::integrate_panel(g, edges[k], edges[k + 1]);
    return s / w.theta;
}

inline WellParameters well_parameters(const PressureLaw& law) {
    law.validate();
    WellParameters w;
    detail::double_tangency(law, w.theta, w.a);
    w.gamma = surface_tension_gamma(law);
    return w;
}

// The law together with its wells, gamma and the F_sigma table. Immutable
// after construction, so it can be shared between threads.
class Nonlinearity {
public:
    explicit Nonlinearity(const PressureLaw& law, int table_nodes = 4096)
        : law_(law), wells_(well_parameters(law)) {
        build_table(std::max(table_nodes, 16));
    }

    const PressureLaw& law() const { return law_; }
    const WellParameters& wells() const { return wells_; }
    double sigma() const { return law_.sigma; }
    double theta() const { return wells_.theta; }
    double a() const { return wells_.a; }
    double gamma() const { return wells_.gamma; }
    // Upper well in chemoattractant units.
    double phi_well() const { return wells_.theta / law_.sigma; }
    // Gamma-limit energy per unit interface length, gamma * theta / sigma.
    double interface_energy() const { return wells_.gamma * wells_.theta / law_.sigma; }

    double f(double u) const { return eval_f(law_, u); }
    double f_prime(double u) const { return eval_f_prime(law_, u); }
    double f_prime_inverse(double v) const { return invert_f_prime(law_, v); }
    double f_star(double v) const { return legendre_star(law_, v); }
    double f_star_prime(double v) const { return legendre_star_prime(law_, v); }
    double W(double u) const { return eval_W(law_, wells_, u); }
    double W_sigma(double v) const { return eval_W_sigma(law_, wells_, v); }
    double W_sigma_prime(double v) const { return eval_W_sigma_prime(law_, wells_, v); }

    // F_sigma(v) = (1/sigma) int_0^{min(v,theta)} sqrt(2 W_sigma), tabulated.
    double F_sigma(double v) const {
        if (!(v > 0.0)) return 0.0;
        if (v >= wells_.theta) return cumulative_.back();
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), v);
        std::size_t k = static_cast<std::size_t>(it - nodes_.begin()) - 1;
        double t = (v - nodes_[k]) / (nodes_[k + 1] - nodes_[k]);
        return cumulative_[k] + t * (cumulative_[k + 1] - cumulative_[k]);
    }

    const std::vector<double>& table_nodes() const { return nodes_; }

private:
    void build_table(int n) {
        double brk = law_.sigma * wells_.a;
        if (brk > 0.0 && brk < wells_.theta) {
            int n1 = std::max(4, static_cast<int>(std::lround(n * brk / wells_.theta)));
            nodes_ = quad::cosine_graded(0.0, brk, n1);
            auto right = quad::cosine_graded(brk, wells_.theta, std::max(4, n - 1 - n1));
            nodes_.insert(nodes_.end(), right.begin() + 1, right.end());
        } else {
            nodes_ = quad::cosine_graded(0.0, wells_.theta, n - 1);
        }
        auto g = [&](double v) { return std::sqrt(2.0 * W_sigma(v)); };
        cumulative_.assign(nodes_.size(), 0.0);
        for (std::size_t k = 0; k + 1 < nodes_.size(); ++k)
            cumulative_[k + 1] = cumulative_[k] + quad::integrate_panel(g, nodes_[k], nodes_[k + 1]) / law_.sigma;
        // Pin the plateau to the quadrature value of gamma so sigma F(theta)/theta = gamma holds exactly.
        double target = wells_.gamma * wells_.theta / law_.sigma;
        double scale = target / cumulative_.back();
        for (double& c : cumulative_) c *= scale;
    }

    PressureLaw law_;
    WellParameters wells_;
    std::vector<double> nodes_;
    std::vector<double> cumulative_;
};

} // namespace pks
