#pragma once

#include <cmath>
#include <limits>

#include "errors.hpp"
#include "field.hpp"
#include "nonlinearity.hpp"

namespace pks {

struct DensitySolution {
    ScalarField rho;
    double ell = 0.0;
    double mass_residual = 0.0;
    int bisection_iterations = 0;
};

struct DensityOptions {
    double mass_tol = 1e-12;
    int max_iterations = 200;
};

namespace detail {

// rho = (f')^{-1}((phi - ell)_+) cellwise; returns the mass and its ell-derivative,
// d rho / d ell = -1 / f''(rho) on the support.
struct MassAndSlope {
    double mass = 0.0, slope = 0.0;
};

inline MassAndSlope density_at(const ScalarField& phi, const PressureLaw& law, double ell, ScalarField& rho) {
    const std::size_t n = phi.size();
    double mass = 0.0, slope = 0.0;
    if (!law.regularized_term()) {
        const double m = law.m, cm = power_law_cm(m), e = 1.0 / (m - 1.0);
        const bool sq = m == 3.0;
        for (std::size_t k = 0; k < n; ++k) {
            double v = phi[k] - ell;
            if (v > 0.0) {
                double u = sq ? cm * std::sqrt(v) : cm * std::pow(v, e);
                rho[k] = u;
                mass += u;
                slope += e * u / v;
            } else {
                rho[k] = 0.0;
            }
        }
    } else {
        const double m = law.m, b = law.beta, al = law.alpha;
        for (std::size_t k = 0; k < n; ++k) {
            double u = invert_f_prime(law, phi[k] - ell);
            rho[k] = u;
            if (u > 0.0) {
                mass += u;
                slope += 1.0 / (m * std::pow(u, m - 2.0) + al * std::pow(u, b - 2.0));
            }
        }
    }
    const double h = phi.grid.cell_area();
    return {mass * h, -slope * h};
}

} // namespace detail

// rho = (f')^{-1}((phi - ell)_+) with ell fixed by the mass constraint.
// M(ell) = int rho is continuous and strictly decreasing where positive; ell is
// found by Newton steps kept inside a shrinking bracket.
inline DensitySolution solve_density(const ScalarField& phi, const PressureLaw& law, double target_mass = 1.0,
                                     const DensityOptions& opt = {}) {
    if (!(target_mass > 0.0)) throw DomainError("target mass must be positive");
    if (!phi.finite()) throw DomainError("non-finite chemoattractant field");
    DensitySolution sol;
    sol.rho = ScalarField(phi.grid);
    const double hi_phi = phi.max(), lo_phi = phi.min();

    if (hi_phi - lo_phi < 1e-14) {
        double u = target_mass / phi.grid.measure();
        std::fill(sol.rho.values.begin(), sol.rho.values.end(), u);
        double mean = integrate(phi) / phi.grid.measure();
        sol.ell = mean - eval_f_prime(law, u);
        sol.mass_residual = std::abs(integrate(sol.rho) - target_mass);
        return sol;
    }

    double dg = 0.0;
    auto mass_gap = [&](double ell) {
        auto ms = detail::density_at(phi, law, ell, sol.rho);
        dg = ms.slope;
        return ms.mass - target_mass;
    };

    // Bracket: M(hi) = 0 < target, walk lo down geometrically.
    double hi = hi_phi;
    double step = std::max(1.0, hi_phi - lo_phi);
    double lo = hi - step, g_lo = mass_gap(lo);
    for (int k = 0; g_lo < 0.0; ++k) {
        if (k >= 1000) throw InfeasibleError("mass constraint bracket failed");
        hi = lo;
        step *= 2.0;
        lo = hi_phi - step;
        g_lo = mass_gap(lo);
    }

    // Start from the lower end, where M is smooth; bisect whenever Newton
    // leaves the bracket or two steps fail to halve it.
    double ell = lo, g = g_lo;
    double width_check = hi - lo;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        if (std::abs(g) <= opt.mass_tol) break;
        double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break; // bracket collapsed to adjacent doubles
        double cand = dg < 0.0 ? ell - g / dg : mid;
        if (!(cand > lo && cand < hi)) cand = mid;
        if (it % 2 == 1) {
            if (hi - lo > 0.5 * width_check) cand = mid;
            width_check = hi - lo;
        }
        ell = cand;
        g = mass_gap(ell);
        if (g > 0.0) lo = ell;
        else hi = ell;
    }
    if (std::abs(g) > opt.mass_tol) {
        // settle on the better bracket end
        double g_l = mass_gap(lo), g_h = mass_gap(hi);
        ell = std::abs(g_l) <= std::abs(g_h) ? lo : hi;
        g = mass_gap(ell);
    }
    sol.ell = ell;
    sol.mass_residual = std::abs(integrate(sol.rho) - target_mass);
    sol.bisection_iterations = it;
    if (!(sol.mass_residual <= opt.mass_tol))
        throw SolverError("density mass constraint not met", sol.mass_residual);
    return sol;
}

// K(rho; phi) = int f(rho) - rho phi.
inline double density_energy(const ScalarField& rho, const ScalarField& phi, const PressureLaw& law) {
    require_same_grid(rho, phi);
    double s = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
        if (rho[k] < 0.0) throw DomainError("negative density entry");
        s += eval_f(law, rho[k]) - rho[k] * phi[k];
    }
    return s * rho.grid.cell_area();
}

// ||rho_2 - rho_1||_2 / ||phi_2 - phi_1||_2, bounded by 2/alpha for uniformly convex laws.
inline double lipschitz_ratio(const ScalarField& phi1, const ScalarField& phi2, const PressureLaw& law) {
    if (!law.regularized_term()) throw ConfigError("lipschitz_ratio needs a regularized law with alpha > 0");
    require_same_grid(phi1, phi2);
    double den = l2_distance(phi1, phi2);
    if (!(den > 0.0)) throw DomainError("lipschitz ratio undefined for identical fields");
    auto r1 = solve_density(phi1, law);
    auto r2 = solve_density(phi2, law);
    return l2_distance(r1.rho, r2.rho) / den;
}

} // namespace pks
