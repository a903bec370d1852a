#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "density.hpp"
#include "energy.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "state.hpp"

namespace pks {

enum class Scheme { SemiImplicit, MinimizingMovements };

struct SchemeConfig {
    Scheme scheme = Scheme::SemiImplicit;
    double dt = 0.0;         // 0 selects cfl_factor * eps^2
    double cfl_factor = 0.1;
    double inner_tol = 1e-12; // relative to 1 + |objective|
    int max_inner = 200;
    double t_end = 0.0;
    int snapshot_every = 10;
    SolverOptions solver{};

    double step_size(double eps) const { return dt > 0.0 ? dt : cfl_factor * eps * eps; }
};

// Round-off below zero is clamped; anything larger signals instability.
inline void clamp_negative_round_off(ScalarField& phi) {
    for (double& v : phi.values) {
        if (v < 0.0) {
            if (v < -1e-12) throw NumericError("chemoattractant became negative");
            v = 0.0;
        }
        if (!std::isfinite(v)) throw NumericError("non-finite chemoattractant");
    }
}

// Implicit in -Lap and sigma phi, explicit in rho_phi.
inline SimState step_semi_implicit(const SimState& s, double dt, const SolverOptions& solver = {}) {
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    const double e2 = s.epsilon * s.epsilon, sig = s.law().sigma;
    ScalarField rhs = s.phi;
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += dt / e2 * s.density.rho[k];
    ScalarField next = helmholtz_solve(s.phi.grid, 1.0 + dt * sig / e2, dt, rhs, solver);
    clamp_negative_round_off(next);
    SimState out = s;
    out.t = s.t + dt;
    out.phi = std::move(next);
    out.density = solve_density(out.phi, s.law(), 1.0);
    return out;
}

struct InnerDiagnostics {
    int iterations = 0;
    double objective = 0.0;
    double last_decrease = 0.0;
    bool converged = false;
};

// One outer step of the minimizing-movements scheme by alternating exact
// minimization in phi (a linear solve) and in rho (solve_density).
inline std::pair<SimState, InnerDiagnostics> step_minimizing_movements(const SimState& s, double tau,
                                                                        double inner_tol = 1e-12,
                                                                        int max_inner = 200,
                                                                        const SolverOptions& solver = {}) {
    if (!(tau > 0.0)) throw DomainError("tau must be positive");
    const double eps = s.epsilon, sig = s.law().sigma;
    const ScalarField& prev = s.phi;
    auto objective = [&](const ScalarField& rho, const ScalarField& phi) {
        double d = l2_distance(phi, prev);
        return eps * d * d / (2.0 * tau) + scheme_energy(rho, phi, eps, s.law());
    };
    SimState cur = s;
    InnerDiagnostics diag;
    double obj = objective(cur.density.rho, cur.phi);
    for (int k = 0; k < max_inner; ++k) {
        ScalarField rhs(prev.grid);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = eps / tau * prev[i] + cur.density.rho[i] / eps;
        ScalarField phi = helmholtz_solve(prev.grid, eps / tau + sig / eps, eps, rhs, solver);
        clamp_negative_round_off(phi);
        cur.phi = std::move(phi);
        cur.density = solve_density(cur.phi, s.law(), 1.0);
        double next = objective(cur.density.rho, cur.phi);
        diag.iterations = k + 1;
        diag.last_decrease = obj - next;
        obj = next;
        if (diag.last_decrease < inner_tol * (1.0 + std::abs(obj))) {
            diag.converged = true;
            break;
        }
    }
    diag.objective = obj;
    cur.t = s.t + tau;
    return {std::move(cur), diag};
}

// Soft sup-norm barrier for power laws with C2 = sigma/2: (f')^{-1}(v) <= C2 v
// beyond v*, so max phi relaxes towards max(v*, (-ell)_+).
inline double sup_barrier(const PressureLaw& law, double sup_initial, double neg_ell, double t, double eps) {
    const double c2 = 0.5 * law.sigma;
    const double vstar = std::pow(power_law_cm(law.m) / c2, (law.m - 1.0) / (law.m - 2.0));
    return std::max(vstar, neg_ell) + sup_initial * std::exp((c2 - law.sigma) * t / (eps * eps));
}

struct Trajectory {
    std::vector<SimState> snapshots;
    std::vector<EnergyReport> rows;
};

using SnapshotObserver = std::function<void(const SimState&, const EnergyReport&)>;

// Steps to t_end (last step shortened so the final time is exact) and calls
// observe at step 0, every snapshot_every steps and at the end.
inline void run(const SimState& initial, const SchemeConfig& cfg, const SnapshotObserver& observe) {
    if (!(cfg.t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
    if (cfg.snapshot_every < 1) throw ConfigError("snapshot_every must be >= 1");
    SimState s = initial;
    EnergyReport r0 = energy_report(s);
    observe(s, r0);
    if (cfg.t_end <= 0.0) return;
    const double dt_nominal = cfg.step_size(s.epsilon);
    if (!(dt_nominal > 0.0)) throw ConfigError("time step must be positive");
    const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.t_end / dt_nominal - 1e-9)));
    const double dt = cfg.t_end / static_cast<double>(steps);
    ScalarField last_phi = s.phi;
    double last_t = s.t;
    for (long n = 1; n <= steps; ++n) {
        if (cfg.scheme == Scheme::SemiImplicit) {
            s = step_semi_implicit(s, dt, cfg.solver);
        } else {
            s = step_minimizing_movements(s, dt, cfg.inner_tol, cfg.max_inner, cfg.solver).first;
        }
        s.t = initial.t + cfg.t_end * static_cast<double>(n) / static_cast<double>(steps);
        if (n % cfg.snapshot_every == 0 || n == steps) {
            EnergyReport r = energy_report(s);
            double gap = s.t - last_t;
            double d = l2_distance(s.phi, last_phi);
            r.dissipation_rate = s.epsilon * d * d / (gap * gap);
            observe(s, r);
            last_phi = s.phi;
            last_t = s.t;
        }
    }
}

inline Trajectory run(const ScalarField& initial, const SchemeConfig& cfg, double eps, ModelPtr model) {
    Trajectory tr;
    run(SimState::initial(initial, eps, std::move(model)), cfg, [&](const SimState& s, const EnergyReport& r) {
        tr.snapshots.push_back(s);
        tr.rows.push_back(r);
    });
    return tr;
}

} // namespace pks
