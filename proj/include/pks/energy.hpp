#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "field.hpp"
#include "nonlinearity.hpp"
#include "state.hpp"

namespace pks {

struct EnergyReport {
    double t = 0.0;
    double E_eps = 0.0, J_eps = 0.0, F_eps = 0.0;
    double dirichlet_term = 0.0;   // (eps/2) int |grad phi|^2
    double well_term_W = 0.0;      // (1/eps) int W(rho)
    double coupling_term = 0.0;    // (1/eps) int (rho - sigma phi)^2 / (2 sigma)
    double well_term_Wsigma = 0.0; // (1/eps) int W_sigma(sigma phi)
    double perimeter_proxy = 0.0;  // int |grad F_sigma(sigma phi)|
    double z_eps = 0.0;
    double u_int = 0.0, v_int = 0.0, w_int = 0.0;
    double defect_L2 = 0.0, defect_W = 0.0;
    double lambda_eps = 0.0;
    double ell = 0.0;
    double mass_phi = 0.0, mass_rho = 0.0;
    double sup_phi = 0.0;
    double l1_gap = 0.0, well_mass = 0.0;
    double dissipation_rate = 0.0; // eps ||dphi/dt||^2 from snapshot difference quotients
};

// G(rho, phi) = (1/eps) int [f(rho) - rho phi + sigma phi^2/2] + (eps/2) int |grad phi|^2.
inline double scheme_energy(const ScalarField& rho, const ScalarField& phi, double eps, const PressureLaw& law) {
    require_same_grid(rho, phi);
    double s = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k)
        s += eval_f(law, rho[k]) - rho[k] * phi[k] + 0.5 * law.sigma * phi[k] * phi[k];
    return s * rho.grid.cell_area() / eps + eps * dirichlet_energy(phi);
}

// Cellwise |grad phi|^2: per direction, the mean of the squared jumps over the
// two faces of the cell (boundary faces carry no flux). Summed against the
// cell area this reproduces 2 * dirichlet_energy exactly.
inline std::vector<double> cell_gradient_squared(const ScalarField& phi) {
    const Grid& g = phi.grid;
    std::vector<double> g2(g.size(), 0.0);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            double d = (phi.at(i + 1, j) - phi.at(i, j)) * ihx;
            g2[g.index(i, j)] += 0.5 * d * d;
            g2[g.index(i + 1, j)] += 0.5 * d * d;
        }
    }
    if (g.dim == 2) {
        for (int j = 0; j + 1 < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                double d = (phi.at(i, j + 1) - phi.at(i, j)) * ihy;
                g2[g.index(i, j)] += 0.5 * d * d;
                g2[g.index(i, j + 1)] += 0.5 * d * d;
            }
        }
    }
    return g2;
}

inline EnergyReport energy_report(const SimState& s) {
    const Nonlinearity& nl = *s.model;
    const PressureLaw& law = nl.law();
    const double eps = s.epsilon, sig = law.sigma;
    const ScalarField& phi = s.phi;
    const ScalarField& rho = s.density.rho;
    const double area = phi.grid.cell_area();
    auto g2 = cell_gradient_squared(phi);

    EnergyReport r;
    r.t = s.t;
    double u_sum = 0, v_sum = 0, w_sum = 0, W_sum = 0, c_sum = 0, per = 0, dl2 = 0, dw = 0, e_sum = 0;
    double l1 = 0, wm = 0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
        const double p = phi[k], q = rho[k];
        const double Ws = nl.W_sigma(sig * p);
        const double Wr = nl.W(q);
        const double cp = (q - sig * p) * (q - sig * p) / (2.0 * sig);
        const double u = 0.5 * eps * g2[k];
        const double v = Ws / eps;
        const double w = (Wr + cp) / eps;
        u_sum += u;
        v_sum += v;
        w_sum += w;
        W_sum += Wr;
        c_sum += cp;
        per += std::sqrt(2.0 * Ws * g2[k]);
        double d = std::sqrt(u) - std::sqrt(v);
        dl2 += d * d;
        dw += w - v;
        e_sum += nl.f(q) - q * p + 0.5 * sig * p * p;
        l1 += std::abs(sig * p - q);
        wm += Ws;
    }
    r.dirichlet_term = eps * dirichlet_energy(phi);
    r.well_term_W = W_sum * area / eps;
    r.coupling_term = c_sum * area / eps;
    r.well_term_Wsigma = v_sum * area;
    r.u_int = u_sum * area;
    r.v_int = v_sum * area;
    r.w_int = w_sum * area;
    r.J_eps = r.well_term_W + r.coupling_term + r.dirichlet_term;
    r.F_eps = r.well_term_Wsigma + r.dirichlet_term;
    r.E_eps = e_sum * area / eps + r.dirichlet_term;
    r.perimeter_proxy = per * area;
    r.z_eps = r.J_eps - r.perimeter_proxy;
    r.defect_L2 = dl2 * area;
    r.defect_W = dw * area;
    r.ell = s.density.ell;
    r.lambda_eps = sig / nl.gamma() * (nl.a() - s.density.ell) / eps;
    r.mass_phi = integrate(phi);
    r.mass_rho = integrate(rho);
    r.sup_phi = phi.max();
    r.l1_gap = l1 * area;
    r.well_mass = wm * area;
    return r;
}

// (int (sqrt u - sqrt v)^2, int (w - v)); both are bounded by z_eps.
inline std::pair<double, double> equipartition_defects(const SimState& s) {
    auto r = energy_report(s);
    return {r.defect_L2, r.defect_W};
}

// (int |sigma phi - rho|, int W_sigma(sigma phi)).
inline std::pair<double, double> phase_separation_metrics(const SimState& s) {
    auto r = energy_report(s);
    return {r.l1_gap, r.well_mass};
}

} // namespace pks
