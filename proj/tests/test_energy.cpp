#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pks/energy.hpp"
#include "pks/evolution.hpp"
#include "pks/interface.hpp"

using namespace pks;

namespace {

const PressureLaw kPower = PressureLaw::power(3.0, 1.0);

ModelPtr model() {
    static ModelPtr m = make_model(kPower);
    return m;
}

void expect_chain(const EnergyReport& r) {
    const double tol = 1e-12 * (1.0 + std::abs(r.J_eps));
    EXPECT_GE(r.J_eps, r.F_eps - tol);
    EXPECT_GE(r.F_eps, r.perimeter_proxy - tol);
    EXPECT_GE(r.perimeter_proxy, 0.0);
    EXPECT_GE(r.z_eps, -tol);
    EXPECT_GE(r.w_int, r.v_int - tol);
    EXPECT_GE(r.defect_W, -tol);
    EXPECT_LE(r.defect_L2, r.z_eps + 1e-9);
    EXPECT_LE(r.defect_W, r.z_eps + 1e-9);
    EXPECT_TRUE(std::isfinite(r.lambda_eps));
}

} // namespace

TEST(EnergyReport, ConstantField) {
    Grid g = Grid::rect(16, 16, 2.0, 2.0);
    const double c = 0.3, eps = 0.05;
    auto s = SimState::initial(ScalarField(g, c), eps, model());
    auto r = energy_report(s);
    Nonlinearity nl(kPower);
    EXPECT_NEAR(r.F_eps, g.measure() * nl.W_sigma(c) / eps, 1e-12);
    EXPECT_EQ(r.dirichlet_term, 0.0);
    EXPECT_EQ(r.perimeter_proxy, 0.0);
    const double v = nl.W_sigma(c) / eps;
    const double rho = 1.0 / g.measure();
    const double w = (nl.W(rho) + (rho - c) * (rho - c) / 2.0) / eps;
    EXPECT_NEAR(r.defect_L2, g.measure() * v, 1e-12);
    EXPECT_NEAR(r.defect_W, g.measure() * (w - v), 1e-12);
    EXPECT_NEAR(r.l1_gap, g.measure() * std::abs(c - rho), 1e-12);
    auto [dl2, dw] = equipartition_defects(s);
    EXPECT_EQ(dl2, r.defect_L2);
    EXPECT_EQ(dw, r.defect_W);
    expect_chain(r);
}

TEST(EnergyReport, ChainOnRandomAndPreparedFields) {
    std::mt19937_64 rng(17);
    Nonlinearity nl(kPower);
    Grid g = Grid::rect(64, 64, 2.0, 2.0);
    for (int k = 0; k < 10; ++k) {
        oracle::SmoothRandom sm(rng, 8, 1.0, 0.3);
        auto phi = ScalarField::sample(g, [&](double x, double y) { return std::max(0.0, sm(x, y, 2.0, 2.0)); });
        auto r = energy_report(SimState::initial(phi, 0.05, model()));
        expect_chain(r);
        EXPECT_NEAR(r.J_eps - r.E_eps, nl.a() / 0.05, 1e-9 * std::abs(r.J_eps));
    }
    for (double eps : {0.05, 0.04}) {
        auto phi = well_prepared_field(scale_to_area(Circle{1.0, 1.0, 0.5}, 2.0), g, nl, eps);
        auto r = energy_report(SimState::initial(phi, eps, model()));
        expect_chain(r);
        EXPECT_NEAR(r.J_eps - r.E_eps, nl.a() / eps, 1e-9 * std::abs(r.J_eps));
    }
}

TEST(EnergyReport, DirichletTermPairsWithCellGradient) {
    std::mt19937_64 rng(4);
    Grid g = Grid::rect(20, 30, 1.0, 1.5);
    oracle::SmoothRandom sm(rng, 5, 1.0, 0.5);
    auto phi = ScalarField::sample(g, [&](double x, double y) { return sm(x, y, 1.0, 1.5); });
    auto g2 = cell_gradient_squared(phi);
    double s = 0.0;
    for (double v : g2) s += v;
    EXPECT_NEAR(0.5 * s * g.cell_area(), dirichlet_energy(phi), 1e-12 * dirichlet_energy(phi));
}

TEST(EnergyReport, OneDimensionalFrontApproachesInterfaceEnergy) {
    // one interface point: the limit is gamma theta / sigma
    Nonlinearity nl(kPower);
    double prev_err = 1e300;
    for (double eps : {0.08, 0.04, 0.02}) {
        Grid g = Grid::line(512, 3.0);
        auto phi = well_prepared_field(HalfPlane{2.0}, g, nl, eps);
        auto r = energy_report(SimState::initial(phi, eps, model()));
        double err = std::abs(r.J_eps - nl.interface_energy()) / nl.interface_energy();
        EXPECT_LT(err, prev_err);
        prev_err = err;
        expect_chain(r);
    }
    EXPECT_LE(prev_err, 0.05);
}

TEST(EnergyReport, PhaseSeparationContracts) {
    Nonlinearity nl(kPower);
    Grid g = Grid::rect(128, 128, 2.0, 2.0);
    const double eps = 0.04;
    auto phi = well_prepared_field(scale_to_area(Circle{1.0, 1.0, 0.5}, 2.0), g, nl, eps);
    SchemeConfig cfg;
    cfg.t_end = 0.01;
    cfg.snapshot_every = 5;
    auto tr = run(phi, cfg, eps, model());
    double supJ = 0.0;
    for (const auto& r : tr.rows) supJ = std::max(supJ, r.J_eps);
    for (const auto& r : tr.rows) {
        EXPECT_LE(r.l1_gap, std::sqrt(g.measure()) * std::sqrt(2.0 * nl.sigma() * eps * r.J_eps));
        EXPECT_LE(r.well_mass, eps * r.J_eps);
        EXPECT_LE(r.well_mass / eps, supJ);
        expect_chain(r);
    }
    auto [l1, wm] = phase_separation_metrics(tr.snapshots.back());
    EXPECT_EQ(l1, tr.rows.back().l1_gap);
    EXPECT_EQ(wm, tr.rows.back().well_mass);
}

TEST(EnergyReport, DissipationConsistency) {
    // minimizing movements, factor 1/2 on the snapshot dissipation estimate
    Nonlinearity nl(kPower);
    Grid g = Grid::line(256, 3.0);
    const double eps = 0.08;
    auto phi = ScalarField::sample(g, [](double x, double) { return 0.4 + 0.25 * std::cos(2.0 * x) + 0.1 * std::cos(5.0 * x); });
    SchemeConfig cfg;
    cfg.scheme = Scheme::MinimizingMovements;
    cfg.t_end = 0.02;
    cfg.snapshot_every = 1;
    auto tr = run(phi, cfg, eps, model());
    double cum = 0.0;
    for (std::size_t k = 1; k < tr.rows.size(); ++k) {
        double dt = tr.rows[k].t - tr.rows[k - 1].t;
        cum += 0.5 * tr.rows[k].dissipation_rate * dt;
        EXPECT_LE(tr.rows[k].J_eps, tr.rows[k - 1].J_eps + 1e-10);
    }
    EXPECT_LE(cum, tr.rows.front().J_eps - tr.rows.back().J_eps + 1e-6);
}

TEST(EnergyReport, LambdaFromMultiplier) {
    Nonlinearity nl(kPower);
    Grid g = Grid::rect(64, 64, 2.0, 2.0);
    const double eps = 0.04;
    auto s = SimState::initial(well_prepared_field(scale_to_area(Circle{1.0, 1.0, 0.5}, 2.0), g, nl, eps), eps, model());
    auto r = energy_report(s);
    EXPECT_NEAR(r.lambda_eps, nl.sigma() / nl.gamma() * (nl.a() - s.density.ell) / eps, 1e-12);
    EXPECT_EQ(r.ell, s.density.ell);
    EXPECT_NEAR(r.mass_rho, 1.0, 1e-12);
}
