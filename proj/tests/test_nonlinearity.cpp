#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pks/nonlinearity.hpp"

using namespace pks;

namespace {

const PressureLaw kPower = PressureLaw::power(3.0, 1.0);

// mpmath at 30 digits, tanh-sinh quadrature of (1/theta) int sqrt(2 W_sigma).
constexpr double kGammaFixture = 0.080899742158959928532;
constexpr double kFHalfFixture = 0.024202458063018562269;

oracle::Law oracle_law(const PressureLaw& l) { return {l.m, l.alpha, l.beta, l.sigma}; }

} // namespace

TEST(PressureLaw, EvaluatesF) {
    EXPECT_DOUBLE_EQ(eval_f(kPower, 1.0), 0.5);
    EXPECT_DOUBLE_EQ(eval_f(kPower, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(eval_f(kPower, 2.0), 4.0);
    EXPECT_DOUBLE_EQ(eval_f_prime(kPower, 0.0), 0.0);
    EXPECT_THROW(eval_f(kPower, -1e-3), DomainError);
}

TEST(PressureLaw, RejectsBadParameters) {
    EXPECT_THROW(PressureLaw::power(2.0), ConfigError);
    EXPECT_THROW(PressureLaw::power(3.0, 0.0), ConfigError);
    EXPECT_THROW(PressureLaw::regularized(3.0, 0.5, 2.5), ConfigError);
    EXPECT_THROW(PressureLaw::regularized(3.0, -0.1, 2.0), ConfigError);
}

TEST(PressureLaw, InvertsFPrime) {
    EXPECT_NEAR(invert_f_prime(kPower, 1.5), 1.0, 1e-15);
    EXPECT_EQ(invert_f_prime(kPower, 0.0), 0.0);
    EXPECT_EQ(invert_f_prime(kPower, -4.0), 0.0);
    EXPECT_NEAR(invert_f_prime(kPower, 1.0), std::sqrt(2.0 / 3.0), 1e-15);
    EXPECT_NEAR(invert_f_prime(kPower, 1.0), 0.816497, 5e-7);
    EXPECT_NEAR(power_law_cm(3.0), std::sqrt(2.0 / 3.0), 1e-15);
}

TEST(PressureLaw, InverseRoundTripOnWideRange) {
    for (const auto& law : {kPower, PressureLaw::power(4.5, 0.7), PressureLaw::regularized(3.0, 0.05, 1.5),
                            PressureLaw::regularized(3.0, 0.5, 2.0)}) {
        for (int k = 0; k <= 90; ++k) {
            double u = std::pow(10.0, -6.0 + 9.0 * k / 90.0);
            double back = invert_f_prime(law, eval_f_prime(law, u));
            EXPECT_NEAR(back, u, 1e-10 * u) << "m=" << law.m << " alpha=" << law.alpha << " u=" << u;
        }
    }
}

TEST(Legendre, MatchesBruteForceConjugation) {
    EXPECT_EQ(legendre_star(kPower, -1.0), 0.0);
    // sup_u (u v - u^3/2) by scanning
    auto [u1, neg] = oracle::dense_scan_min([](double u) { return -(u - 0.5 * u * u * u); }, 0.0, 3.0, 3000001);
    EXPECT_NEAR(legendre_star(kPower, 1.0), -neg, 1e-9);
    EXPECT_NEAR(legendre_star(kPower, 1.0), std::pow(2.0 / 3.0, 1.5), 1e-14);
    EXPECT_NEAR(legendre_star(kPower, 1.0), 0.544331, 1e-6);
    (void)u1;
    for (const auto& law : {kPower, PressureLaw::regularized(3.0, 0.05, 1.5)}) {
        oracle::Law o = oracle_law(law);
        for (double v : {0.05, 0.4, 1.0, 2.5, 4.0}) {
            auto [u, m] = oracle::scan_min([&](double x) { return o.f(x) - x * v; }, 0.0, 10.0);
            EXPECT_NEAR(legendre_star(law, v), -m, 1e-10 * (1.0 + std::abs(m))) << v;
        }
    }
}

TEST(Legendre, DerivativeIsInverseOfFPrime) {
    for (double v : {0.1, 1.0, 4.0}) {
        double h = 1e-5 * v;
        double fd = (legendre_star(kPower, v + h) - legendre_star(kPower, v - h)) / (2 * h);
        EXPECT_NEAR(fd, invert_f_prime(kPower, v), 1e-8);
        EXPECT_EQ(legendre_star_prime(kPower, v), invert_f_prime(kPower, v));
    }
    EXPECT_EQ(legendre_star_prime(kPower, -0.3), 0.0);
}

TEST(Wells, PowerLawClosedForm) {
    auto w = well_parameters(kPower);
    EXPECT_DOUBLE_EQ(w.theta, 0.5);
    EXPECT_DOUBLE_EQ(w.a, 0.125);
    EXPECT_NEAR(eval_W(kPower, w, 0.0), 0.0, 1e-16);
    EXPECT_NEAR(eval_W(kPower, w, 0.5), 0.0, 1e-16);
    EXPECT_NEAR(eval_W(kPower, w, 0.25), 0.0078125, 1e-16);
    // independent formula
    EXPECT_NEAR(eval_W(kPower, w, 0.25), 0.25 * 0.25 * 0.25 / 2 + 0.125 * 0.25 - 0.25 * 0.25 / 2, 1e-17);
    EXPECT_GT(w.gamma, 0.0);
}

TEST(Wells, GeneralExponentAndSigma) {
    for (auto [m, s] : {std::pair{2.5, 1.0}, {4.0, 0.5}, {3.0, 2.0}}) {
        PressureLaw law = PressureLaw::power(m, s);
        auto w = well_parameters(law);
        EXPECT_NEAR(w.theta, std::pow(1.0 / (2.0 * s), 1.0 / (m - 2.0)), 1e-14);
        EXPECT_NEAR(w.a, (m - 2.0) / (m - 1.0) * std::pow(w.theta, m - 1.0), 1e-14);
        EXPECT_NEAR(eval_W(law, w, w.theta), 0.0, 1e-14);
        EXPECT_NEAR(eval_W_prime(law, w, w.theta), 0.0, 1e-13);
        for (int k = 1; k < 400; ++k) {
            double u = 3.0 * w.theta * k / 400.0;
            if (std::abs(u - w.theta) < 1e-9) continue;
            EXPECT_GT(eval_W(law, w, u), 0.0) << u;
        }
    }
}

TEST(Wells, RegularizedDoubleTangency) {
    for (auto [al, b] : {std::pair{0.5, 2.0}, {0.05, 1.5}, {0.02, 1.5}}) {
        PressureLaw law = PressureLaw::regularized(3.0, al, b);
        auto w = well_parameters(law);
        double scale = eval_f(law, w.theta) + w.theta * w.theta;
        EXPECT_NEAR(eval_W(law, w, w.theta), 0.0, 1e-12 * scale);
        EXPECT_NEAR(eval_W_prime(law, w, w.theta), 0.0, 1e-9);
        EXPECT_GT(w.theta, 0.0);
        // W is minimal at theta among a fine scan away from 0
        oracle::Law o = oracle_law(law);
        auto [u, m] = oracle::scan_min([&](double x) { return o.f(x) + w.a * x - x * x / 2.0; },
                                       0.2 * w.theta, 3.0 * w.theta);
        EXPECT_NEAR(u, w.theta, 1e-6);
        EXPECT_NEAR(m, 0.0, 1e-12);
    }
}

TEST(Wells, RegularizedWithoutDoubleWellIsRejected) {
    // alpha/beta u^{beta-2} with beta = 2 shifts h by alpha/2 >= 1/(2 sigma): no tilt works
    EXPECT_THROW(well_parameters(PressureLaw::regularized(3.0, 1.2, 2.0)), ConfigError);
}

TEST(Envelope, WellsAreExactlyZero) {
    Nonlinearity nl(kPower);
    EXPECT_EQ(nl.W_sigma(0.0), 0.0);
    EXPECT_NEAR(nl.W_sigma(nl.theta()), 0.0, 1e-16);
    for (int k = 1; k < 1000; ++k) {
        double v = nl.theta() * k / 1000.0;
        EXPECT_GT(nl.W_sigma(v), 0.0) << v;
    }
}

TEST(Envelope, ClosedFormMatchesScanMinimization) {
    for (const auto& law : {kPower, PressureLaw::power(4.0, 0.5), PressureLaw::regularized(3.0, 0.05, 1.5)}) {
        auto w = well_parameters(law);
        oracle::Law o = oracle_law(law);
        for (double v : {0.37 * w.theta / 0.5, 0.1 * w.theta, 0.9 * w.theta, 2.0 * w.theta, 15.0 * w.theta}) {
            auto [u, m] = oracle::scan_min(
                [&](double x) { return o.f(x) + w.a * x - x * x / (2 * o.sigma) + (x - v) * (x - v) / (2 * o.sigma); },
                0.0, 4.0 * std::max(w.theta, v));
            EXPECT_NEAR(eval_W_sigma(law, w, v), m, 1e-12) << v;
        }
    }
    // the dense 10^6 sample scan at v = 0.37 from the reference data
    auto w = well_parameters(kPower);
    auto [u, m] = oracle::dense_scan_min(
        [&](double x) { return 0.5 * x * x * x + 0.125 * x - 0.5 * x * x + 0.5 * (x - 0.37) * (x - 0.37); }, 0.0,
        2.0, 1000000);
    EXPECT_NEAR(eval_W_sigma(kPower, w, 0.37), m, 1e-8);
    EXPECT_NEAR(eval_W_sigma(kPower, w, 0.37), 0.0024396192226527875911, 1e-15);
    EXPECT_NEAR(eval_W_sigma(kPower, w, 0.25), 0.0071937387837655931455, 1e-15);
}

TEST(Envelope, BoundsAndGrowth) {
    for (const auto& law : {kPower, PressureLaw::power(3.5, 0.8), PressureLaw::regularized(3.0, 0.05, 1.5)}) {
        auto w = well_parameters(law);
        const double s = law.sigma;
        for (int k = -200; k <= 2000; ++k) {
            double v = w.theta * k / 200.0;
            double W = eval_W_sigma(law, w, v);
            EXPECT_GE(W, 0.0);
            EXPECT_LE(W, std::min(v * v, (v - w.theta) * (v - w.theta)) / (2 * s) + 1e-15) << v;
        }
        // quadratic growth above 10 theta with a fitted constant
        double nu = 1e300;
        for (int k = 0; k <= 100; ++k) {
            double v = w.theta * (10.0 + k);
            nu = std::min(nu, eval_W_sigma(law, w, v) / (v * v));
        }
        EXPECT_GT(nu, 0.0);
        for (int k = 0; k <= 100; ++k) {
            double v = w.theta * (10.0 + 10.0 * k);
            EXPECT_GE(eval_W_sigma(law, w, v), 0.99 * nu * v * v);
        }
    }
    EXPECT_LE(eval_W_sigma(kPower, well_parameters(kPower), 0.25), 0.03125);
}

TEST(Envelope, ArgminIsFStarPrime) {
    auto w = well_parameters(kPower);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-0.2, 1.5);
    for (int k = 0; k < 50; ++k) {
        double v = U(rng);
        const double s = kPower.sigma;
        auto [u, m] = oracle::scan_min(
            [&](double x) { return eval_W(kPower, w, x) + (x - s * v) * (x - s * v) / (2 * s); }, 0.0, 4.0);
        EXPECT_NEAR(u, legendre_star_prime(kPower, v - w.a), 1e-6) << v;
    }
}

TEST(Envelope, DerivativeMatchesFiniteDifference) {
    Nonlinearity nl(kPower);
    for (double v : {0.05, 0.2, 0.37, 0.45, 1.0}) {
        double h = 1e-6;
        double fd = (nl.W_sigma(v + h) - nl.W_sigma(v - h)) / (2 * h);
        EXPECT_NEAR(nl.W_sigma_prime(v), fd, 1e-8) << v;
    }
}

TEST(SurfaceTension, MatchesFrozenFixture) {
    EXPECT_NEAR(surface_tension_gamma(kPower), kGammaFixture, 1e-12);
    double low = surface_tension_gamma(kPower, 128), high = surface_tension_gamma(kPower, 512);
    EXPECT_NEAR(low, high, 1e-8 * high);
}

TEST(SurfaceTension, MatchesAdaptiveQuadrature) {
    for (const auto& law : {kPower, PressureLaw::power(4.0, 0.5), PressureLaw::regularized(3.0, 0.05, 1.5)}) {
        auto w = well_parameters(law);
        auto g = [&](double v) { return std::sqrt(2.0 * eval_W_sigma(law, w, v)); };
        double q = oracle::adaptive_simpson(g, 0.0, w.theta, 1e-13) / w.theta;
        EXPECT_NEAR(w.gamma, q, 1e-8 * q) << law.m;
    }
}

TEST(SurfaceTension, BoundedByMaxIntegrand) {
    Nonlinearity nl(kPower);
    double mx = 0.0;
    for (int k = 0; k <= 10000; ++k) mx = std::max(mx, std::sqrt(2.0 * nl.W_sigma(nl.theta() * k / 10000.0)));
    EXPECT_LE(nl.gamma(), mx);
}

TEST(AuxiliaryPrimitive, EndpointsAndMidpoint) {
    Nonlinearity nl(kPower);
    EXPECT_EQ(nl.F_sigma(0.0), 0.0);
    EXPECT_NEAR(nl.F_sigma(nl.theta()), nl.gamma() * nl.theta() / nl.sigma(), 1e-15);
    EXPECT_NEAR(nl.F_sigma(3.0), nl.interface_energy(), 1e-15);
    EXPECT_NEAR(nl.sigma() * nl.F_sigma(nl.theta()) / nl.theta(), nl.gamma(), 1e-15);
    auto g = [&](double v) { return std::sqrt(2.0 * nl.W_sigma(v)); };
    double mid = oracle::adaptive_simpson(g, 0.0, 0.25, 1e-10);
    EXPECT_NEAR(nl.F_sigma(0.25), mid, 1e-6);
    EXPECT_NEAR(nl.F_sigma(0.25), kFHalfFixture, 1e-6);
    EXPECT_EQ(nl.table_nodes().size(), 4096u);
}

TEST(AuxiliaryPrimitive, MonotoneAndLipschitz) {
    for (const auto& law : {kPower, PressureLaw::power(3.0, 0.5)}) {
        Nonlinearity nl(law);
        const double lip = nl.theta() / (2.0 * std::pow(nl.sigma(), 1.5));
        double prev = 0.0;
        const int n = 20000;
        for (int k = 1; k <= n; ++k) {
            double v = 1.2 * nl.theta() * k / n;
            double F = nl.F_sigma(v);
            EXPECT_GE(F, prev);
            EXPECT_LE(F - prev, lip * 1.2 * nl.theta() / n * (1.0 + 1e-9));
            prev = F;
        }
    }
}

TEST(AuxiliaryPrimitive, NonPowerSigma) {
    PressureLaw law = PressureLaw::power(3.0, 0.5);
    Nonlinearity nl(law);
    auto g = [&](double v) { return std::sqrt(2.0 * nl.W_sigma(v)) / law.sigma; };
    for (double frac : {0.1, 0.5, 0.8}) {
        double v = frac * nl.theta();
        EXPECT_NEAR(nl.F_sigma(v), oracle::adaptive_simpson(g, 0.0, v, 1e-11), 1e-6);
    }
}
