#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "errors.hpp"

namespace pks {

// Cell-centered uniform grid on [0,lx] x [0,ly]. In 1D ny = 1 and ly = 1.
struct Grid {
    int dim = 2;
    int nx = 0, ny = 1;
    double lx = 1.0, ly = 1.0;

    static Grid line(int nx, double lx) {
        Grid g;
        g.dim = 1;
        g.nx = nx;
        g.ny = 1;
        g.lx = lx;
        g.ly = 1.0;
        g.validate();
        return g;
    }
    static Grid rect(int nx, int ny, double lx, double ly) {
        Grid g;
        g.dim = 2;
        g.nx = nx;
        g.ny = ny;
        g.lx = lx;
        g.ly = ly;
        g.validate();
        return g;
    }

    void validate() const {
        if (dim != 1 && dim != 2) throw ConfigError("grid dimension must be 1 or 2");
        if (nx < 4) throw ConfigError("grid needs at least 4 cells per direction");
        if (dim == 1 && ny != 1) throw ConfigError("1D grids have ny = 1");
        if (dim == 2 && ny < 4) throw ConfigError("grid needs at least 4 cells per direction");
        if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
            throw ConfigError("domain lengths must be positive");
    }

    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    double cell_area() const { return hx() * hy(); }
    double measure() const { return lx * ly; }
    double x(int i) const { return (i + 0.5) * hx(); }
    double y(int j) const { return dim == 1 ? 0.5 * ly : (j + 0.5) * hy(); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

    bool operator==(const Grid&) const = default;
};

struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    ScalarField(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size()) throw DomainError("field size does not match grid");
    }

    template <class F>
    static ScalarField sample(const Grid& g, F&& f) {
        ScalarField out(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) out.values[g.index(i, j)] = f(g.x(i), g.y(j));
        return out;
    }

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }
    double& at(int i, int j) { return values[grid.index(i, j)]; }
    double at(int i, int j) const { return values[grid.index(i, j)]; }

    double max() const { return *std::max_element(values.begin(), values.end()); }
    double min() const { return *std::min_element(values.begin(), values.end()); }
    bool finite() const {
        return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    }
};

inline void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid)) throw DomainError("fields live on different grids");
}

// Midpoint rule. Summation order is fixed (row-major) so results are reproducible.
inline double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * f.grid.cell_area();
}

inline double inner(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s * a.grid.cell_area();
}

inline double l2_norm(const ScalarField& a) { return std::sqrt(inner(a, a)); }

inline double l2_distance(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s * a.grid.cell_area());
}

inline double l1_distance(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
    return s * a.grid.cell_area();
}

inline double sup_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

// Reflected-ghost Neumann Laplacian: missing neighbours contribute nothing.
inline ScalarField laplacian(const ScalarField& u) {
    const Grid& g = u.grid;
    ScalarField out(g);
    const double ix2 = 1.0 / (g.hx() * g.hx());
    const double iy2 = g.dim == 2 ? 1.0 / (g.hy() * g.hy()) : 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double c = u.at(i, j);
            double s = 0.0;
            if (i > 0) s += (u.at(i - 1, j) - c) * ix2;
            if (i + 1 < g.nx) s += (u.at(i + 1, j) - c) * ix2;
            if (g.dim == 2) {
                if (j > 0) s += (u.at(i, j - 1) - c) * iy2;
                if (j + 1 < g.ny) s += (u.at(i, j + 1) - c) * iy2;
            }
            out.at(i, j) = s;
        }
    }
    return out;
}

// 1/2 sum over interior faces of (jump/h)^2 * h * facearea, the exact
// quadratic form of the stencil in laplacian().
inline double dirichlet_energy(const ScalarField& u) {
    const Grid& g = u.grid;
    const double wx = g.hy() / g.hx();
    const double wy = g.hx() / g.hy();
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            double d = u.at(i + 1, j) - u.at(i, j);
            s += wx * d * d;
        }
    }
    if (g.dim == 2) {
        for (int j = 0; j + 1 < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                double d = u.at(i, j + 1) - u.at(i, j);
                s += wy * d * d;
            }
        }
    }
    return 0.5 * s;
}

inline ScalarField apply_helmholtz(const ScalarField& u, double c0, double c1) {
    ScalarField out = laplacian(u);
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = c0 * u[k] - c1 * out[k];
    return out;
}

inline double helmholtz_residual(const ScalarField& u, double c0, double c1, const ScalarField& rhs) {
    ScalarField r = apply_helmholtz(u, c0, c1);
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s = std::max(s, std::abs(r[k] - rhs[k]));
    return s;
}

enum class SolverKind { Auto, ConjugateGradient, CosineTransform };

struct SolverOptions {
    SolverKind kind = SolverKind::Auto;
    double rel_tol = 1e-12; // contract is 1e-10, leave headroom
    int max_iterations = 0; // 0 selects a size-dependent budget
};

namespace detail {

inline double residual_bound(double c0, const ScalarField& u, const ScalarField& rhs, double tol) {
    return tol * (c0 * sup_norm(u.values) + sup_norm(rhs.values));
}

// Jacobi-preconditioned CG on the SPD matrix c0 I - c1 Lap.
inline ScalarField cg_solve(const Grid& g, double c0, double c1, const ScalarField& rhs, const SolverOptions& opt) {
    const std::size_t n = g.size();
    const double ix2 = 1.0 / (g.hx() * g.hx());
    const double iy2 = g.dim == 2 ? 1.0 / (g.hy() * g.hy()) : 0.0;
    std::vector<double> diag(n);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            int nbx = (i > 0) + (i + 1 < g.nx);
            int nby = g.dim == 2 ? (j > 0) + (j + 1 < g.ny) : 0;
            diag[g.index(i, j)] = c0 + c1 * (nbx * ix2 + nby * iy2);
        }
    }
    ScalarField u(g);
    for (std::size_t k = 0; k < n; ++k) u[k] = rhs[k] / diag[k];
    ScalarField Au = apply_helmholtz(u, c0, c1);
    std::vector<double> r(n), z(n), p(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - Au[k];
    for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag[k];
    p = z;
    double rz = 0.0;
    for (std::size_t k = 0; k < n; ++k) rz += r[k] * z[k];
    const int budget = opt.max_iterations > 0 ? opt.max_iterations : std::max<int>(1000, 4 * static_cast<int>(n));
    ScalarField pf(g);
    double res = sup_norm(r);
    for (int it = 0; it < budget; ++it) {
        if (res <= residual_bound(c0, u, rhs, opt.rel_tol)) return u;
        pf.values = p;
        ScalarField Ap = apply_helmholtz(pf, c0, c1);
        double pAp = 0.0;
        for (std::size_t k = 0; k < n; ++k) pAp += p[k] * Ap[k];
        if (!(pAp > 0.0)) break;
        double alpha = rz / pAp;
        for (std::size_t k = 0; k < n; ++k) {
            u[k] += alpha * p[k];
            r[k] -= alpha * Ap[k];
        }
        // Recompute the true residual now and then to avoid drift.
        if ((it + 1) % 50 == 0) {
            ScalarField A = apply_helmholtz(u, c0, c1);
            for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - A[k];
        }
        res = sup_norm(r);
        double rz_new = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            z[k] = r[k] / diag[k];
            rz_new += r[k] * z[k];
        }
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    double final_res = helmholtz_residual(u, c0, c1, rhs);
    if (final_res <= residual_bound(c0, u, rhs, 1e-10)) return u;
    throw SolverError("conjugate gradient did not converge", final_res);
}

// REDFT10 diagonalizes the reflected-ghost Laplacian. Plans are cached per
// thread; plan creation itself is serialized because FFTW's planner is not
// thread safe.
struct CosinePlan {
    int nx = 0, ny = 0;
    double* buf = nullptr;
    fftw_plan fwd = nullptr, inv = nullptr;

    CosinePlan(int nx_, int ny_) : nx(nx_), ny(ny_) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        buf = static_cast<double*>(fftw_malloc(sizeof(double) * nx * ny));
        if (ny == 1) {
            fwd = fftw_plan_r2r_1d(nx, buf, buf, FFTW_REDFT10, FFTW_ESTIMATE);
            inv = fftw_plan_r2r_1d(nx, buf, buf, FFTW_REDFT01, FFTW_ESTIMATE);
        } else {
            // row-major with x fastest: FFTW's first dimension is y
            fwd = fftw_plan_r2r_2d(ny, nx, buf, buf, FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
            inv = fftw_plan_r2r_2d(ny, nx, buf, buf, FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
        }
    }
    ~CosinePlan() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
        fftw_free(buf);
    }
    CosinePlan(const CosinePlan&) = delete;
    CosinePlan& operator=(const CosinePlan&) = delete;

    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }
};

inline CosinePlan& cosine_plan(int nx, int ny) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<CosinePlan>> cache;
    auto& slot = cache[{nx, ny}];
    if (!slot) slot = std::make_unique<CosinePlan>(nx, ny);
    return *slot;
}

inline std::vector<double> neumann_eigenvalues(int n, double h) {
    std::vector<double> lam(n);
    for (int k = 0; k < n; ++k) lam[k] = 2.0 * (1.0 - std::cos(std::numbers::pi * k / n)) / (h * h);
    return lam;
}

inline ScalarField dct_solve(const Grid& g, double c0, double c1, const ScalarField& rhs) {
    CosinePlan& plan = cosine_plan(g.nx, g.ny);
    std::copy(rhs.values.begin(), rhs.values.end(), plan.buf);
    fftw_execute(plan.fwd);
    auto lx = neumann_eigenvalues(g.nx, g.hx());
    std::vector<double> ly = g.dim == 2 ? neumann_eigenvalues(g.ny, g.hy()) : std::vector<double>{0.0};
    const double norm = g.dim == 2 ? 4.0 * g.nx * g.ny : 2.0 * g.nx;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) plan.buf[g.index(i, j)] /= (c0 + c1 * (lx[i] + ly[j])) * norm;
    fftw_execute(plan.inv);
    ScalarField u(g);
    std::copy(plan.buf, plan.buf + g.size(), u.values.begin());
    return u;
}

} // namespace detail

// Solves (c0 I - c1 Lap_N) u = rhs.
inline ScalarField helmholtz_solve(const Grid& g, double c0, double c1, const ScalarField& rhs,
                                   const SolverOptions& opt = {}) {
    if (!(c0 > 0.0)) throw DomainError("helmholtz_solve needs c0 > 0");
    if (!(c1 >= 0.0)) throw DomainError("helmholtz_solve needs c1 >= 0");
    if (!(rhs.grid == g)) throw DomainError("rhs lives on a different grid");
    if (opt.kind == SolverKind::ConjugateGradient) return detail::cg_solve(g, c0, c1, rhs, opt);
    ScalarField u = detail::dct_solve(g, c0, c1, rhs);
    double res = helmholtz_residual(u, c0, c1, rhs);
    if (res <= detail::residual_bound(c0, u, rhs, 1e-10)) return u;
    // One step of iterative refinement, then fall back to CG.
    ScalarField r = apply_helmholtz(u, c0, c1);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = rhs[k] - r[k];
    ScalarField du = detail::dct_solve(g, c0, c1, r);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += du[k];
    res = helmholtz_residual(u, c0, c1, rhs);
    if (res <= detail::residual_bound(c0, u, rhs, 1e-10)) return u;
    return detail::cg_solve(g, c0, c1, rhs, opt);
}

} // namespace pks
