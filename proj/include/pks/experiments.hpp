#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "energy.hpp"
#include "evolution.hpp"
#include "interface.hpp"
#include "io.hpp"
#include "vpmcf.hpp"

namespace pks {

inline const std::vector<std::string>& diagnostics_header() {
    static const std::vector<std::string> h = {
        "t",     "mass_phi", "mass_rho",        "ell",   "lambda_eps", "E_eps",   "J_eps",     "F_eps",  "perimeter_proxy",
        "z_eps", "u_int",    "v_int",           "w_int", "l1_gap",     "well_mass", "sup_phi", "dissipation_rate"};
    return h;
}

inline std::vector<double> diagnostics_row(const EnergyReport& r) {
    return {r.t,     r.mass_phi, r.mass_rho, r.ell,   r.lambda_eps, r.E_eps,     r.J_eps,   r.F_eps,
            r.perimeter_proxy, r.z_eps, r.u_int, r.v_int, r.w_int, r.l1_gap, r.well_mass, r.sup_phi,
            r.dissipation_rate};
}

// Deterministic uniform doubles in [0,1) from the raw 64-bit Mersenne stream.
class UnitRandom {
public:
    explicit UnitRandom(std::uint64_t seed) : gen_(seed) {}
    double operator()() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 gen_;
};

// Uniform state plus a few random low cosine modes.
inline ScalarField noise_field(const Grid& g, double sigma, double amplitude, std::uint64_t seed) {
    UnitRandom rnd(seed);
    const double mean = 1.0 / (sigma * g.measure());
    struct Mode {
        int kx, ky;
        double c;
    };
    std::vector<Mode> modes;
    for (int kx = 0; kx <= 4; ++kx)
        for (int ky = 0; ky <= (g.dim == 2 ? 4 : 0); ++ky)
            if (kx + ky > 0) modes.push_back({kx, ky, 2.0 * rnd() - 1.0});
    double norm = 0.0;
    for (const auto& m : modes) norm += std::abs(m.c);
    return ScalarField::sample(g, [&](double x, double y) {
        double s = 0.0;
        for (const auto& m : modes)
            s += m.c * std::cos(m.kx * std::numbers::pi * x / g.lx) * std::cos(m.ky * std::numbers::pi * y / g.ly);
        return mean * (1.0 + amplitude * s / norm);
    });
}

inline ScalarField make_initial_field(const RunConfig& c, const Nonlinearity& nl, const Grid& g) {
    if (c.init == "snapshot") {
        Snapshot s = read_snapshot(c.init_file);
        return s.field;
    }
    if (c.init == "noise") return noise_field(g, nl.sigma(), c.noise_amplitude, static_cast<std::uint64_t>(c.seed));
    return well_prepared_field(make_shape(c, nl), g, nl, c.epsilon);
}

inline std::string numbered(const std::string& stem, long n, const std::string& ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%06ld", n);
    return stem + buf + ext;
}

inline void write_contours(const std::string& path, const std::vector<Polyline>& lines) {
    CsvWriter w(path, {"polyline_id", "x", "y"});
    for (std::size_t k = 0; k < lines.size(); ++k)
        for (Vec2 p : lines[k].points)
            w.row_strings({std::to_string(k), format_number(p.x), format_number(p.y)});
}

struct SimulationResult {
    std::vector<EnergyReport> rows;
    std::optional<SimState> final_state;
};

// Runs the phase-field model described by the config. When write_files is set,
// output_dir receives diagnostics.csv plus snapshots and contours at cadence.
inline SimulationResult simulate(const RunConfig& c, bool write_files = true,
                                 const SnapshotObserver& extra = nullptr) {
    validate_config(c);
    ModelPtr model = make_model(make_law(c));
    Grid g = make_grid(c);
    ScalarField phi0 = make_initial_field(c, *model, g);
    SchemeConfig scheme = make_scheme(c);
    SimulationResult res;
    std::optional<CsvWriter> diag;
    std::filesystem::path dir(c.output_dir);
    if (write_files) {
        std::filesystem::create_directories(dir);
        std::ofstream(dir / "config.txt") << print_config(c);
        diag.emplace((dir / "diagnostics.csv").string(), diagnostics_header());
    }
    long frame = 0;
    const double level = 0.5 * model->phi_well();
    SimState init = SimState::initial(phi0, c.epsilon, model);
    run(init, scheme, [&](const SimState& s, const EnergyReport& r) {
        res.rows.push_back(r);
        if (write_files) {
            diag->row(diagnostics_row(r));
            diag->flush();
            if (c.write_snapshots) write_snapshot((dir / numbered("snap", frame, ".pksf")).string(), s.phi, s.t);
            if (c.write_contours && s.phi.grid.dim == 2)
                write_contours((dir / numbered("contour", frame, ".csv")).string(), extract_contour(s.phi, level));
        }
        if (extra) extra(s, r);
        res.final_state = s;
        ++frame;
    });
    return res;
}

// Oracle curve matching the config shape.
inline Curve oracle_curve(const RunConfig& c, const Nonlinearity& nl) {
    Shape s = make_shape(c, nl);
    Curve curve;
    const int n = c.mcf_vertices;
    if (const auto* ci = std::get_if<Circle>(&s)) curve.components.push_back(circle_polygon(ci->cx, ci->cy, ci->r, n));
    else if (const auto* e = std::get_if<Ellipse>(&s)) curve.components.push_back(ellipse_polygon(e->cx, e->cy, e->rx, e->ry, n));
    else if (const auto* t = std::get_if<TwoCircles>(&s)) {
        curve.components.push_back(circle_polygon(t->a.cx, t->a.cy, t->a.r, n));
        curve.components.push_back(circle_polygon(t->b.cx, t->b.cy, t->b.r, n));
    } else {
        throw ConfigError("the curvature-flow oracle needs a circle, ellipse or two_circles shape");
    }
    return curve;
}

inline std::vector<Polyline> curve_polylines(const Curve& c) {
    std::vector<Polyline> out;
    for (const auto& p : c.components) out.push_back(Polyline{p, true});
    return out;
}

// Advances the oracle to time t_target with adaptive explicit steps.
class OracleClock {
public:
    OracleClock(Curve c, double dt_factor) : curve_(std::move(c)), dt_factor_(dt_factor) {}

    // Returns false once the oracle has stopped on a topology change.
    bool advance_to(double t_target) {
        while (!stopped_ && t_ < t_target * (1.0 - 1e-14)) {
            double h = std::min(dt_factor_ * std::pow(min_spacing(curve_), 2), t_target - t_);
            try {
                curve_ = step_vpmcf(curve_, h);
            } catch (const TopologyError&) {
                stopped_ = true;
                break;
            }
            t_ = (t_ + h >= t_target * (1.0 - 1e-14)) ? t_target : t_ + h;
        }
        return !stopped_;
    }
    const Curve& curve() const { return curve_; }
    double t() const { return t_; }
    bool stopped() const { return stopped_; }

private:
    Curve curve_;
    double dt_factor_;
    double t_ = 0.0;
    bool stopped_ = false;
};

struct CompareRow {
    double t = 0.0, hausdorff = 0.0, area_pf = 0.0, area_oracle = 0.0, lambda_eps_avg = 0.0, lambda_oracle = 0.0;
};

struct CompareResult {
    std::vector<CompareRow> rows;
    std::vector<EnergyReport> reports;
    bool topology_stop = false;
};

inline const std::vector<std::string>& compare_header() {
    static const std::vector<std::string> h = {"t", "hausdorff", "area_pf", "area_oracle", "lambda_eps_avg",
                                               "lambda_oracle"};
    return h;
}

// Phase field and oracle from the same shape, compared at every snapshot.
inline CompareResult compare(const RunConfig& c, bool write_files = true) {
    validate_config(c);
    if (c.dim != 2) throw ConfigError("compare needs a 2D configuration");
    auto nl = make_model(make_law(c));
    OracleClock oracle(oracle_curve(c, *nl), c.mcf_dt_factor);
    const double level = 0.5 * nl->phi_well();
    CompareResult res;
    std::optional<CsvWriter> out;
    if (write_files) {
        std::filesystem::create_directories(c.output_dir);
        out.emplace((std::filesystem::path(c.output_dir) / "compare.csv").string(), compare_header());
    }
    std::deque<double> window;
    RunConfig pf = c;
    auto observe = [&](const SimState& s, const EnergyReport& r) {
        res.reports.push_back(r);
        window.push_back(r.lambda_eps);
        if (static_cast<int>(window.size()) > c.lambda_window) window.pop_front();
        if (res.topology_stop) return;
        if (!oracle.advance_to(s.t)) {
            res.topology_stop = true;
            return;
        }
        auto contour = extract_contour(s.phi, level);
        CompareRow row;
        row.t = s.t;
        row.area_pf = contour_area(contour);
        row.area_oracle = curve_area(oracle.curve());
        row.hausdorff = contour.empty() ? std::numeric_limits<double>::infinity()
                                        : hausdorff_distance(contour, curve_polylines(oracle.curve()));
        row.lambda_eps_avg = std::accumulate(window.begin(), window.end(), 0.0) / static_cast<double>(window.size());
        row.lambda_oracle = volume_multiplier(oracle.curve());
        res.rows.push_back(row);
        if (out) {
            out->row({row.t, row.hausdorff, row.area_pf, row.area_oracle, row.lambda_eps_avg, row.lambda_oracle});
            out->flush();
        }
    };
    simulate(pf, write_files, observe);
    return res;
}

// Number of concurrent workers: hardware threads capped by PKS_THREADS.
inline unsigned worker_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PKS_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs jobs[0..n) on a small pool; each job index runs exactly once.
template <class F>
void parallel_for(std::size_t n, F&& job) {
    unsigned workers = worker_count(n);
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for (std::size_t k = next++; k < n; k = next++) job(k);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(loop);
    loop();
    for (auto& t : pool) t.join();
}

struct SweepCell {
    double epsilon = 0.0;
    std::string status = "ok";
    int nx = 0;
    EnergyReport final_report;
    double hausdorff = std::numeric_limits<double>::quiet_NaN();
    double hausdorff_max = std::numeric_limits<double>::quiet_NaN();
    double lambda_eps_avg = std::numeric_limits<double>::quiet_NaN();
    double lambda_oracle = std::numeric_limits<double>::quiet_NaN();
    double area_pf_max_dev = std::numeric_limits<double>::quiet_NaN();
    std::vector<CompareRow> compare_rows;
    std::vector<EnergyReport> reports;
};

inline const std::vector<std::string>& sweep_header() {
    static const std::vector<std::string> h = {
        "epsilon", "status", "nx",       "t",         "J_eps",         "l1_gap",         "well_mass",
        "z_eps",   "defect_L2", "defect_W", "hausdorff", "lambda_eps_avg", "lambda_oracle"};
    return h;
}

inline RunConfig sweep_member(const RunConfig& base, double eps) {
    RunConfig c = base;
    c.epsilon = eps;
    c.output_dir = (std::filesystem::path(base.output_dir) / ("eps_" + format_number(eps))).string();
    return c;
}

// One run per epsilon, concurrently; failures are recorded per cell.
inline std::vector<SweepCell> sweep(const RunConfig& base, const std::vector<double>& eps_list,
                                    bool write_files = true) {
    std::vector<SweepCell> cells(eps_list.size());
    const bool with_oracle = base.dim == 2 && (base.init == "circle" || base.init == "ellipse" ||
                                               base.init == "two_circles");
    parallel_for(eps_list.size(), [&](std::size_t k) {
        SweepCell& cell = cells[k];
        cell.epsilon = eps_list[k];
        RunConfig c = sweep_member(base, eps_list[k]);
        try {
            cell.nx = make_grid(c).nx;
            if (with_oracle) {
                CompareResult cr = compare(c, write_files);
                cell.reports = cr.reports;
                cell.compare_rows = cr.rows;
                if (cr.topology_stop) cell.status = "oracle_topology_stop";
                if (!cr.rows.empty()) {
                    cell.hausdorff = cr.rows.back().hausdorff;
                    cell.lambda_eps_avg = cr.rows.back().lambda_eps_avg;
                    cell.lambda_oracle = cr.rows.back().lambda_oracle;
                    cell.hausdorff_max = 0.0;
                    cell.area_pf_max_dev = 0.0;
                    for (const auto& r : cr.rows) {
                        cell.hausdorff_max = std::max(cell.hausdorff_max, r.hausdorff);
                        cell.area_pf_max_dev = std::max(cell.area_pf_max_dev, std::abs(r.area_pf - r.area_oracle));
                    }
                }
            } else {
                cell.reports = simulate(c, write_files).rows;
            }
            if (!cell.reports.empty()) cell.final_report = cell.reports.back();
        } catch (const std::exception& e) {
            cell.status = std::string("failed: ") + e.what();
            std::replace(cell.status.begin(), cell.status.end(), ',', ';');
        }
    });
    if (write_files) {
        std::filesystem::create_directories(base.output_dir);
        CsvWriter w((std::filesystem::path(base.output_dir) / "sweep.csv").string(), sweep_header());
        for (const auto& cell : cells) {
            const auto& r = cell.final_report;
            std::vector<std::string> row = {format_number(cell.epsilon), cell.status, std::to_string(cell.nx)};
            for (double v : {r.t, r.J_eps, r.l1_gap, r.well_mass, r.z_eps, r.defect_L2, r.defect_W, cell.hausdorff,
                             cell.lambda_eps_avg, cell.lambda_oracle})
                row.push_back(format_number(v));
            w.row_strings(row);
        }
    }
    return cells;
}

} // namespace pks
