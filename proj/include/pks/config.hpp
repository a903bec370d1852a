#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "evolution.hpp"
#include "field.hpp"
#include "interface.hpp"
#include "io.hpp"
#include "nonlinearity.hpp"

namespace pks {

// Flat run description; every field is one key=value line.
struct RunConfig {
    std::string law = "power"; // power | regularized
    double m = 3.0;
    double alpha = 0.0;
    double beta = 2.0;
    double sigma = 1.0;
    double epsilon = 0.04;

    int dim = 2;
    int nx = 256;
    int ny = 256;
    double lx = 2.0;
    double ly = 2.0;
    double cells_per_eps = 0.0; // >0 overrides nx, ny with ceil(l / eps * cells_per_eps)

    std::string scheme = "semi_implicit"; // semi_implicit | minimizing_movements
    double dt = 0.0;
    double cfl_factor = 0.1;
    double inner_tol = 1e-12;
    int max_inner = 200;
    std::string solver = "auto"; // auto | cg | dct

    std::string init = "circle"; // circle | ellipse | two_circles | halfplane | noise | snapshot
    double cx = 1.0, cy = 1.0;
    double r = std::sqrt(2.0 / std::numbers::pi);
    double rx = 1.2, ry = 0.7;
    double cx2 = 1.5, cy2 = 1.0, r2 = 0.3;
    double x0 = 0.5;
    bool normalize_area = true; // rescale the shape to enclose 1/theta
    double noise_amplitude = 0.1;
    std::string init_file;

    double t_end = 0.1;
    int snapshot_every = 50;
    bool write_snapshots = true;
    bool write_contours = true;
    std::string output_dir = "out";
    long seed = 1;

    int mcf_vertices = 256;
    double mcf_dt_factor = 0.1;
    int lambda_window = 20;
    std::string epsilons = "0.08,0.04,0.02";

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

struct ConfigKey {
    const char* name;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline long parse_integer(const std::string& s) {
    double v = parse_number(s);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError("not an integer: '" + s + "'");
    return static_cast<long>(v);
}

inline bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("not a boolean: '" + s + "'");
}

#define PKS_REAL(field) \
    ConfigKey{#field, [](const RunConfig& c) { return format_number(c.field); }, \
              [](RunConfig& c, const std::string& v) { c.field = parse_number(v); }}
#define PKS_INT(field) \
    ConfigKey{#field, [](const RunConfig& c) { return std::to_string(c.field); }, \
              [](RunConfig& c, const std::string& v) { c.field = static_cast<decltype(c.field)>(parse_integer(v)); }}
#define PKS_BOOL(field) \
    ConfigKey{#field, [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }, \
              [](RunConfig& c, const std::string& v) { c.field = parse_bool(v); }}
#define PKS_STR(field) \
    ConfigKey{#field, [](const RunConfig& c) { return c.field; }, \
              [](RunConfig& c, const std::string& v) { c.field = v; }}

inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        PKS_STR(law),        PKS_REAL(m),           PKS_REAL(alpha),         PKS_REAL(beta),
        PKS_REAL(sigma),     PKS_REAL(epsilon),     PKS_INT(dim),            PKS_INT(nx),
        PKS_INT(ny),         PKS_REAL(lx),          PKS_REAL(ly),            PKS_REAL(cells_per_eps),
        PKS_STR(scheme),     PKS_REAL(dt),          PKS_REAL(cfl_factor),    PKS_REAL(inner_tol),
        PKS_INT(max_inner),  PKS_STR(solver),       PKS_STR(init),           PKS_REAL(cx),
        PKS_REAL(cy),        PKS_REAL(r),           PKS_REAL(rx),            PKS_REAL(ry),
        PKS_REAL(cx2),       PKS_REAL(cy2),         PKS_REAL(r2),            PKS_REAL(x0),
        PKS_BOOL(normalize_area), PKS_REAL(noise_amplitude), PKS_STR(init_file), PKS_REAL(t_end),
        PKS_INT(snapshot_every), PKS_BOOL(write_snapshots), PKS_BOOL(write_contours), PKS_STR(output_dir),
        PKS_INT(seed),       PKS_INT(mcf_vertices), PKS_REAL(mcf_dt_factor), PKS_INT(lambda_window),
        PKS_STR(epsilons),
    };
    return keys;
}

#undef PKS_REAL
#undef PKS_INT
#undef PKS_BOOL
#undef PKS_STR

} // namespace detail

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
    for (const auto& k : detail::config_keys()) {
        if (key == k.name) {
            k.set(c, value);
            return;
        }
    }
    throw ConfigError("unknown configuration key '" + key + "'");
}

// Applies "key=value".
inline void apply_assignment(RunConfig& c, const std::string& line) {
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + line + "'");
    set_config_value(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
}

inline RunConfig parse_config(const std::string& text, RunConfig base = {}) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        try {
            apply_assignment(base, line);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

inline std::string print_config(const RunConfig& c) {
    std::string out;
    for (const auto& k : detail::config_keys()) out += std::string(k.name) + " = " + k.get(c) + "\n";
    return out;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

inline std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = detail::trim(item);
        if (!item.empty()) out.push_back(parse_number(item));
    }
    return out;
}

inline PressureLaw make_law(const RunConfig& c) {
    if (c.law == "power") return PressureLaw::power(c.m, c.sigma);
    if (c.law == "regularized") return PressureLaw::regularized(c.m, c.alpha, c.beta, c.sigma);
    throw ConfigError("unknown law '" + c.law + "'");
}

inline Grid make_grid(const RunConfig& c) {
    int nx = c.nx, ny = c.ny;
    if (c.cells_per_eps > 0.0) {
        nx = static_cast<int>(std::ceil(c.lx / c.epsilon * c.cells_per_eps - 1e-9));
        ny = static_cast<int>(std::ceil(c.ly / c.epsilon * c.cells_per_eps - 1e-9));
    }
    if (c.dim == 1) return Grid::line(nx, c.lx);
    if (c.dim == 2) return Grid::rect(nx, ny, c.lx, c.ly);
    throw ConfigError("dim must be 1 or 2");
}

inline SchemeConfig make_scheme(const RunConfig& c) {
    SchemeConfig s;
    if (c.scheme == "semi_implicit") s.scheme = Scheme::SemiImplicit;
    else if (c.scheme == "minimizing_movements") s.scheme = Scheme::MinimizingMovements;
    else throw ConfigError("unknown scheme '" + c.scheme + "'");
    if (c.dt < 0.0) throw ConfigError("dt must be >= 0");
    if (!(c.cfl_factor > 0.0)) throw ConfigError("cfl_factor must be > 0");
    if (!(c.inner_tol > 0.0)) throw ConfigError("inner_tol must be > 0");
    if (c.max_inner < 1) throw ConfigError("max_inner must be >= 1");
    if (!(c.t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
    if (c.snapshot_every < 1) throw ConfigError("snapshot_every must be >= 1");
    s.dt = c.dt;
    s.cfl_factor = c.cfl_factor;
    s.inner_tol = c.inner_tol;
    s.max_inner = c.max_inner;
    s.t_end = c.t_end;
    s.snapshot_every = c.snapshot_every;
    if (c.solver == "auto") s.solver.kind = SolverKind::Auto;
    else if (c.solver == "cg") s.solver.kind = SolverKind::ConjugateGradient;
    else if (c.solver == "dct") s.solver.kind = SolverKind::CosineTransform;
    else throw ConfigError("unknown solver '" + c.solver + "'");
    return s;
}

inline bool init_is_shape(const RunConfig& c) {
    return c.init == "circle" || c.init == "ellipse" || c.init == "two_circles" || c.init == "halfplane";
}

// The initial shape, rescaled to area 1/theta when normalize_area is set.
inline Shape make_shape(const RunConfig& c, const Nonlinearity& nl) {
    Shape s;
    if (c.init == "circle") s = Circle{c.cx, c.cy, c.r};
    else if (c.init == "ellipse") s = Ellipse{c.cx, c.cy, c.rx, c.ry};
    else if (c.init == "two_circles") s = TwoCircles{Circle{c.cx, c.cy, c.r}, Circle{c.cx2, c.cy2, c.r2}};
    else if (c.init == "halfplane") s = HalfPlane{c.x0};
    else throw ConfigError("init '" + c.init + "' is not a shape");
    double ly = c.dim == 1 ? 1.0 : c.ly;
    if (c.normalize_area) s = scale_to_area(s, 1.0 / nl.theta(), ly);
    return s;
}

inline void validate_config(const RunConfig& c) {
    make_law(c).validate();
    if (!(c.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    make_grid(c);
    make_scheme(c);
    if (!init_is_shape(c) && c.init != "noise" && c.init != "snapshot")
        throw ConfigError("unknown init '" + c.init + "'");
    if (c.init == "snapshot" && c.init_file.empty()) throw ConfigError("init = snapshot needs init_file");
    if (c.mcf_vertices < 8) throw ConfigError("mcf_vertices must be >= 8");
    if (!(c.mcf_dt_factor > 0.0)) throw ConfigError("mcf_dt_factor must be > 0");
    if (c.lambda_window < 1) throw ConfigError("lambda_window must be >= 1");
}

} // namespace pks
