#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace pks {

// Closed counterclockwise polygons; the outward normal is to the right of travel.
struct Curve {
    std::vector<std::vector<Vec2>> components;

    std::size_t vertex_count() const {
        std::size_t n = 0;
        for (const auto& c : components) n += c.size();
        return n;
    }
};

inline std::vector<Vec2> circle_polygon(double cx, double cy, double r, int n) {
    std::vector<Vec2> p(n);
    for (int k = 0; k < n; ++k) {
        double a = 2.0 * std::numbers::pi * k / n;
        p[k] = {cx + r * std::cos(a), cy + r * std::sin(a)};
    }
    return p;
}

inline std::vector<Vec2> resample_equal_arclength(const std::vector<Vec2>& p, std::size_t n) {
    const std::size_t m = p.size();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t k = 0; k < m; ++k) cum[k + 1] = cum[k] + norm(p[(k + 1) % m] - p[k]);
    const double total = cum[m];
    std::vector<Vec2> out(n);
    out[0] = p[0];
    std::size_t seg = 0;
    for (std::size_t k = 1; k < n; ++k) {
        double s = total * static_cast<double>(k) / static_cast<double>(n);
        while (seg + 1 < m && cum[seg + 1] < s) ++seg;
        double len = cum[seg + 1] - cum[seg];
        double t = len > 0.0 ? (s - cum[seg]) / len : 0.0;
        out[k] = p[seg] + (p[(seg + 1) % m] - p[seg]) * t;
    }
    return out;
}

// Dense parameter-angle sampling redistributed to equal arclength.
inline std::vector<Vec2> ellipse_polygon(double cx, double cy, double rx, double ry, int n) {
    std::vector<Vec2> p(8 * n);
    for (int k = 0; k < 8 * n; ++k) {
        double a = 2.0 * std::numbers::pi * k / (8 * n);
        p[k] = {cx + rx * std::cos(a), cy + ry * std::sin(a)};
    }
    return resample_equal_arclength(p, n);
}

// ds_i = |p_{i+1} - p_{i-1}| / 2, the vertex share of arclength.
inline std::vector<double> dual_lengths(const std::vector<Vec2>& p) {
    const std::size_t n = p.size();
    std::vector<double> ds(n);
    for (std::size_t i = 0; i < n; ++i) ds[i] = 0.5 * norm(p[(i + 1) % n] - p[(i + n - 1) % n]);
    return ds;
}

// Three-point curvature: turning angle at the vertex over its dual length.
// Summing kappa * ds gives the total turning, 2 pi for a simple loop.
inline std::vector<std::vector<double>> curvature(const Curve& c) {
    std::vector<std::vector<double>> out;
    for (const auto& p : c.components) {
        const std::size_t n = p.size();
        if (n < 8) throw DomainError("curvature needs at least 8 vertices per component");
        std::vector<double> k(n);
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 a = p[i] - p[(i + n - 1) % n], b = p[(i + 1) % n] - p[i];
            if (norm(a) == 0.0 || norm(b) == 0.0) throw DomainError("repeated curve vertex");
            double turn = std::atan2(cross(a, b), dot(a, b));
            k[i] = turn / (0.5 * norm(p[(i + 1) % n] - p[(i + n - 1) % n]));
        }
        out.push_back(std::move(k));
    }
    return out;
}

inline double curve_area(const Curve& c) {
    double a = 0.0;
    for (const auto& p : c.components) a += polygon_area(p);
    return a;
}

inline double curve_length(const Curve& c) {
    double l = 0.0;
    for (const auto& p : c.components) l += polyline_length(Polyline{p, true});
    return l;
}

inline double min_spacing(const Curve& c) {
    double h = std::numeric_limits<double>::infinity();
    for (const auto& p : c.components)
        for (std::size_t i = 0; i < p.size(); ++i) h = std::min(h, norm(p[(i + 1) % p.size()] - p[i]));
    return h;
}

// Lambda = (sum of int kappa ds) / (sum of ds), so that int V ds = 0 exactly.
inline double volume_multiplier(const Curve& c, const std::vector<std::vector<double>>& kappa) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < c.components.size(); ++j) {
        auto ds = dual_lengths(c.components[j]);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            num += kappa[j][i] * ds[i];
            den += ds[i];
        }
    }
    return num / den;
}

inline double volume_multiplier(const Curve& c) { return volume_multiplier(c, curvature(c)); }

inline std::vector<Vec2> vertex_normals(const std::vector<Vec2>& p) {
    const std::size_t n = p.size();
    std::vector<Vec2> nrm(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 t = p[(i + 1) % n] - p[(i + n - 1) % n];
        double l = norm(t);
        nrm[i] = {t.y / l, -t.x / l};
    }
    return nrm;
}

namespace detail {

inline int orient(Vec2 a, Vec2 b, Vec2 c) {
    double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

inline bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

} // namespace detail

// Sweep over segments sorted by their left end; neighbours sharing a vertex are skipped.
inline bool self_intersects(const Curve& c) {
    struct Seg {
        Vec2 a, b;
        double x0, x1;
        std::size_t comp, idx, n;
    };
    std::vector<Seg> segs;
    for (std::size_t j = 0; j < c.components.size(); ++j) {
        const auto& p = c.components[j];
        for (std::size_t i = 0; i < p.size(); ++i) {
            Vec2 a = p[i], b = p[(i + 1) % p.size()];
            segs.push_back({a, b, std::min(a.x, b.x), std::max(a.x, b.x), j, i, p.size()});
        }
    }
    std::sort(segs.begin(), segs.end(), [](const Seg& u, const Seg& v) { return u.x0 < v.x0; });
    for (std::size_t s = 0; s < segs.size(); ++s) {
        for (std::size_t t = s + 1; t < segs.size() && segs[t].x0 <= segs[s].x1; ++t) {
            const Seg &u = segs[s], &v = segs[t];
            if (u.comp == v.comp) {
                std::size_t d = (u.idx + u.n - v.idx) % u.n;
                if (d == 1 || d == u.n - 1) continue;
            }
            if (std::max(u.a.y, u.b.y) < std::min(v.a.y, v.b.y) || std::max(v.a.y, v.b.y) < std::min(u.a.y, u.b.y))
                continue;
            if (detail::segments_intersect(u.a, u.b, v.a, v.b)) return true;
        }
    }
    return false;
}

struct VpmcfOptions {
    bool resample = true;
    bool correct_area = true;
    bool check_topology = true;
};

// Uniform normal offset delta with A(delta) = target; A is quadratic in delta.
inline void restore_area(Curve& c, double target) {
    std::vector<std::vector<Vec2>> normals;
    for (const auto& p : c.components) normals.push_back(vertex_normals(p));
    auto offset_area = [&](double delta, double& slope) {
        double a = 0.0, s = 0.0;
        for (std::size_t j = 0; j < c.components.size(); ++j) {
            const auto& p = c.components[j];
            const auto& n = normals[j];
            const std::size_t m = p.size();
            for (std::size_t i = 0; i < m; ++i) {
                std::size_t k = (i + 1) % m;
                Vec2 pi = p[i] + n[i] * delta, pk = p[k] + n[k] * delta;
                a += cross(pi, pk);
                s += cross(n[i], pk) + cross(pi, n[k]);
            }
        }
        slope = 0.5 * s;
        return 0.5 * a;
    };
    double delta = 0.0;
    for (int it = 0; it < 3; ++it) {
        double slope = 0.0;
        double a = offset_area(delta, slope);
        if (std::abs(a - target) <= 1e-15 * std::abs(target)) break;
        delta -= (a - target) / slope;
    }
    for (std::size_t j = 0; j < c.components.size(); ++j)
        for (std::size_t i = 0; i < c.components[j].size(); ++i) c.components[j][i] = c.components[j][i] + normals[j][i] * delta;
}

// Explicit Euler step of V = -kappa + Lambda along the outward normal.
inline Curve step_vpmcf(const Curve& c, double dt, const VpmcfOptions& opt = {}) {
    if (!(dt > 0.0)) throw DomainError("vpmcf time step must be positive");
    const double area0 = curve_area(c);
    auto kappa = curvature(c);
    const double lambda = volume_multiplier(c, kappa);
    Curve out = c;
    for (std::size_t j = 0; j < c.components.size(); ++j) {
        auto nrm = vertex_normals(c.components[j]);
        for (std::size_t i = 0; i < nrm.size(); ++i)
            out.components[j][i] = c.components[j][i] + nrm[i] * ((-kappa[j][i] + lambda) * dt);
    }
    if (opt.resample)
        for (auto& p : out.components) p = resample_equal_arclength(p, p.size());
    if (opt.correct_area) restore_area(out, area0);
    if (opt.check_topology && self_intersects(out)) throw TopologyError("front self-intersection; oracle stopped");
    return out;
}

struct VpmcfRow {
    double t = 0.0, area = 0.0, length = 0.0, lambda = 0.0;
};

struct VpmcfTrajectory {
    std::vector<double> times; // times of stored curves
    std::vector<Curve> curves;
    std::vector<VpmcfRow> rows; // every step
    bool topology_stop = false;
};

struct VpmcfRunOptions {
    double dt_factor = 0.1; // used when dt <= 0: dt = dt_factor * (min spacing)^2 each step
    int record_every = 0;   // store a curve every n steps (0: first and last only)
    VpmcfOptions step{};
    // Return false to stop early.
    std::function<bool(const Curve&, double)> keep_going;
};

inline VpmcfRow vpmcf_row(const Curve& c, double t) {
    return {t, curve_area(c), curve_length(c), volume_multiplier(c)};
}

// Integrates to t_end, or until keep_going says stop. A topology error ends the
// run with topology_stop set and the last valid curve stored.
inline VpmcfTrajectory run_vpmcf(const Curve& initial, double dt, double t_end, const VpmcfRunOptions& opt = {}) {
    VpmcfTrajectory tr;
    Curve c = initial;
    double t = 0.0;
    tr.rows.push_back(vpmcf_row(c, t));
    tr.times.push_back(t);
    tr.curves.push_back(c);
    long n = 0;
    bool stored_last = true;
    while (t < t_end * (1.0 - 1e-14)) {
        if (opt.keep_going && !opt.keep_going(c, t)) break;
        double h = dt > 0.0 ? dt : opt.dt_factor * std::pow(min_spacing(c), 2);
        h = std::min(h, t_end - t);
        try {
            c = step_vpmcf(c, h, opt.step);
        } catch (const TopologyError&) {
            tr.topology_stop = true;
            break;
        }
        t = (t + h >= t_end * (1.0 - 1e-14)) ? t_end : t + h;
        ++n;
        tr.rows.push_back(vpmcf_row(c, t));
        stored_last = false;
        if (opt.record_every > 0 && n % opt.record_every == 0) {
            tr.times.push_back(t);
            tr.curves.push_back(c);
            stored_last = true;
        }
    }
    if (!stored_last) {
        tr.times.push_back(t);
        tr.curves.push_back(c);
    }
    return tr;
}

} // namespace pks
