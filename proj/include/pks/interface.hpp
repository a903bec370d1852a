#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <unordered_map>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "nonlinearity.hpp"
#include "quadrature.hpp"

namespace pks {

// Monotone transition q(s) from the lower well 0 to the upper well theta/sigma.
struct Profile1D {
    std::vector<double> s_values;
    std::vector<double> q_values;
    std::vector<double> slopes; // dq/ds at the nodes
    double q_low = 0.0, q_high = 0.0;

    // Cubic Hermite interpolation, extended by the wells.
    double operator()(double s) const {
        if (s <= s_values.front()) return q_low;
        if (s >= s_values.back()) return q_high;
        auto it = std::upper_bound(s_values.begin(), s_values.end(), s);
        std::size_t k = static_cast<std::size_t>(it - s_values.begin()) - 1;
        double h = s_values[k + 1] - s_values[k];
        double t = (s - s_values[k]) / h;
        double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * q_values[k] + (t3 - 2 * t2 + t) * h * slopes[k] +
               (-2 * t3 + 3 * t2) * q_values[k + 1] + (t3 - t2) * h * slopes[k + 1];
    }
};

// Inverse quadrature s(q) = eps int dq / sqrt(2 W_sigma(sigma q)) on a tanh-graded
// q grid over [delta, theta/sigma - delta], centered so q(0) = theta/(2 sigma).
inline Profile1D optimal_profile(const Nonlinearity& nl, double eps, int nodes = 8001) {
    if (!(eps > 0.0)) throw DomainError("profile needs eps > 0");
    if (nodes % 2 == 0) ++nodes;
    const double Q = nl.phi_well(), sig = nl.sigma();
    const double xmax = std::atanh(1.0 - 2e-8);
    auto q_of = [&](double xi) { return 0.5 * Q * (1.0 + std::tanh(xi)); };
    auto slope_of = [&](double q) { return std::sqrt(2.0 * nl.W_sigma(sig * q)) / eps; };
    auto ds_dxi = [&](double xi) {
        double c = std::cosh(xi);
        return (0.5 * Q / (c * c)) / slope_of(q_of(xi));
    };
    Profile1D p;
    p.q_low = 0.0;
    p.q_high = Q;
    p.s_values.resize(nodes);
    p.q_values.resize(nodes);
    p.slopes.resize(nodes);
    const int mid = nodes / 2;
    const double dxi = xmax / mid;
    p.s_values[mid] = 0.0;
    for (int k = mid; k + 1 < nodes; ++k)
        p.s_values[k + 1] = p.s_values[k] + quad::integrate_panel(ds_dxi, (k - mid) * dxi, (k + 1 - mid) * dxi);
    for (int k = mid; k > 0; --k)
        p.s_values[k - 1] = p.s_values[k] - quad::integrate_panel(ds_dxi, (k - 1 - mid) * dxi, (k - mid) * dxi);
    for (int k = 0; k < nodes; ++k) {
        p.q_values[k] = q_of((k - mid) * dxi);
        p.slopes[k] = slope_of(p.q_values[k]);
    }
    return p;
}

struct Circle {
    double cx = 1.0, cy = 1.0, r = 0.5;
};
struct Ellipse {
    double cx = 1.0, cy = 1.0, rx = 0.6, ry = 0.4;
};
struct TwoCircles {
    Circle a, b;
};
// The region x < x0 (1D or 2D).
struct HalfPlane {
    double x0 = 0.5;
};

using Shape = std::variant<Circle, Ellipse, TwoCircles, HalfPlane>;

namespace detail {

// Distance from (y0, y1), y0, y1 >= 0, to the ellipse with semi axes e0 >= e1.
inline double ellipse_distance_quadrant(double e0, double e1, double y0, double y1) {
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            auto F = [&](double t) {
                double a = e0 * y0 / (t + e0 * e0), b = e1 * y1 / (t + e1 * e1);
                return a * a + b * b - 1.0;
            };
            double lo = -e1 * e1 + e1 * y1;
            double hi = -e1 * e1 + std::sqrt(e0 * e0 * y0 * y0 + e1 * e1 * y1 * y1);
            double t = 0.5 * (lo + hi);
            for (int it = 0; it < 200; ++it) {
                double f = F(t);
                if (f > 0.0) lo = t; else hi = t;
                double a = e0 * y0, b = e1 * y1, A = t + e0 * e0, B = t + e1 * e1;
                double df = -2.0 * (a * a / (A * A * A) + b * b / (B * B * B));
                double next = t - f / df;
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                bool done = std::abs(next - t) <= 1e-12 * (std::abs(t) + e0 * e0) * 1e-3;
                t = next;
                if (done || hi - lo <= 1e-16 * (std::abs(t) + e0 * e0)) break;
            }
            double x0 = e0 * e0 * y0 / (t + e0 * e0), x1 = e1 * e1 * y1 / (t + e1 * e1);
            return std::hypot(x0 - y0, x1 - y1);
        }
        return std::abs(y1 - e1);
    }
    double lim = (e0 * e0 - e1 * e1) / e0;
    if (y0 < lim) {
        double x0 = e0 * e0 * y0 / (e0 * e0 - e1 * e1);
        double x1 = e1 * std::sqrt(std::max(0.0, 1.0 - (x0 / e0) * (x0 / e0)));
        return std::hypot(x0 - y0, x1);
    }
    return std::abs(y0 - e0);
}

} // namespace detail

// Positive inside the shape.
inline double signed_distance(const Shape& shape, double x, double y) {
    struct Visitor {
        double x, y;
        double operator()(const Circle& c) const { return c.r - std::hypot(x - c.cx, y - c.cy); }
        double operator()(const Ellipse& e) const {
            double px = std::abs(x - e.cx), py = std::abs(y - e.cy);
            double d = e.rx >= e.ry ? detail::ellipse_distance_quadrant(e.rx, e.ry, px, py)
                                    : detail::ellipse_distance_quadrant(e.ry, e.rx, py, px);
            double lvl = (px / e.rx) * (px / e.rx) + (py / e.ry) * (py / e.ry);
            return lvl < 1.0 ? d : -d;
        }
        double operator()(const TwoCircles& t) const { return std::max((*this)(t.a), (*this)(t.b)); }
        double operator()(const HalfPlane& h) const { return h.x0 - x; }
    };
    return std::visit(Visitor{x, y}, shape);
}

// Enclosed area; the half plane is measured inside a strip of height ly.
inline double shape_area(const Shape& shape, double ly = 1.0) {
    struct Visitor {
        double ly;
        double operator()(const Circle& c) const { return std::numbers::pi * c.r * c.r; }
        double operator()(const Ellipse& e) const { return std::numbers::pi * e.rx * e.ry; }
        double operator()(const TwoCircles& t) const { return (*this)(t.a) + (*this)(t.b); }
        double operator()(const HalfPlane& h) const { return h.x0 * ly; }
    };
    return std::visit(Visitor{ly}, shape);
}

// Interface length; one interface point for the half plane in 1D.
inline double shape_perimeter(const Shape& shape, double ly = 1.0) {
    struct Visitor {
        double ly;
        double operator()(const Circle& c) const { return 2.0 * std::numbers::pi * c.r; }
        double operator()(const Ellipse& e) const {
            // Ramanujan's second approximation
            double h = (e.rx - e.ry) * (e.rx - e.ry) / ((e.rx + e.ry) * (e.rx + e.ry));
            return std::numbers::pi * (e.rx + e.ry) * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
        }
        double operator()(const TwoCircles& t) const { return (*this)(t.a) + (*this)(t.b); }
        double operator()(const HalfPlane&) const { return ly; }
    };
    return std::visit(Visitor{ly}, shape);
}

// Rescales radii about the centers (or moves the half-plane edge) to the given area.
inline Shape scale_to_area(const Shape& shape, double area, double ly = 1.0) {
    struct Visitor {
        double area, ly, k;
        Shape operator()(Circle c) const { c.r *= k; return c; }
        Shape operator()(Ellipse e) const { e.rx *= k; e.ry *= k; return e; }
        Shape operator()(TwoCircles t) const { t.a.r *= k; t.b.r *= k; return t; }
        Shape operator()(HalfPlane h) const { h.x0 = area / ly; return h; }
    };
    double k = std::sqrt(area / shape_area(shape, ly));
    return std::visit(Visitor{area, ly, k}, shape);
}

inline void check_shape_fits(const Shape& shape, const Grid& g, double margin) {
    struct Box {
        double x0, x1, y0, y1;
    };
    struct Visitor {
        Box operator()(const Circle& c) const { return {c.cx - c.r, c.cx + c.r, c.cy - c.r, c.cy + c.r}; }
        Box operator()(const Ellipse& e) const { return {e.cx - e.rx, e.cx + e.rx, e.cy - e.ry, e.cy + e.ry}; }
        Box operator()(const TwoCircles& t) const {
            Box a = (*this)(t.a), b = (*this)(t.b);
            return {std::min(a.x0, b.x0), std::max(a.x1, b.x1), std::min(a.y0, b.y0), std::max(a.y1, b.y1)};
        }
        Box operator()(const HalfPlane& h) const { return {h.x0, h.x0, 0.0, 0.0}; }
    };
    if (g.dim == 1 && !std::holds_alternative<HalfPlane>(shape))
        throw ConfigError("only the half-plane shape is available in 1D");
    Box b = std::visit(Visitor{}, shape);
    bool ok = b.x0 >= margin && b.x1 <= g.lx - margin;
    if (!std::holds_alternative<HalfPlane>(shape)) ok = ok && b.y0 >= margin && b.y1 <= g.ly - margin;
    if (const auto* t = std::get_if<TwoCircles>(&shape)) {
        double gap = std::hypot(t->a.cx - t->b.cx, t->a.cy - t->b.cy) - t->a.r - t->b.r;
        if (gap < 2.0 * margin) throw ConfigError("two-circle shape: circles closer than 8 eps");
    }
    if (!ok) throw ConfigError("shape does not fit in the domain with a 4 eps margin");
}

// phi = q(d(x)), d the signed distance to the shape boundary.
inline ScalarField well_prepared_field(const Shape& shape, const Grid& g, const Nonlinearity& nl, double eps) {
    check_shape_fits(shape, g, 4.0 * eps);
    Profile1D prof = optimal_profile(nl, eps);
    return ScalarField::sample(g, [&](double x, double y) { return prof(signed_distance(shape, x, y)); });
}

// sigma (phi - W_sigma'(sigma phi)) = f*'(phi - a); Gamma-limit diagnostics only.
inline ScalarField recovery_density(const Nonlinearity& nl, const ScalarField& phi) {
    ScalarField out(phi.grid);
    for (std::size_t k = 0; k < phi.size(); ++k) out[k] = nl.f_star_prime(phi[k] - nl.a());
    return out;
}

namespace detail {

struct ContourSegment {
    std::int64_t e0, e1; // edge ids, oriented e0 -> e1
    Vec2 p0, p1;
};

} // namespace detail

// Marching squares on the lattice of cell centers. Polylines keep the
// superlevel set {phi >= level} on their left.
inline std::vector<Polyline> extract_contour(const ScalarField& phi, double level) {
    const Grid& g = phi.grid;
    if (g.dim != 2) throw DomainError("contours need a 2D field");
    const int nx = g.nx, ny = g.ny;
    auto above = [&](int i, int j) { return phi.at(i, j) >= level; };
    auto hedge = [&](int i, int j) { return std::int64_t(2) * (std::int64_t(j) * nx + i); };
    auto vedge = [&](int i, int j) { return std::int64_t(2) * (std::int64_t(j) * nx + i) + 1; };
    auto cross_point = [&](int ia, int ja, int ib, int jb) {
        double va = phi.at(ia, ja), vb = phi.at(ib, jb);
        double t = std::clamp((level - va) / (vb - va), 0.0, 1.0);
        Vec2 a{g.x(ia), g.y(ja)}, b{g.x(ib), g.y(jb)};
        return a + (b - a) * t;
    };

    std::vector<detail::ContourSegment> segs;
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            // corners: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1); edges: 0 bottom, 1 right, 2 top, 3 left
            const int ci[4] = {i, i + 1, i + 1, i};
            const int cj[4] = {j, j, j + 1, j + 1};
            bool up[4];
            for (int c = 0; c < 4; ++c) up[c] = above(ci[c], cj[c]);
            const std::int64_t eid[4] = {hedge(i, j), vedge(i + 1, j), hedge(i, j + 1), vedge(i, j)};
            auto point = [&](int e) { return cross_point(ci[e], cj[e], ci[(e + 1) % 4], cj[(e + 1) % 4]); };
            std::vector<int> crossed;
            for (int e = 0; e < 4; ++e)
                if (up[e] != up[(e + 1) % 4]) crossed.push_back(e);
            if (crossed.empty()) continue;

            // Each segment is listed with a corner it cuts off.
            std::vector<std::array<int, 3>> pairs; // edge, edge, isolated corner
            if (crossed.size() == 2) {
                // The two crossed edges bound a run of corners of one class; corner
                // crossed[0]+1 lies in that run.
                pairs.push_back({crossed[0], crossed[1], (crossed[0] + 1) % 4});
            } else {
                double mean = 0.25 * (phi.at(i, j) + phi.at(i + 1, j) + phi.at(i + 1, j + 1) + phi.at(i, j + 1));
                bool center_up = mean >= level;
                // Cut off the corners whose class differs from the center. Corner c
                // sits between edges c-1 and c.
                for (int c = 0; c < 4; ++c)
                    if (up[c] != center_up) pairs.push_back({(c + 3) % 4, c, c});
            }
            for (auto [ea, eb, corner] : pairs) {
                Vec2 pa = point(ea), pb = point(eb);
                Vec2 pc{g.x(ci[corner]), g.y(cj[corner])};
                double side = cross(pb - pa, pc - pa);
                // superlevel on the left: an "up" corner must be left of pa->pb
                bool flip = up[corner] ? side < 0.0 : side > 0.0;
                if (side == 0.0) {
                    double s = 0.0;
                    for (int c = 0; c < 4; ++c)
                        s += (up[c] ? 1.0 : -1.0) * cross(pb - pa, Vec2{g.x(ci[c]), g.y(cj[c])} - pa);
                    flip = s < 0.0;
                }
                if (flip) segs.push_back({eid[eb], eid[ea], pb, pa});
                else segs.push_back({eid[ea], eid[eb], pa, pb});
            }
        }
    }

    std::unordered_map<std::int64_t, std::size_t> by_start;
    std::unordered_map<std::int64_t, std::size_t> by_end;
    for (std::size_t k = 0; k < segs.size(); ++k) {
        by_start[segs[k].e0] = k;
        by_end[segs[k].e1] = k;
    }
    std::vector<char> used(segs.size(), 0);
    std::vector<Polyline> out;
    auto push_distinct = [](std::vector<Vec2>& pts, Vec2 p) {
        if (pts.empty() || !(pts.back() == p)) pts.push_back(p);
    };
    auto trace = [&](std::size_t start) {
        Polyline line;
        std::size_t k = start;
        push_distinct(line.points, segs[k].p0);
        while (true) {
            used[k] = 1;
            push_distinct(line.points, segs[k].p1);
            auto it = by_start.find(segs[k].e1);
            if (it == by_start.end()) break;
            if (it->second == start) {
                line.closed = true;
                break;
            }
            if (used[it->second]) break;
            k = it->second;
        }
        if (line.closed && line.points.size() > 1 && line.points.front() == line.points.back()) line.points.pop_back();
        if (line.closed && line.points.size() < 3) return;
        if (line.points.size() < 2) return;
        out.push_back(std::move(line));
    };
    // Open chains start at segments nobody feeds into.
    for (std::size_t k = 0; k < segs.size(); ++k)
        if (!used[k] && by_end.find(segs[k].e0) == by_end.end()) trace(k);
    for (std::size_t k = 0; k < segs.size(); ++k)
        if (!used[k]) trace(k);
    return out;
}

// Area enclosed by the closed contour loops (counterclockwise loops count positive).
inline double contour_area(const std::vector<Polyline>& lines) {
    double a = 0.0;
    for (const auto& l : lines)
        if (l.closed) a += polygon_area(l.points);
    return a;
}

} // namespace pks
