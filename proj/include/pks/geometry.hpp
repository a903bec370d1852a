#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace pks {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Polyline {
    std::vector<Vec2> points;
    bool closed = false;

    std::size_t segment_count() const {
        if (points.size() < 2) return 0;
        return closed ? points.size() : points.size() - 1;
    }
};

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 d = b - a;
    double len2 = dot(d, d);
    double t = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
    return norm(p - (a + d * t));
}

inline double point_polyline_distance(Vec2 p, const Polyline& l) {
    if (l.points.size() == 1) return norm(p - l.points[0]);
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = l.points.size();
    for (std::size_t k = 0; k < l.segment_count(); ++k)
        best = std::min(best, point_segment_distance(p, l.points[k], l.points[(k + 1) % n]));
    return best;
}

// Signed shoelace area; positive for counterclockwise loops.
inline double polygon_area(const std::vector<Vec2>& p) {
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) s += cross(p[k], p[(k + 1) % p.size()]);
    return 0.5 * s;
}

inline double polyline_length(const Polyline& l) {
    double s = 0.0;
    const std::size_t n = l.points.size();
    for (std::size_t k = 0; k < l.segment_count(); ++k) s += norm(l.points[(k + 1) % n] - l.points[k]);
    return s;
}

// Symmetric Hausdorff distance between two sets of polylines, measured from
// vertices of one set to segments of the other.
inline double hausdorff_distance(const std::vector<Polyline>& a, const std::vector<Polyline>& b) {
    auto has_points = [](const std::vector<Polyline>& s) {
        return std::any_of(s.begin(), s.end(), [](const Polyline& l) { return !l.points.empty(); });
    };
    if (!has_points(a) || !has_points(b)) throw DomainError("hausdorff distance of an empty polyline");
    auto one_way = [](const std::vector<Polyline>& from, const std::vector<Polyline>& to) {
        double worst = 0.0;
        for (const auto& l : from) {
            for (Vec2 p : l.points) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& m : to)
                    if (!m.points.empty()) best = std::min(best, point_polyline_distance(p, m));
                worst = std::max(worst, best);
            }
        }
        return worst;
    };
    return std::max(one_way(a, b), one_way(b, a));
}

inline double hausdorff_distance(const Polyline& a, const Polyline& b) {
    return hausdorff_distance(std::vector<Polyline>{a}, std::vector<Polyline>{b});
}

} // namespace pks
