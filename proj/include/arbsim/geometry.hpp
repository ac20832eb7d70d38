#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace arbsim {

inline constexpr double kPi = 3.14159265358979323846;

/// Wrap an angle to [-pi, pi).
inline double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

/// Rotate a vector by angle (counter-clockwise).
inline Vec2 rotate(const Vec2& v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// World point expressed in a body frame at `origin` with heading `theta`
/// (+x forward, +y left).
inline Vec2 to_body_frame(const Vec2& p, const Vec2& origin, double theta) {
    return rotate(p - origin, -theta);
}

/// Oriented rectangle: center, heading, full length (along heading) and width.
struct OrientedRect {
    Vec2 center;
    double heading = 0.0;
    double length = 0.0;
    double width = 0.0;
};

inline bool point_in_rect(const Vec2& p, const OrientedRect& r) {
    const Vec2 local = to_body_frame(p, r.center, r.heading);
    return std::abs(local.x) <= 0.5 * r.length && std::abs(local.y) <= 0.5 * r.width;
}

namespace detail {
inline void rect_corners(const OrientedRect& r, Vec2 out[4]) {
    const double hl = 0.5 * r.length;
    const double hw = 0.5 * r.width;
    const Vec2 local[4] = {{hl, hw}, {hl, -hw}, {-hl, -hw}, {-hl, hw}};
    for (int i = 0; i < 4; ++i) out[i] = r.center + rotate(local[i], r.heading);
}

// Projection overlap test of b's corners against a's edge axes.
inline bool separated_on_axes(const OrientedRect& a, const OrientedRect& b) {
    const Vec2 axes[2] = {rotate({1.0, 0.0}, a.heading), rotate({0.0, 1.0}, a.heading)};
    const double half[2] = {0.5 * a.length, 0.5 * a.width};
    Vec2 corners[4];
    rect_corners(b, corners);
    for (int i = 0; i < 2; ++i) {
        double lo = 1e300, hi = -1e300;
        for (const Vec2& c : corners) {
            const double t = (c - a.center).dot(axes[i]);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        if (lo > half[i] || hi < -half[i]) return true;
    }
    return false;
}
}  // namespace detail

/// Separating-axis overlap test; touching rectangles count as overlapping.
inline bool rects_overlap(const OrientedRect& a, const OrientedRect& b) {
    return !detail::separated_on_axes(a, b) && !detail::separated_on_axes(b, a);
}

/// Even-odd point-in-polygon test.
inline bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

/// Polyline with arc-length lookup. Waypoints are connected by straight segments.
class Polyline {
public:
    Polyline() = default;
    explicit Polyline(std::vector<Vec2> pts) : pts_(std::move(pts)) {
        cum_.resize(pts_.size(), 0.0);
        for (std::size_t i = 1; i < pts_.size(); ++i)
            cum_[i] = cum_[i - 1] + (pts_[i] - pts_[i - 1]).norm();
    }

    const std::vector<Vec2>& points() const { return pts_; }
    double length() const { return cum_.empty() ? 0.0 : cum_.back(); }
    bool empty() const { return pts_.size() < 2; }

    /// Position at arc length s, clamped to the ends.
    Vec2 at(double s) const {
        if (pts_.empty()) return {};
        if (pts_.size() == 1 || s <= 0.0) return pts_.front();
        if (s >= length()) return pts_.back();
        const std::size_t i = segment_index(s);
        const double seg_len = cum_[i + 1] - cum_[i];
        const double t = seg_len > 0.0 ? (s - cum_[i]) / seg_len : 0.0;
        return pts_[i] + (pts_[i + 1] - pts_[i]) * t;
    }

    /// Tangent heading at arc length s.
    double heading_at(double s) const {
        if (pts_.size() < 2) return 0.0;
        const std::size_t i = segment_index(std::min(std::max(s, 0.0), length()));
        const Vec2 d = pts_[i + 1] - pts_[i];
        return std::atan2(d.y, d.x);
    }

    /// Arc length of the closest point on the polyline to p.
    double project(const Vec2& p) const {
        double best_d2 = 1e300;
        double best_s = 0.0;
        for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
            const Vec2 a = pts_[i];
            const Vec2 d = pts_[i + 1] - a;
            const double len2 = d.dot(d);
            double t = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
            t = std::min(std::max(t, 0.0), 1.0);
            const Vec2 q = a + d * t;
            const double d2 = (q - p).dot(q - p);
            if (d2 < best_d2) {
                best_d2 = d2;
                best_s = cum_[i] + std::sqrt(len2) * t;
            }
        }
        return best_s;
    }

    /// Distance from p to the polyline.
    double distance(const Vec2& p) const { return (at(project(p)) - p).norm(); }

private:
    std::size_t segment_index(double s) const {
        std::size_t lo = 0, hi = cum_.size() - 1;
        while (lo + 1 < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cum_[mid] <= s)
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }

    std::vector<Vec2> pts_;
    std::vector<double> cum_;
};

}  // namespace arbsim
