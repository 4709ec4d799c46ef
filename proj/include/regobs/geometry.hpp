#pragma once

#include <cmath>
#include <stdexcept>

namespace regobs {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Axis-aligned open rectangle ]x_min,x_max[ x ]y_min,y_max[.
struct Rectangle {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;

    Rectangle() = default;
    Rectangle(double x0, double x1, double y0, double y1)
        : x_min(x0), x_max(x1), y_min(y0), y_max(y1) {
        if (!(std::isfinite(x_min) && std::isfinite(x_max) &&
              std::isfinite(y_min) && std::isfinite(y_max)))
            throw std::invalid_argument("Rectangle: bounds must be finite");
        if (!(x_min < x_max) || !(y_min < y_max))
            throw std::invalid_argument("Rectangle: requires x_min < x_max and y_min < y_max");
    }

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }

    bool contains(const Point& p, double tol = 0.0) const {
        return p.x > x_min - tol && p.x < x_max + tol &&
               p.y > y_min - tol && p.y < y_max + tol;
    }
    bool strictly_contains(const Point& p) const {
        return p.x > x_min && p.x < x_max && p.y > y_min && p.y < y_max;
    }
    bool contains(const Rectangle& r, double tol = 0.0) const {
        return r.x_min >= x_min - tol && r.x_max <= x_max + tol &&
               r.y_min >= y_min - tol && r.y_max <= y_max + tol;
    }
    bool on_boundary(const Point& p, double tol = 1e-12) const {
        const bool in_x = p.x >= x_min - tol && p.x <= x_max + tol;
        const bool in_y = p.y >= y_min - tol && p.y <= y_max + tol;
        const bool edge_x = std::abs(p.x - x_min) <= tol || std::abs(p.x - x_max) <= tol;
        const bool edge_y = std::abs(p.y - y_min) <= tol || std::abs(p.y - y_max) <= tol;
        return in_x && in_y && (edge_x || edge_y);
    }
};

inline bool operator==(const Rectangle& a, const Rectangle& b) {
    return a.x_min == b.x_min && a.x_max == b.x_max &&
           a.y_min == b.y_min && a.y_max == b.y_max;
}

} // namespace regobs
