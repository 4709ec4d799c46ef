#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "regobs/errors.hpp"
#include "regobs/geometry.hpp"

namespace regobs::quad {

// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975362, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498,  0.1834346424956498,  0.5255324099163290,
     0.7966664774136267,  0.9602898564975362};

inline constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

inline constexpr double kPanelTol = 1e-10;
inline constexpr std::size_t kMaxPanels = 1024;

// Composite 8-node rule with a fixed panel count.
template <typename F>
double composite_1d(F&& f, double lo, double hi, std::size_t panels) {
    const double h = (hi - lo) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = lo + h * static_cast<double>(p);
        const double mid = a + 0.5 * h;
        double acc = 0.0;
        for (std::size_t k = 0; k < 8; ++k)
            acc += kGaussWeights[k] * f(mid + 0.5 * h * kGaussNodes[k]);
        total += 0.5 * h * acc;
    }
    return total;
}

template <typename F>
double composite_2d(F&& f, const Rectangle& r, std::size_t panels_x, std::size_t panels_y) {
    auto outer = [&](double y) {
        return composite_1d([&](double x) { return f(x, y); }, r.x_min, r.x_max, panels_x);
    };
    return composite_1d(outer, r.y_min, r.y_max, panels_y);
}

// Panel counts are doubled until two successive results agree to kPanelTol
// relative (floored at 1 absolute), starting from `start` panels.
template <typename F>
double adaptive_1d(F&& f, double lo, double hi, std::size_t start = 1,
                   const std::string& what = "line integral") {
    std::size_t panels = start == 0 ? 1 : start;
    double prev = composite_1d(f, lo, hi, panels);
    while (panels < kMaxPanels) {
        panels *= 2;
        const double cur = composite_1d(f, lo, hi, panels);
        if (std::abs(cur - prev) <= kPanelTol * std::max(1.0, std::abs(cur)))
            return cur;
        prev = cur;
    }
    throw QuadratureNonConvergence(what + ": no convergence at " +
                                   std::to_string(kMaxPanels) + " panels");
}

template <typename F>
double adaptive_2d(F&& f, const Rectangle& r, std::size_t start_x = 1, std::size_t start_y = 1,
                   const std::string& what = "area integral") {
    std::size_t px = start_x == 0 ? 1 : start_x;
    std::size_t py = start_y == 0 ? 1 : start_y;
    double prev = composite_2d(f, r, px, py);
    while (px < kMaxPanels && py < kMaxPanels) {
        px *= 2;
        py *= 2;
        const double cur = composite_2d(f, r, px, py);
        if (std::abs(cur - prev) <= kPanelTol * std::max(1.0, std::abs(cur)))
            return cur;
        prev = cur;
    }
    throw QuadratureNonConvergence(what + ": no convergence at " +
                                   std::to_string(kMaxPanels) + " panels per axis");
}

// Nodes and weights of the composite rule over an interval, for callers that
// evaluate many integrands on one fixed grid.
struct LineRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

LineRule line_rule(double lo, double hi, std::size_t panels);

} // namespace regobs::quad
