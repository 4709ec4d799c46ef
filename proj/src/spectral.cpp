#include "regobs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace regobs::spectral {

namespace {
constexpr double kPi = std::numbers::pi;
} // namespace

double axis_normalization(int order, double length) {
    return order == 0 ? 1.0 / std::sqrt(length) : std::sqrt(2.0 / length);
}

double eigenvalue(const Rectangle& domain, Mode mode) {
    const double lx = domain.width();
    const double ly = domain.height();
    const double ix = static_cast<double>(mode.x_order);
    const double jy = static_cast<double>(mode.y_order);
    return -(ix * ix / (lx * lx) + jy * jy / (ly * ly)) * kPi * kPi;
}

double eigenfunction_value(const Rectangle& domain, Mode mode, Point p) {
    const double lx = domain.width();
    const double ly = domain.height();
    const double cx = std::cos(static_cast<double>(mode.x_order) * kPi * (p.x - domain.x_min) / lx);
    const double cy = std::cos(static_cast<double>(mode.y_order) * kPi * (p.y - domain.y_min) / ly);
    return axis_normalization(mode.x_order, lx) * axis_normalization(mode.y_order, ly) * cx * cy;
}

std::array<double, 2> eigenfunction_gradient(const Rectangle& domain, Mode mode, Point p) {
    const double lx = domain.width();
    const double ly = domain.height();
    const double kx = static_cast<double>(mode.x_order) * kPi / lx;
    const double ky = static_cast<double>(mode.y_order) * kPi / ly;
    const double ax = kx * (p.x - domain.x_min);
    const double ay = ky * (p.y - domain.y_min);
    const double scale = axis_normalization(mode.x_order, lx) * axis_normalization(mode.y_order, ly);
    return {-scale * kx * std::sin(ax) * std::cos(ay),
            -scale * ky * std::cos(ax) * std::sin(ay)};
}

ModeSet::ModeSet(const Rectangle& domain, int order_x, int order_y, double shift)
    : domain_(domain), shift_(shift), order_x_(order_x), order_y_(order_y) {
    if (order_x < 0 || order_y < 0)
        throw std::invalid_argument("ModeSet: truncation orders must be >= 0");
    modes_.reserve(static_cast<std::size_t>((order_x + 1) * (order_y + 1)));
    for (int i = 0; i <= order_x; ++i)
        for (int j = 0; j <= order_y; ++j)
            modes_.push_back(Mode{i, j});

    std::vector<double> values(modes_.size());
    for (std::size_t k = 0; k < modes_.size(); ++k)
        values[k] = eigenvalue(domain_, modes_[k]);

    std::vector<std::size_t> order(modes_.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        if (modes_[a].x_order != modes_[b].x_order)
            return modes_[a].x_order < modes_[b].x_order;
        return modes_[a].y_order < modes_[b].y_order;
    });

    std::vector<Mode> sorted_modes(modes_.size());
    eigenvalues_.resize(modes_.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        sorted_modes[k] = modes_[order[k]];
        eigenvalues_[k] = values[order[k]];
    }
    modes_ = std::move(sorted_modes);
}

std::vector<EigenspaceGroup> group_by_eigenvalue(const ModeSet& set, double rel_tol) {
    if (rel_tol <= 0.0)
        throw std::invalid_argument("group_by_eigenvalue: rel_tol must be > 0");
    std::vector<EigenspaceGroup> groups;
    for (std::size_t k = 0; k < set.size(); ++k) {
        const double lam = set.mode_eigenvalue(k);
        bool start_new = groups.empty();
        if (!start_new) {
            const double prev = set.mode_eigenvalue(k - 1);
            start_new = std::abs(prev - lam) > rel_tol * std::max(1.0, std::abs(prev));
        }
        if (start_new) {
            groups.push_back(EigenspaceGroup{lam, {}, {}});
        }
        groups.back().member_indices.push_back(k);
        groups.back().members.push_back(set.mode(k));
    }
    return groups;
}

} // namespace regobs::spectral
