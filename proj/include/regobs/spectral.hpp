#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "regobs/geometry.hpp"

namespace regobs::spectral {

// One Neumann cosine mode, indexed by its axis frequencies.
struct Mode {
    int x_order = 0;
    int y_order = 0;
};

inline bool operator==(Mode a, Mode b) {
    return a.x_order == b.x_order && a.y_order == b.y_order;
}

// lambda(i,j) = -(i^2/Lx^2 + j^2/Ly^2) * pi^2
double eigenvalue(const Rectangle& domain, Mode mode);

// 1/sqrt(L) for order 0, sqrt(2/L) otherwise: the per-axis factor that makes
// the cosine family orthonormal in L2 of an interval of length L.
double axis_normalization(int order, double length);

// L2(domain)-orthonormal product-cosine value. The cosine formula extends to
// points outside the domain; callers restrict where it matters.
double eigenfunction_value(const Rectangle& domain, Mode mode, Point p);

// Analytic gradient (d/dx, d/dy) of the same product.
std::array<double, 2> eigenfunction_gradient(const Rectangle& domain, Mode mode, Point p);

// Truncated eigenbasis: all modes (i, j) with 0 <= i <= order_x, 0 <= j <= order_y,
// sorted by descending (eigenvalue + shift), ties broken by (i, j) lexicographic.
// `shift` is the reaction coefficient of d/dt z = Laplacian z + shift*z; it does
// not change the eigenfunctions, only which modes count as slow.
class ModeSet {
public:
    ModeSet(const Rectangle& domain, int order_x, int order_y, double shift);

    const Rectangle& domain() const { return domain_; }
    double shift() const { return shift_; }
    int order_x() const { return order_x_; }
    int order_y() const { return order_y_; }
    std::size_t size() const { return modes_.size(); }
    Mode mode(std::size_t k) const { return modes_[k]; }
    double mode_eigenvalue(std::size_t k) const { return eigenvalues_[k]; }
    // lambda + shift: the actual modal growth rate of the shifted system.
    double growth_rate(std::size_t k) const { return eigenvalues_[k] + shift_; }
    const std::vector<Mode>& modes() const { return modes_; }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

private:
    Rectangle domain_;
    double shift_ = 0.0;
    int order_x_ = 0;
    int order_y_ = 0;
    std::vector<Mode> modes_;
    std::vector<double> eigenvalues_;
};

inline ModeSet build_mode_set(const Rectangle& domain, int order_x, int order_y,
                              double shift = 0.0) {
    return ModeSet(domain, order_x, order_y, shift);
}

// Modes sharing one eigenvalue, in mode-set order. `eigenvalue` is the first
// member's value; all members agree with it to the grouping tolerance.
struct EigenspaceGroup {
    double eigenvalue = 0.0;
    std::vector<std::size_t> member_indices;
    std::vector<Mode> members;

    std::size_t multiplicity() const { return members.size(); }
};

// Partition into eigenspaces: adjacent modes (the set is sorted by eigenvalue)
// are merged while |lambda_a - lambda_b| <= rel_tol * max(1, |lambda_a|).
// Groups come out ordered by descending eigenvalue.
std::vector<EigenspaceGroup> group_by_eigenvalue(const ModeSet& set, double rel_tol = 1e-9);

} // namespace regobs::spectral
