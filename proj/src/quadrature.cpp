#include "regobs/quadrature.hpp"

namespace regobs::quad {

LineRule line_rule(double lo, double hi, std::size_t panels) {
    LineRule rule;
    rule.nodes.reserve(panels * 8);
    rule.weights.reserve(panels * 8);
    const double h = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = lo + h * (static_cast<double>(p) + 0.5);
        for (std::size_t k = 0; k < 8; ++k) {
            rule.nodes.push_back(mid + 0.5 * h * kGaussNodes[k]);
            rule.weights.push_back(0.5 * h * kGaussWeights[k]);
        }
    }
    return rule;
}

} // namespace regobs::quad
