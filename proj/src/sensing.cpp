#include "regobs/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "regobs/errors.hpp"
#include "regobs/quadrature.hpp"

namespace regobs::sensing {

using spectral::Mode;
using spectral::eigenfunction_value;

void TabulatedProfile::validate() const {
    if (rows == 0 || cols == 0 || values.size() != rows * cols)
        throw std::invalid_argument("TabulatedProfile: values must hold rows*cols entries");
    for (double v : values)
        if (!(v >= 0.0))
            throw std::invalid_argument("TabulatedProfile: values must be nonnegative");
}

namespace {

double tent(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

// Bilinear interpolation of a row-major table at fractional coordinates in [0,1].
double bilinear(const TabulatedProfile& tab, double u, double v) {
    u = std::clamp(u, 0.0, 1.0);
    v = std::clamp(v, 0.0, 1.0);
    const std::size_t nx = tab.cols;
    const std::size_t ny = tab.rows;
    if (nx == 1 && ny == 1) return tab.values[0];
    const double fx = u * static_cast<double>(nx - 1);
    const double fy = v * static_cast<double>(ny - 1);
    const std::size_t ix = std::min(nx >= 2 ? nx - 2 : std::size_t{0},
                                    static_cast<std::size_t>(fx));
    const std::size_t iy = std::min(ny >= 2 ? ny - 2 : std::size_t{0},
                                    static_cast<std::size_t>(fy));
    const double tx = nx == 1 ? 0.0 : fx - static_cast<double>(ix);
    const double ty = ny == 1 ? 0.0 : fy - static_cast<double>(iy);
    auto at = [&](std::size_t r, std::size_t c) { return tab.values[r * nx + c]; };
    const std::size_t ix1 = std::min(ix + 1, nx - 1);
    const std::size_t iy1 = std::min(iy + 1, ny - 1);
    return (1 - ty) * ((1 - tx) * at(iy, ix) + tx * at(iy, ix1)) +
           ty * ((1 - tx) * at(iy1, ix) + tx * at(iy1, ix1));
}

double segment_length(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

// Composite line quadrature of g(point, arclength fraction) over a segment.
template <typename G>
double segment_integral(G&& g, Point a, Point b, double u0, double u1,
                        std::size_t start_panels) {
    const double len = segment_length(a, b);
    if (len == 0.0) return 0.0;
    auto f = [&](double s) {
        const double t = s / len;
        const Point p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        return g(p, u0 + t * (u1 - u0));
    };
    return quad::adaptive_1d(f, 0.0, len, start_panels, "sensor line integral");
}

std::size_t profile_start_panels_1d(const Profile& profile) {
    if (const auto* tab = std::get_if<TabulatedProfile>(&profile)) {
        const std::size_t cells = std::max<std::size_t>(1, tab->cols - 1);
        return std::min(cells, quad::kMaxPanels / 2);
    }
    if (std::holds_alternative<TriangleProfile>(profile)) return 2;
    return 1;
}

} // namespace

double profile_value(const Profile& profile, const Rectangle& support, Point p) {
    if (std::holds_alternative<UniformProfile>(profile)) return 1.0;
    if (const auto* tri = std::get_if<TriangleProfile>(&profile)) {
        const double hx = std::max(tri->peak.x - support.x_min, support.x_max - tri->peak.x);
        const double hy = std::max(tri->peak.y - support.y_min, support.y_max - tri->peak.y);
        const double tx = hx > 0.0 ? (p.x - tri->peak.x) / hx : 0.0;
        const double ty = hy > 0.0 ? (p.y - tri->peak.y) / hy : 0.0;
        return tent(tx) * tent(ty);
    }
    const auto& tab = std::get<TabulatedProfile>(profile);
    return bilinear(tab, (p.x - support.x_min) / support.width(),
                    (p.y - support.y_min) / support.height());
}

double profile_value_1d(const Profile& profile, double u) {
    if (std::holds_alternative<UniformProfile>(profile)) return 1.0;
    if (const auto* tri = std::get_if<TriangleProfile>(&profile)) {
        const double c = std::clamp(tri->peak.x, 0.0, 1.0);
        const double h = std::max(c, 1.0 - c);
        return h > 0.0 ? tent((u - c) / h) : 1.0;
    }
    const auto& tab = std::get<TabulatedProfile>(profile);
    return bilinear(tab, u, 0.0);
}

std::string sensor_kind_name(const SensorSpec& sensor) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, InteriorPointSensor>) return "point";
            else if constexpr (std::is_same_v<T, InteriorZoneSensor>) return "zone";
            else if constexpr (std::is_same_v<T, BoundaryZoneSensor>) return "boundary_zone";
            else if constexpr (std::is_same_v<T, BoundaryPointSensor>) return "boundary_point";
            else return "filament";
        },
        sensor);
}

void validate_sensor(const SensorSpec& sensor, const Rectangle& domain) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, InteriorPointSensor>) {
                if (!domain.strictly_contains(s.location))
                    throw std::invalid_argument("point sensor must lie strictly inside the domain");
            } else if constexpr (std::is_same_v<T, InteriorZoneSensor>) {
                if (!domain.contains(s.support))
                    throw std::invalid_argument("zone sensor support must lie inside the domain");
                if (const auto* tri = std::get_if<TriangleProfile>(&s.profile)) {
                    if (!s.support.contains(tri->peak, 1e-12))
                        throw std::invalid_argument("triangle profile peak must lie in the support");
                }
                if (const auto* tab = std::get_if<TabulatedProfile>(&s.profile)) tab->validate();
            } else if constexpr (std::is_same_v<T, BoundaryZoneSensor>) {
                if (!(s.start.x == s.end.x || s.start.y == s.end.y))
                    throw std::invalid_argument("boundary zone segment must be axis-aligned");
                if (!domain.on_boundary(s.start) || !domain.on_boundary(s.end))
                    throw std::invalid_argument("boundary zone segment must lie on the domain boundary");
                if (const auto* tab = std::get_if<TabulatedProfile>(&s.profile)) tab->validate();
            } else if constexpr (std::is_same_v<T, BoundaryPointSensor>) {
                if (!domain.on_boundary(s.location))
                    throw std::invalid_argument("boundary point sensor must lie on the domain boundary");
            } else {
                if (s.polyline.size() < 2)
                    throw std::invalid_argument("filament needs at least 2 vertices");
                for (const Point& p : s.polyline)
                    if (!domain.contains(p, 1e-12))
                        throw std::invalid_argument("filament must lie in the closure of the domain");
                if (const auto* tab = std::get_if<TabulatedProfile>(&s.weight)) tab->validate();
            }
        },
        sensor);
}

double sensor_coefficient(const SensorSpec& sensor, Mode mode, const Rectangle& basis_domain) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, InteriorPointSensor>) {
                return eigenfunction_value(basis_domain, mode, s.location);
            } else if constexpr (std::is_same_v<T, BoundaryPointSensor>) {
                return eigenfunction_value(basis_domain, mode, s.location);
            } else if constexpr (std::is_same_v<T, InteriorZoneSensor>) {
                std::size_t sx = 1, sy = 1;
                if (const auto* tab = std::get_if<TabulatedProfile>(&s.profile)) {
                    tab->validate();
                    sx = std::max<std::size_t>(1, tab->cols - 1);
                    sy = std::max<std::size_t>(1, tab->rows - 1);
                } else if (std::holds_alternative<TriangleProfile>(s.profile)) {
                    sx = sy = 2;
                }
                auto f = [&](double x, double y) {
                    const Point p{x, y};
                    return eigenfunction_value(basis_domain, mode, p) *
                           profile_value(s.profile, s.support, p);
                };
                return quad::adaptive_2d(f, s.support, sx, sy, "zone sensor integral");
            } else if constexpr (std::is_same_v<T, BoundaryZoneSensor>) {
                auto g = [&](Point p, double u) {
                    return eigenfunction_value(basis_domain, mode, p) *
                           profile_value_1d(s.profile, u);
                };
                return segment_integral(g, s.start, s.end, 0.0, 1.0,
                                        profile_start_panels_1d(s.profile));
            } else {
                double total_len = 0.0;
                for (std::size_t k = 0; k + 1 < s.polyline.size(); ++k)
                    total_len += segment_length(s.polyline[k], s.polyline[k + 1]);
                if (total_len == 0.0) return 0.0;
                double acc = 0.0;
                double offset = 0.0;
                const std::size_t start = profile_start_panels_1d(s.weight);
                for (std::size_t k = 0; k + 1 < s.polyline.size(); ++k) {
                    const double len = segment_length(s.polyline[k], s.polyline[k + 1]);
                    if (len == 0.0) continue;
                    auto g = [&](Point p, double u) {
                        return eigenfunction_value(basis_domain, mode, p) *
                               profile_value_1d(s.weight, u);
                    };
                    acc += segment_integral(g, s.polyline[k], s.polyline[k + 1],
                                            offset / total_len, (offset + len) / total_len, start);
                    offset += len;
                }
                return acc;
            }
        },
        sensor);
}

OutputOperator build_output_matrix(std::span<const SensorSpec> sensors,
                                   const spectral::ModeSet& modes) {
    if (sensors.empty())
        throw EmptySensorSet("build_output_matrix: sensor list is empty");
    OutputOperator op;
    op.basis_domain = modes.domain();
    op.sensors.assign(sensors.begin(), sensors.end());
    op.coefficients.resize(static_cast<Eigen::Index>(sensors.size()),
                           static_cast<Eigen::Index>(modes.size()));
    for (std::size_t si = 0; si < sensors.size(); ++si) {
        for (std::size_t mi = 0; mi < modes.size(); ++mi) {
            try {
                op.coefficients(static_cast<Eigen::Index>(si), static_cast<Eigen::Index>(mi)) =
                    sensor_coefficient(sensors[si], modes.mode(mi), modes.domain());
            } catch (const QuadratureNonConvergence& e) {
                throw QuadratureNonConvergence("sensor " + std::to_string(si) + ": " + e.what());
            }
        }
    }
    return op;
}

Eigen::VectorXd evaluate_output(const OutputOperator& op, const Eigen::VectorXd& modal_coeffs) {
    if (modal_coeffs.size() != op.coefficients.cols())
        throw DimensionMismatch("evaluate_output: expected " +
                                std::to_string(op.coefficients.cols()) + " coefficients, got " +
                                std::to_string(modal_coeffs.size()));
    return op.coefficients * modal_coeffs;
}

} // namespace regobs::sensing
