#include "regobs/strategic.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <variant>

#include "regobs/errors.hpp"

namespace regobs::strategic {

using sensing::SensorSpec;
using spectral::EigenspaceGroup;
using spectral::Mode;
using spectral::ModeSet;

std::string basis_name(AnalysisBasis basis) {
    return basis == AnalysisBasis::Global ? "global" : "regional";
}

std::size_t resolve_slow_groups(const SlowSpec& spec,
                                const std::vector<EigenspaceGroup>& groups, double shift) {
    if (spec.kind == SlowSpec::Kind::GroupCount) {
        if (spec.group_count > groups.size())
            throw std::invalid_argument("slow group count exceeds the number of eigenspaces");
        return spec.group_count;
    }
    std::size_t j = 0;
    while (j < groups.size() && groups[j].eigenvalue + shift > -spec.sigma_min) ++j;
    return j;
}

Eigen::MatrixXd build_group_matrix(const EigenspaceGroup& group,
                                   std::span<const SensorSpec> sensors,
                                   const Rectangle& basis_domain) {
    if (group.members.empty())
        throw std::invalid_argument("build_group_matrix: empty eigenspace group");
    if (sensors.empty())
        throw EmptySensorSet("build_group_matrix: sensor list is empty");
    Eigen::MatrixXd g(static_cast<Eigen::Index>(sensors.size()),
                      static_cast<Eigen::Index>(group.members.size()));
    for (std::size_t i = 0; i < sensors.size(); ++i)
        for (std::size_t j = 0; j < group.members.size(); ++j)
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                sensing::sensor_coefficient(sensors[i], group.members[j], basis_domain);
    return g;
}

StrategicReport check_strategic(std::span<const SensorSpec> sensors, const ModeSet& modes,
                                const SlowSpec& slow, double rank_tol) {
    if (sensors.empty())
        throw EmptySensorSet("check_strategic: sensor list is empty");
    if (!(rank_tol > 0.0 && rank_tol < 1.0))
        throw std::invalid_argument("check_strategic: rank_tol must lie in (0, 1)");

    const auto groups = spectral::group_by_eigenvalue(modes);
    const std::size_t j_count = resolve_slow_groups(slow, groups, modes.shift());

    StrategicReport report;
    report.sensor_count = sensors.size();
    report.slow_group_count = j_count;
    report.margin = kInfiniteMargin;
    report.strategic = true;

    for (std::size_t n = 0; n < j_count; ++n) {
        const EigenspaceGroup& group = groups[n];
        const Eigen::MatrixXd g = build_group_matrix(group, sensors, modes.domain());
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
        const auto& sv = svd.singularValues();
        const double largest = sv.size() > 0 ? sv(0) : 0.0;

        GroupDiagnostics diag;
        diag.eigenvalue = group.eigenvalue;
        diag.multiplicity = group.multiplicity();
        // Relative threshold with an absolute floor; coefficients live on the
        // O(1) scale of the orthonormal basis, so an all-tiny block is rank 0.
        for (Eigen::Index k = 0; k < sv.size(); ++k)
            if (sv(k) > rank_tol * std::max(1.0, largest)) ++diag.rank;
        diag.smallest_singular_value =
            sv.size() >= static_cast<Eigen::Index>(group.multiplicity())
                ? sv(static_cast<Eigen::Index>(group.multiplicity()) - 1)
                : 0.0;
        for (std::size_t m = 0; m < group.members.size(); ++m)
            if (g.col(static_cast<Eigen::Index>(m)).lpNorm<Eigen::Infinity>() <= rank_tol)
                diag.vanishing_members.push_back(group.members[m]);

        report.max_multiplicity = std::max(report.max_multiplicity, diag.multiplicity);
        report.margin = std::min(report.margin, diag.smallest_singular_value);
        if (diag.rank < diag.multiplicity) report.strategic = false;
        report.groups.push_back(std::move(diag));
    }
    if (report.sensor_count < report.max_multiplicity) report.strategic = false;
    return report;
}

double observability_margin(const Eigen::MatrixXd& output_matrix,
                            const Eigen::VectorXd& growth_rates, std::size_t slow_mode_count,
                            double horizon) {
    if (!(horizon > 0.0))
        throw NonPositiveHorizon("observability_margin: horizon must be > 0");
    if (output_matrix.cols() != growth_rates.size())
        throw DimensionMismatch("observability_margin: output matrix / rate size mismatch");
    if (slow_mode_count == 0) return kInfiniteMargin;
    if (slow_mode_count > static_cast<std::size_t>(growth_rates.size()))
        throw std::invalid_argument("observability_margin: slow count exceeds mode count");

    const auto ns = static_cast<Eigen::Index>(slow_mode_count);
    const Eigen::MatrixXd cs = output_matrix.leftCols(ns);
    const Eigen::MatrixXd gram0 = cs.transpose() * cs;
    Eigen::MatrixXd w(ns, ns);
    for (Eigen::Index m = 0; m < ns; ++m) {
        for (Eigen::Index n = 0; n < ns; ++n) {
            const double s = growth_rates(m) + growth_rates(n);
            // int_0^T e^{s tau} dtau, with the s -> 0 limit T
            const double weight = s == 0.0 ? horizon : std::expm1(s * horizon) / s;
            w(m, n) = gram0(m, n) * weight;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (w + w.transpose()));
    return eig.eigenvalues()(0);
}

double observability_margin(std::span<const SensorSpec> sensors, const ModeSet& modes,
                            std::size_t slow_mode_count, double horizon) {
    if (sensors.empty())
        throw EmptySensorSet("observability_margin: sensor list is empty");
    if (slow_mode_count == 0) {
        if (!(horizon > 0.0))
            throw NonPositiveHorizon("observability_margin: horizon must be > 0");
        return kInfiniteMargin;
    }
    Eigen::MatrixXd c(static_cast<Eigen::Index>(sensors.size()),
                      static_cast<Eigen::Index>(slow_mode_count));
    Eigen::VectorXd rates(static_cast<Eigen::Index>(slow_mode_count));
    for (std::size_t m = 0; m < slow_mode_count; ++m) {
        rates(static_cast<Eigen::Index>(m)) = modes.growth_rate(m);
        for (std::size_t i = 0; i < sensors.size(); ++i)
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) =
                sensing::sensor_coefficient(sensors[i], modes.mode(m), modes.domain());
    }
    return observability_margin(c, rates, slow_mode_count, horizon);
}

namespace {

constexpr double kLatticeTol = 1e-12;

// True when t sits on the half-odd-integer lattice Z + 1/2.
bool on_half_lattice(double t) {
    const double frac = t - std::floor(t);
    return std::abs(frac - 0.5) <= kLatticeTol;
}

void check_profile_symmetry(const sensing::Profile& profile, const Rectangle&, Point) {
    if (const auto* tab = std::get_if<sensing::TabulatedProfile>(&profile)) {
        tab->validate();
        for (std::size_t r = 0; r < tab->rows; ++r)
            for (std::size_t c = 0; c < tab->cols; ++c) {
                const double a = tab->values[r * tab->cols + c];
                const double b =
                    tab->values[(tab->rows - 1 - r) * tab->cols + (tab->cols - 1 - c)];
                if (std::abs(a - b) > 1e-12)
                    throw std::invalid_argument(
                        "placement_predicate_zone: tabulated profile is not symmetric");
            }
    }
    // Uniform and centered tents are symmetric by construction.
}

} // namespace

PlacementVerdict placement_predicate_point(const Rectangle& basis_domain, Point location,
                                           int max_x_order, int max_y_order) {
    PlacementVerdict verdict;
    const double fx = (location.x - basis_domain.x_min) / basis_domain.width();
    const double fy = (location.y - basis_domain.y_min) / basis_domain.height();
    for (int i = 0; i <= max_x_order; ++i) {
        const bool x_dead = on_half_lattice(static_cast<double>(i) * fx);
        for (int j = 0; j <= max_y_order; ++j) {
            if (x_dead) {
                verdict.vanishing_modes.push_back({Mode{i, j}, 0});
            } else if (on_half_lattice(static_cast<double>(j) * fy)) {
                verdict.vanishing_modes.push_back({Mode{i, j}, 1});
            }
        }
    }
    return verdict;
}

PlacementVerdict placement_predicate_zone(const Rectangle& basis_domain, Point center,
                                          const sensing::Profile& profile, int max_x_order,
                                          int max_y_order) {
    check_profile_symmetry(profile, basis_domain, center);
    return placement_predicate_point(basis_domain, center, max_x_order, max_y_order);
}

namespace {

SensorSpec sensor_at(const SensorSpec& tmpl, Point b, const Rectangle& domain) {
    if (const auto* zone = std::get_if<sensing::InteriorZoneSensor>(&tmpl)) {
        const double hw = 0.5 * zone->support.width();
        const double hh = 0.5 * zone->support.height();
        Rectangle moved(std::max(domain.x_min, b.x - hw), std::min(domain.x_max, b.x + hw),
                        std::max(domain.y_min, b.y - hh), std::min(domain.y_max, b.y + hh));
        return sensing::InteriorZoneSensor{moved, zone->profile};
    }
    return sensing::InteriorPointSensor{b};
}

} // namespace

ScanResult placement_scan(const ModeSet& global_modes, const ModeSet& regional_modes,
                          const SensorSpec& sensor_template, int resolution,
                          const SlowSpec& slow, double horizon, unsigned workers) {
    if (resolution < 2)
        throw std::invalid_argument("placement_scan: resolution must be >= 2");
    const Rectangle& domain = global_modes.domain();
    const auto global_groups = spectral::group_by_eigenvalue(global_modes);
    const auto regional_groups = spectral::group_by_eigenvalue(regional_modes);
    const std::size_t j_global = resolve_slow_groups(slow, global_groups, global_modes.shift());
    const std::size_t j_regional =
        resolve_slow_groups(slow, regional_groups, regional_modes.shift());
    std::size_t slow_global = 0, slow_regional = 0;
    for (std::size_t n = 0; n < j_global; ++n) slow_global += global_groups[n].multiplicity();
    for (std::size_t n = 0; n < j_regional; ++n)
        slow_regional += regional_groups[n].multiplicity();

    int max_x = 0, max_y = 0;
    for (std::size_t m = 0; m < slow_global; ++m) {
        max_x = std::max(max_x, global_modes.mode(m).x_order);
        max_y = std::max(max_y, global_modes.mode(m).y_order);
    }

    ScanResult result;
    result.resolution = resolution;
    result.cells.resize(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));

    const double hx = domain.width() / static_cast<double>(resolution);
    const double hy = domain.height() / static_cast<double>(resolution);

    auto run_cell = [&](std::size_t idx) {
        const std::size_t row = idx / static_cast<std::size_t>(resolution);
        const std::size_t col = idx % static_cast<std::size_t>(resolution);
        const Point b{domain.x_min + (static_cast<double>(col) + 0.5) * hx,
                      domain.y_min + (static_cast<double>(row) + 0.5) * hy};
        const SensorSpec sensor = sensor_at(sensor_template, b, domain);
        const SensorSpec sensors[1] = {sensor};
        ScanCell cell;
        cell.x = b.x;
        cell.y = b.y;
        cell.margin_global =
            observability_margin(std::span<const SensorSpec>(sensors, 1), global_modes,
                                 slow_global, horizon);
        cell.margin_regional =
            observability_margin(std::span<const SensorSpec>(sensors, 1), regional_modes,
                                 slow_regional, horizon);
        if (std::holds_alternative<sensing::InteriorPointSensor>(sensor)) {
            const auto verdict = placement_predicate_point(domain, b, max_x, max_y);
            for (const auto& flagged : verdict.vanishing_modes) {
                // Only slow modes make a flagged position "bad" for the scan.
                for (std::size_t m = 0; m < slow_global; ++m)
                    if (global_modes.mode(m) == flagged.mode) {
                        cell.predicate_flag = true;
                        break;
                    }
                if (cell.predicate_flag) break;
            }
        }
        result.cells[idx] = cell;
    };

    unsigned n_workers = workers == 0 ? std::thread::hardware_concurrency() : workers;
    if (n_workers == 0) n_workers = 1;
    n_workers = std::min<unsigned>(n_workers, 64);
    if (n_workers <= 1) {
        for (std::size_t idx = 0; idx < result.cells.size(); ++idx) run_cell(idx);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        const std::size_t total = result.cells.size();
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t idx = w; idx < total; idx += n_workers) run_cell(idx);
            });
        }
        for (auto& t : pool) t.join();
    }
    return result;
}

} // namespace regobs::strategic
