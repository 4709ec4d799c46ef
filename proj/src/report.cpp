#include "regobs/report.hpp"

#include <filesystem>
#include <fstream>

#include "regobs/errors.hpp"
#include "regobs/scenario.hpp"

namespace regobs::cli {

Json strategic_to_json(const strategic::StrategicReport& report) {
    Json out;
    out["sensors"] = report.sensor_count;
    out["slow_groups"] = report.slow_group_count;
    out["max_multiplicity"] = report.max_multiplicity;
    out["strategic"] = report.strategic;
    out["margin"] = report.margin;
    Json groups = Json::array();
    for (const auto& g : report.groups) {
        Json jg;
        jg["eigenvalue"] = g.eigenvalue;
        jg["multiplicity"] = g.multiplicity;
        jg["rank"] = g.rank;
        jg["smallest_singular_value"] = g.smallest_singular_value;
        Json vanish = Json::array();
        for (const auto& m : g.vanishing_members)
            vanish.push_back({{"i", m.x_order}, {"j", m.y_order}});
        jg["vanishing_members"] = vanish;
        groups.push_back(jg);
    }
    out["groups"] = groups;
    return out;
}

Json residuals_to_json(const observer::EstimatorResiduals& residuals) {
    Json out;
    out["reconstruction"] = residuals.reconstruction;
    out["intertwining"] = residuals.intertwining;
    out["input"] = residuals.input;
    return out;
}

Json decay_to_json(const regional::DecayFit& fit) {
    Json out;
    out["sigma"] = fit.sigma;
    out["amplitude"] = fit.amplitude;
    out["rms_residual"] = fit.rms_residual;
    out["window_begin"] = fit.window_begin;
    out["window_size"] = fit.window_size;
    return out;
}

void render_report_text(const Json& report, std::ostream& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    for (const auto& [key, value] : report.items()) {
        if (key == "config") {
            out << pad << "config: (echoed in report.json)\n";
            continue;
        }
        if (value.is_object()) {
            out << pad << key << ":\n";
            render_report_text(value, out, indent + 1);
        } else if (value.is_array()) {
            out << pad << key << ": " << value.dump() << "\n";
        } else {
            out << pad << key << ": " << value.dump() << "\n";
        }
    }
}

void emit_report(const Json& report, std::ostream& human, const std::string& out_dir) {
    render_report_text(report, human);
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / "report.json";
    std::ofstream file(path);
    if (!file) throw ConfigError("cannot write report to " + path.string());
    file << report.dump(2) << "\n";
}

namespace {

std::string fmt(double v) { return format_double(v); }

} // namespace

void write_trajectory_csv(const std::string& path, const observer::TrajectoryRecord& traj,
                          const std::vector<spectral::Mode>& state_modes,
                          const std::vector<spectral::Mode>& estimate_modes) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write trajectory to " + path);
    out << "t";
    for (const auto& m : state_modes) out << ",a_" << m.x_order << "_" << m.y_order;
    for (const auto& m : estimate_modes) out << ",zhat_" << m.x_order << "_" << m.y_order;
    for (Eigen::Index k = 0; k < traj.outputs.rows(); ++k) out << ",y_" << k;
    out << "\n";
    for (std::size_t s = 0; s < traj.sample_count(); ++s) {
        out << fmt(traj.times[s]);
        const auto col = static_cast<Eigen::Index>(s);
        for (Eigen::Index m = 0; m < traj.states.rows(); ++m)
            out << "," << fmt(traj.states(m, col));
        for (Eigen::Index m = 0; m < traj.estimates.rows(); ++m)
            out << "," << fmt(traj.estimates(m, col));
        for (Eigen::Index m = 0; m < traj.outputs.rows(); ++m)
            out << "," << fmt(traj.outputs(m, col));
        out << "\n";
    }
}

void write_norms_csv(const std::string& path, const std::vector<double>& times,
                     const std::vector<double>& l2_region, const std::vector<double>& h1_region,
                     const std::vector<double>& l2_domain,
                     const std::vector<double>& h1_domain) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write norm series to " + path);
    out << "t,err_L2_omega,err_H1_omega,err_L2_Omega,err_H1_Omega\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << fmt(times[k]) << "," << fmt(l2_region[k]) << "," << fmt(h1_region[k]) << ","
            << fmt(l2_domain[k]) << "," << fmt(h1_domain[k]) << "\n";
    }
}

void write_scan_csv(const std::string& path, const strategic::ScanResult& scan) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write scan to " + path);
    out << "x,y,margin_global,margin_regional,predicate_flag\n";
    for (const auto& cell : scan.cells) {
        out << fmt(cell.x) << "," << fmt(cell.y) << "," << fmt(cell.margin_global) << ","
            << fmt(cell.margin_regional) << "," << (cell.predicate_flag ? 1 : 0) << "\n";
    }
}

} // namespace regobs::cli
