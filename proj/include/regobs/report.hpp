#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "regobs/observer.hpp"
#include "regobs/regional.hpp"
#include "regobs/strategic.hpp"

namespace regobs::cli {

inline constexpr const char* kToolName = "regobs";
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

Json strategic_to_json(const strategic::StrategicReport& report);
Json residuals_to_json(const observer::EstimatorResiduals& residuals);
Json decay_to_json(const regional::DecayFit& fit);

// report.json under out_dir plus a human-readable rendering on `human`.
void emit_report(const Json& report, std::ostream& human, const std::string& out_dir);
void render_report_text(const Json& report, std::ostream& out, int indent = 0);

// CSV writers; all doubles shortest-round-trip formatted so identical runs
// produce identical bytes.
void write_trajectory_csv(const std::string& path, const observer::TrajectoryRecord& traj,
                          const std::vector<spectral::Mode>& state_modes,
                          const std::vector<spectral::Mode>& estimate_modes);
void write_norms_csv(const std::string& path, const std::vector<double>& times,
                     const std::vector<double>& l2_region, const std::vector<double>& h1_region,
                     const std::vector<double>& l2_domain, const std::vector<double>& h1_domain);
void write_scan_csv(const std::string& path, const strategic::ScanResult& scan);

} // namespace regobs::cli
