#pragma once

#include <cstdint>
#include <string>

#include "perisel/config.hpp"
#include "perisel/risk_lab.hpp"

namespace perisel {

std::string version_string();
std::string now_utc();  // ISO 8601, second resolution

/// Provenance record written into the output directory before any result
/// file, so a crashed or interrupted run is still attributable.
struct RunManifest {
  std::string subcommand;
  std::string config_path;       // empty when the config came inline
  std::string output_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string started_utc;
  std::string version;
  std::string resolved_config;   // full resolved config as JSON text
};

std::string manifest_to_json(const RunManifest& m);

/// Creates the directory (parents included). Throws if the path exists and
/// is not a directory.
void create_output_dir(const std::string& dir);
void write_text(const std::string& path, const std::string& text);

/// %.17g — round-trips doubles so equal-seed re-runs are byte-identical.
std::string fmt_g17(double v);

std::string csv_from_risk(const RiskReport& r);
std::string csv_from_rate(const RateReport& r);
std::string csv_from_oracle(const OracleReport& r);
std::string csv_from_improvement(const ImprovementReport& r);

/// One line per replicate: which model the rule picked (config.audit).
std::string audit_jsonl(const RiskReport& r);

std::string estimate_to_json(const ProjectiveEstimate& e);
std::string selection_to_json(const SelectionResult& s);
std::string constants_to_json(const PenaltyParams& p);
std::string zeta_cov_to_json(const ZetaCovariance& z);
std::string risk_summary_json(const RiskReport& r);
std::string oracle_summary_json(const OracleReport& r);
std::string rate_summary_json(const RateReport& r);
std::string bayes_to_json(const BayesReport& r, double discrete_bound);
std::string improvement_to_json(const ImprovementReport& r);

/// Raw increments as little-endian float64 (d_y, then d_xi), plus a JSON
/// sidecar describing the layout.
void write_path_binary(const std::string& stem, const SamplePath& path);

}  // namespace perisel
