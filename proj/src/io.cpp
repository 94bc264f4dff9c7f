#include "perisel/io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#ifndef PERISEL_VERSION
#define PERISEL_VERSION "0.0.0-untagged"
#endif

namespace perisel {

using nlohmann::json;

std::string version_string() { return PERISEL_VERSION; }

std::string now_utc() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["subcommand"] = m.subcommand;
  j["config_path"] = m.config_path;
  j["output_dir"] = m.output_dir;
  j["seed"] = m.seed;
  j["threads"] = m.threads;
  j["started_utc"] = m.started_utc;
  j["version"] = m.version;
  j["resolved_config"] = json::parse(m.resolved_config);
  return j.dump(2) + "\n";
}

void create_output_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::path p(dir);
  if (fs::exists(p) && !fs::is_directory(p))
    throw std::invalid_argument("output path exists and is not a directory: " + dir);
  fs::create_directories(p);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::string csv_cell(double v) {
  return std::isnan(v) ? std::string() : fmt_g17(v);
}

}  // namespace

std::string csv_from_risk(const RiskReport& r) {
  std::string out = "signal,model,n,p,estimator,risk,se,bound,normalized_risk,pass\n";
  for (const CellResult& c : r.cells) {
    out += c.signal + "," + c.noise + "," + std::to_string(c.n) + "," +
           std::to_string(c.p) + "," + c.estimator + "," + csv_cell(c.risk) +
           "," + csv_cell(c.se) + "," + csv_cell(c.bound) + "," +
           csv_cell(c.normalized_risk) + "," + (c.pass ? "1" : "0") + "\n";
  }
  return out;
}

std::string csv_from_rate(const RateReport& r) {
  std::string out =
      "n,p,risk,se,normalized,normalized_se,mean_dim,h_p,h_p_dominant\n";
  for (const RatePoint& pt : r.points) {
    out += std::to_string(pt.n) + "," + std::to_string(pt.p) + "," +
           csv_cell(pt.risk) + "," + csv_cell(pt.se) + "," +
           csv_cell(pt.normalized) + "," + csv_cell(pt.normalized_se) + "," +
           csv_cell(pt.mean_dim) + "," + csv_cell(pt.h_p) + "," +
           (pt.h_p_dominant ? "1" : "0") + "\n";
  }
  return out;
}

std::string csv_from_oracle(const OracleReport& r) {
  std::string out =
      "signal,model,n,p,lhs,lhs_se,rhs_risk_form,rhs_bias_form,margin,pass\n";
  for (const OracleCellCheck& c : r.cells) {
    out += c.signal + "," + c.noise + "," + std::to_string(c.n) + "," +
           std::to_string(c.p) + "," + csv_cell(c.lhs) + "," +
           csv_cell(c.lhs_se) + "," + csv_cell(c.rhs_risk_form) + "," +
           csv_cell(c.rhs_bias_form) + "," + csv_cell(c.margin) + "," +
           (c.pass ? "1" : "0") + "\n";
  }
  return out;
}

std::string csv_from_improvement(const ImprovementReport& r) {
  std::string out =
      "model,d,lse_risk,lse_se,shrunk_risk,shrunk_se,u_star,a_hat\n";
  for (const ImprovementRow& row : r.rows) {
    out += row.model + "," + std::to_string(row.d) + "," +
           csv_cell(row.lse_risk) + "," + csv_cell(row.lse_se) + "," +
           csv_cell(row.shrunk_risk) + "," + csv_cell(row.shrunk_se) + "," +
           csv_cell(row.u_star) + "," + csv_cell(row.a_hat) + "\n";
  }
  return out;
}

std::string audit_jsonl(const RiskReport& r) {
  std::string out;
  for (const CellResult& c : r.cells) {
    for (std::size_t rep = 0; rep < c.audit_selected.size(); ++rep) {
      json j;
      j["signal"] = c.signal;
      j["noise"] = c.noise;
      j["n"] = c.n;
      j["replicate"] = rep;
      j["selected_model"] = c.audit_selected[rep];
      out += j.dump() + "\n";
    }
  }
  return out;
}

std::string estimate_to_json(const ProjectiveEstimate& e) {
  json j;
  j["model_m"] = e.indices;
  j["coeffs"] = e.coeffs;
  j["kind"] = e.kind == EstimatorKind::Lse ? "lse" : "shrunk";
  j["n"] = e.n;
  j["p"] = e.p;
  return j.dump(2) + "\n";
}

std::string selection_to_json(const SelectionResult& s) {
  json j;
  j["selected"] = s.selected;
  j["model_m"] = s.model.indices;
  j["estimate"] = json::parse(estimate_to_json(s.estimate));
  j["criterion"] = s.criterion;
  j["penalty_values"] = s.penalty_values;
  j["params"] = {{"z_star", s.params.z_star},
                 {"lambda_star_used", s.params.lambda_star_used},
                 {"rho", s.params.rho},
                 {"tau0", s.params.tau0},
                 {"tau1", s.params.tau1},
                 {"l_star", s.params.l_star},
                 {"scale", s.params.scale}};
  return j.dump(2) + "\n";
}

std::string constants_to_json(const PenaltyParams& p) {
  json j;
  j["z_star"] = p.z_star;
  j["lambda_star"] = p.lambda_star_used;
  j["rho"] = p.rho;
  j["tau0"] = p.tau0;
  j["tau1"] = p.tau1;
  j["l_star"] = p.l_star;
  j["scale"] = p.scale;
  return j.dump(2) + "\n";
}

std::string zeta_cov_to_json(const ZetaCovariance& z) {
  json j;
  j["k"] = z.k;
  j["n"] = z.n;
  j["p"] = z.p;
  j["replicates"] = z.replicates;
  j["lambda_max"] = z.lambda_max;
  j["lambda_max_se"] = z.lambda_max_se;
  json rows = json::array();
  for (int i = 0; i < z.k; ++i) {
    json row = json::array();
    for (int c = 0; c < z.k; ++c) row.push_back(z.second_moment(i, c));
    rows.push_back(row);
  }
  j["second_moment"] = rows;
  return j.dump(2) + "\n";
}

std::string risk_summary_json(const RiskReport& r) {
  json j;
  j["sup_risk"] = r.sup_risk;
  j["sup_normalized"] = r.sup_normalized;
  j["all_ok"] = r.all_ok;
  j["runtime_seconds"] = r.runtime_seconds;
  j["cells"] = r.cells.size();
  json errs = json::array();
  for (const CellResult& c : r.cells)
    if (!c.error.empty())
      errs.push_back({{"signal", c.signal}, {"noise", c.noise},
                      {"n", c.n}, {"error", c.error}});
  j["cell_errors"] = errs;
  return j.dump(2) + "\n";
}

std::string oracle_summary_json(const OracleReport& r) {
  json j;
  j["pass"] = r.pass;
  j["runtime_seconds"] = r.runtime_seconds;
  json cells = json::array();
  for (const OracleCellCheck& c : r.cells) {
    json jc;
    jc["signal"] = c.signal;
    jc["model"] = c.noise;
    jc["n"] = c.n;
    jc["p"] = c.p;
    jc["lhs"] = c.lhs;
    jc["lhs_se"] = c.lhs_se;
    jc["rhs_risk_form"] = c.rhs_risk_form;
    if (!std::isnan(c.rhs_bias_form)) jc["rhs_bias_form"] = c.rhs_bias_form;
    jc["margin"] = c.margin;
    jc["pass"] = c.pass;
    if (!c.error.empty()) jc["error"] = c.error;
    cells.push_back(jc);
  }
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

std::string rate_summary_json(const RateReport& r) {
  json j;
  j["beta"] = r.beta;
  j["r"] = r.r;
  j["mode"] = r.mode == Mode::Continuous ? "continuous" : "discrete";
  j["band_ratio"] = r.band_ratio;
  j["last_over_median"] = r.last_over_median;
  j["band_ok"] = r.band_ok;
  j["trend_ok"] = r.trend_ok;
  j["pass"] = r.pass;
  json pts = json::array();
  for (const RatePoint& p : r.points)
    pts.push_back({{"n", p.n}, {"p", p.p}, {"normalized", p.normalized},
                   {"normalized_se", p.normalized_se},
                   {"mean_dim", p.mean_dim}});
  j["points"] = pts;
  return j.dump(2) + "\n";
}

std::string bayes_to_json(const BayesReport& r, double discrete_bound) {
  json j;
  j["n"] = r.n;
  j["beta"] = r.beta;
  j["nu"] = r.nu;
  j["replicates"] = r.replicates;
  j["bound"] = {{"m", r.bound.m},
                {"h", r.bound.h},
                {"delta", r.bound.delta},
                {"i_g", r.bound.i_g},
                {"value", r.bound.bound},
                {"normalized", r.bound.bound_normalized},
                {"discrete_corrected", discrete_bound}};
  json est = json::array();
  for (const BayesEstimatorRisk& e : r.estimators)
    est.push_back({{"label", e.label}, {"risk", e.risk}, {"se", e.se},
                   {"pass", e.pass}});
  j["estimators"] = est;
  j["cheat_risk"] = r.cheat_risk;
  j["cheat_violates_bound"] = r.cheat_violates;
  j["pass"] = r.pass;
  return j.dump(2) + "\n";
}

std::string improvement_to_json(const ImprovementReport& r) {
  json j;
  j["n"] = r.n;
  j["replicates"] = r.replicates;
  j["selected_lse"] = {{"risk", r.sel_lse_risk}, {"se", r.sel_lse_se},
                       {"bound", r.bound_lse}, {"pass", r.pass_lse}};
  j["selected_shrunk"] = {{"risk", r.sel_shrunk_risk},
                          {"se", r.sel_shrunk_se},
                          {"bound", r.bound_shrunk},
                          {"pass", r.pass_shrunk}};
  json rows = json::array();
  for (const ImprovementRow& row : r.rows)
    rows.push_back({{"model", row.model}, {"d", row.d},
                    {"lse_risk", row.lse_risk}, {"lse_se", row.lse_se},
                    {"shrunk_risk", row.shrunk_risk},
                    {"shrunk_se", row.shrunk_se},
                    {"u_star", row.u_star}, {"a_hat", row.a_hat}});
  j["models"] = rows;
  return j.dump(2) + "\n";
}

void write_path_binary(const std::string& stem, const SamplePath& path) {
  static_assert(sizeof(double) == 8, "float64 layout assumed");
  // x86-64 / AArch64 are little-endian; raw dump is the documented format.
  auto dump = [](const std::string& file, const std::vector<double>& v) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + file);
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + file);
  };
  dump(stem + "_dy.f64", path.d_y);
  dump(stem + "_dxi.f64", path.d_xi);
  json meta;
  meta["n"] = path.grid.n;
  meta["p"] = path.grid.p;
  meta["count"] = path.grid.increments();
  meta["dtype"] = "float64-le";
  meta["seed"] = path.seed;
  meta["replicate"] = path.replicate;
  meta["model"] = path.model_label;
  meta["signal"] = path.signal_label;
  meta["files"] = {{"d_y", stem + "_dy.f64"}, {"d_xi", stem + "_dxi.f64"}};
  write_text(stem + "_meta.json", meta.dump(2) + "\n");
}

}  // namespace perisel
