#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "perisel/config.hpp"
#include "perisel/io.hpp"
#include "perisel/risk_lab.hpp"

namespace {

using namespace perisel;

// Exit contract: 0 success, 1 a certified check failed, 2 invalid
// configuration or arguments, 3 numerical failure.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInvalid = 2;
constexpr int kNumerical = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool threads_set = false;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "JSON experiment config");
  cmd->add_option("--out", a.out_dir, "output directory (created; manifest first)");
  cmd->add_option("--seed", a.seed, "master seed (overrides config)")
      ->each([&a](const std::string&) { a.seed_set = true; });
  cmd->add_option("--threads", a.threads, "worker threads (overrides config)")
      ->each([&a](const std::string&) { a.threads_set = true; });
  cmd->add_option("--override", a.overrides,
                  "config override key=value (repeatable; dotted paths)");
}

ExperimentConfig resolve_config(const CommonArgs& a, StudyKind study) {
  std::string text = "{}";
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in)
      throw std::invalid_argument("config: cannot read '" + a.config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  ExperimentConfig cfg = config_from_json(apply_overrides(text, a.overrides));
  if (cfg.signals.empty()) cfg.signals.push_back(SignalSpec{});
  if (cfg.noises.empty()) cfg.noises.push_back(NoiseModel::white());
  if (cfg.n_values.empty()) cfg.n_values.push_back(100);
  if (a.seed_set) cfg.seed = a.seed;
  if (a.threads_set) {
    cfg.threads = a.threads;
  } else if (const char* env = std::getenv("PERISEL_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) cfg.threads = t;
  }
  if (cfg.threads < 1) cfg.threads = 1;
  require_valid(cfg, study);
  return cfg;
}

const char* study_name(StudyKind s) {
  switch (s) {
    case StudyKind::Simulate: return "simulate";
    case StudyKind::Estimate: return "estimate";
    case StudyKind::Select: return "select";
    case StudyKind::Risk: return "risk";
    case StudyKind::OracleCheck: return "oracle-check";
    case StudyKind::RateStudy: return "rate-study";
    case StudyKind::LowerBound: return "lower-bound";
    case StudyKind::Improve: return "improve";
  }
  return "?";
}

// Directory + manifest; returns true when files should be written.
bool open_output(const CommonArgs& a, const ExperimentConfig& cfg,
                 StudyKind study) {
  if (a.out_dir.empty()) return false;
  create_output_dir(a.out_dir);
  RunManifest m;
  m.subcommand = study_name(study);
  m.config_path = a.config_path;
  m.output_dir = a.out_dir;
  m.seed = cfg.seed;
  m.threads = cfg.threads;
  m.started_utc = now_utc();
  m.version = version_string();
  m.resolved_config = config_to_json(cfg);
  write_text(a.out_dir + "/manifest.json", manifest_to_json(m));
  return true;
}

SamplePath build_path(const ExperimentConfig& cfg) {
  const auto sig = cfg.signals.front().build();
  const NoiseModel& noise = cfg.noises.front();
  const int n = cfg.n_values.front();
  int top = cfg.family.build(n, cfg.beta, 1 << 20).max_index();
  for (int j : cfg.model_indices) top = std::max(top, j);
  const int p = cfg.mode == Mode::Discrete
                    ? p_for(cfg, n)
                    : p_sim_for(cfg, n, top, sig->max_frequency());
  SamplePath path = simulate_path(*sig, noise, GridSpec(n, p), cfg.seed, 0);
  if (cfg.noise_free) {
    for (std::size_t k = 0; k < path.d_y.size(); ++k)
      path.d_y[k] -= path.d_xi[k];
    std::fill(path.d_xi.begin(), path.d_xi.end(), 0.0);
  }
  return path;
}

int cmd_simulate(const CommonArgs& a) {
  const ExperimentConfig cfg = resolve_config(a, StudyKind::Simulate);
  if (a.out_dir.empty())
    throw std::invalid_argument("simulate: --out is required (binary output)");
  open_output(a, cfg, StudyKind::Simulate);
  const SamplePath path = build_path(cfg);
  write_path_binary(a.out_dir + "/path", path);
  std::cout << "{\"n\": " << path.grid.n << ", \"p\": " << path.grid.p
            << ", \"increments\": " << path.grid.increments() << "}\n";
  return kOk;
}

int cmd_estimate(const CommonArgs& a) {
  const ExperimentConfig cfg = resolve_config(a, StudyKind::Estimate);
  const bool files = open_output(a, cfg, StudyKind::Estimate);
  const SamplePath path = build_path(cfg);
  Model m;
  m.indices = cfg.model_indices;
  m.name = "cli";
  const ProjectiveEstimate est = cfg.estimator == EstimatorKind::Shrunk
                                     ? shrink_fit(path, m)
                                     : lse_fit(path, m);
  const std::string json = estimate_to_json(est);
  if (files) write_text(a.out_dir + "/estimate.json", json);
  std::cout << json;
  return kOk;
}

int cmd_select(const CommonArgs& a) {
  const ExperimentConfig cfg = resolve_config(a, StudyKind::Select);
  const bool files = open_output(a, cfg, StudyKind::Select);
  const SamplePath path = build_path(cfg);
  const int n = cfg.n_values.front();
  const ModelFamily family = cfg.family.build(
      n, cfg.beta, cfg.mode == Mode::Discrete ? path.grid.p : (1 << 20));
  double lambda = cfg.noises.front().lambda_star();
  if (cfg.use_kappa_penalty) lambda = cfg.kappa;
  if (cfg.lambda_star_override > 0.0) lambda = cfg.lambda_star_override;
  const PenaltyParams params =
      solve_constants(lambda, family.l_star(), cfg.penalty_scale);
  const SelectionResult sel = select(path, family, params, cfg.estimator);
  const std::string json = selection_to_json(sel);
  if (files) write_text(a.out_dir + "/selection.json", json);
  std::cout << json;
  return kOk;
}

int cmd_risk(const CommonArgs& a) {
  const ExperimentConfig cfg = resolve_config(a, StudyKind::Risk);
  const bool files = open_output(a, cfg, StudyKind::Risk);
  const RiskReport rep = mc_risk(cfg);
  if (files) {
    write_text(a.out_dir + "/risk.csv", csv_from_risk(rep));
    write_text(a.out_dir + "/risk_summary.json", risk_summary_json(rep));
    if (cfg.audit) write_text(a.out_dir + "/audit.jsonl", audit_jsonl(rep));
  }
  std::cout << risk_summary_json(rep);
  bool pass = rep.all_ok;
  for (const CellResult& c : rep.cells) pass = pass && c.pass;
  return pass ? kOk : kCheckFailed;
}

int cmd_oracle(const CommonArgs& a) {
  const ExperimentConfig cfg = resolve_config(a, StudyKind::OracleCheck);
  const bool files = open_output(a, cfg, StudyKind::OracleCheck);
  const OracleReport rep = oracle_check(cfg);
  if (files) {
    write_text(a.out_dir + "/oracle.csv", csv_from_oracle(rep));
    write_text(a.out_dir + "/oracle_summary.json", oracle_summary_json(rep));
  }
  std::cout << oracle_summary_json(rep);
  return rep.pass ? kOk : kCheckFailed;
}

int cmd_rate(const CommonArgs& a) {
  const ExperimentConfig cfg = resolve_config(a, StudyKind::RateStudy);
  const bool files = open_output(a, cfg, StudyKind::RateStudy);
  const RateReport rep = rate_study(cfg);
  if (files) {
    write_text(a.out_dir + "/rate.csv", csv_from_rate(rep));
    write_text(a.out_dir + "/rate_summary.json", rate_summary_json(rep));
  }
  std::cout << rate_summary_json(rep);
  return rep.pass ? kOk : kCheckFailed;
}

int cmd_lower_bound(const CommonArgs& a) {
  const ExperimentConfig cfg = resolve_config(a, StudyKind::LowerBound);
  const bool files = open_output(a, cfg, StudyKind::LowerBound);
  const BayesReport rep =
      bayes_risk_study(cfg.n_values.front(), cfg.beta, cfg.nu, cfg.replicates,
                       cfg.seed, cfg.threads);
  const double disc = van_trees_discrete(rep.bound, cfg.r, cfg.epsilon);
  const std::string json = bayes_to_json(rep, disc);
  if (files) write_text(a.out_dir + "/lower_bound.json", json);
  std::cout << json;
  return rep.pass ? kOk : kCheckFailed;
}

int cmd_improve(const CommonArgs& a) {
  const ExperimentConfig cfg = resolve_config(a, StudyKind::Improve);
  const bool files = open_output(a, cfg, StudyKind::Improve);
  const ImprovementReport rep =
      improvement_study(cfg.signals.front(), cfg.family, cfg.n_values.front(),
                        cfg.replicates, cfg.seed, cfg.threads);
  if (files) {
    write_text(a.out_dir + "/improve.csv", csv_from_improvement(rep));
    write_text(a.out_dir + "/improve.json", improvement_to_json(rep));
  }
  std::cout << improvement_to_json(rep);
  return rep.pass_lse && rep.pass_shrunk ? kOk : kCheckFailed;
}

int cmd_constants(double lambda_star, double l_star, int d_max,
                  const std::string& out_dir) {
  if (d_max > 0) {
    l_star = 0.0;
    for (int d = 1; d <= d_max; ++d) l_star += std::exp(-static_cast<double>(d));
  }
  const PenaltyParams p = solve_constants(lambda_star, l_star);
  const std::string json = constants_to_json(p);
  if (!out_dir.empty()) {
    create_output_dir(out_dir);
    write_text(out_dir + "/constants.json", json);
  }
  std::cout << json;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized model selection for periodic signals in correlated "
               "Gaussian noise"};
  app.require_subcommand(1);

  CommonArgs sim_a, est_a, sel_a, risk_a, ora_a, rate_a, low_a, imp_a;
  add_common(app.add_subcommand("simulate", "draw one observation path"), sim_a);
  add_common(app.add_subcommand("estimate", "projective fit on one model"), est_a);
  add_common(app.add_subcommand("select", "penalized model selection"), sel_a);
  add_common(app.add_subcommand("risk", "Monte Carlo risks over a grid"), risk_a);
  add_common(app.add_subcommand("oracle-check",
                                "risk vs oracle inequality right-hand sides"),
             ora_a);
  add_common(app.add_subcommand("rate-study", "normalized-risk ladder"), rate_a);
  add_common(app.add_subcommand("lower-bound",
                                "Bayes risks vs the prior-information bound"),
             low_a);
  add_common(app.add_subcommand("improve", "shrinkage vs plain LSE"), imp_a);

  double lambda_star = 1.0;
  double l_star = 1.0 / (std::exp(1.0) - 1.0);  // ordered-family limit
  int d_max = 0;
  std::string const_out;
  CLI::App* cst = app.add_subcommand("constants", "penalty calibration constants");
  cst->add_option("--lambda-star", lambda_star, "noise-class constant");
  cst->add_option("--l-star", l_star, "family weight sum (default: limit)");
  cst->add_option("--d-max", d_max, "compute l* for the ordered family of this size");
  cst->add_option("--out", const_out, "also write constants.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (app.got_subcommand("simulate")) return cmd_simulate(sim_a);
    if (app.got_subcommand("estimate")) return cmd_estimate(est_a);
    if (app.got_subcommand("select")) return cmd_select(sel_a);
    if (app.got_subcommand("risk")) return cmd_risk(risk_a);
    if (app.got_subcommand("oracle-check")) return cmd_oracle(ora_a);
    if (app.got_subcommand("rate-study")) return cmd_rate(rate_a);
    if (app.got_subcommand("lower-bound")) return cmd_lower_bound(low_a);
    if (app.got_subcommand("improve")) return cmd_improve(imp_a);
    if (app.got_subcommand("constants"))
      return cmd_constants(lambda_star, l_star, d_max, const_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kInvalid;
}
