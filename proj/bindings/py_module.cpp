#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "perisel/config.hpp"
#include "perisel/io.hpp"
#include "perisel/risk_lab.hpp"

namespace py = pybind11;
using namespace perisel;

namespace {

// Studies take the same JSON configs as the CLI and return the same summary
// JSON, so python callers and shell callers see one contract.
std::string run_risk(const std::string& cfg_json) {
  return risk_summary_json(mc_risk(config_from_json(cfg_json)));
}

std::string run_oracle_check(const std::string& cfg_json) {
  return oracle_summary_json(oracle_check(config_from_json(cfg_json)));
}

std::string run_rate_study(const std::string& cfg_json) {
  return rate_summary_json(rate_study(config_from_json(cfg_json)));
}

py::dict constants(double lambda_star, double l_star, double scale) {
  const PenaltyParams p = solve_constants(lambda_star, l_star, scale);
  py::dict d;
  d["z_star"] = p.z_star;
  d["lambda_star"] = p.lambda_star_used;
  d["rho"] = p.rho;
  d["tau0"] = p.tau0;
  d["tau1"] = p.tau1;
  d["l_star"] = p.l_star;
  return d;
}

py::dict van_trees(int n, double beta, double nu) {
  const VanTreesBound b = van_trees_bound(n, beta, nu);
  py::dict d;
  d["m"] = b.m;
  d["h"] = b.h;
  d["delta"] = b.delta;
  d["i_g"] = b.i_g;
  d["bound"] = b.bound;
  d["bound_normalized"] = b.bound_normalized;
  return d;
}

std::string lower_bound_study(int n, double beta, double nu, int replicates,
                              std::uint64_t seed, int threads) {
  const BayesReport rep = bayes_risk_study(n, beta, nu, replicates, seed, threads);
  return bayes_to_json(rep, van_trees_discrete(rep.bound, 1.0, 0.5));
}

py::dict select_coefficients(const std::vector<double>& alpha_hat, int n,
                             double lambda_star, int d_max,
                             const std::string& kind) {
  Eigen::VectorXd a(alpha_hat.size());
  for (std::size_t i = 0; i < alpha_hat.size(); ++i) a(i) = alpha_hat[i];
  const ModelFamily family =
      ModelFamily::ordered(std::min<int>(d_max, a.size()));
  const PenaltyParams params = solve_constants(lambda_star, family.l_star());
  const EstimatorKind ek =
      kind == "shrunk" ? EstimatorKind::Shrunk : EstimatorKind::Lse;
  const SelectionResult sel = select_from_coefficients(a, family, params, n, ek);
  py::dict d;
  d["selected"] = sel.selected;
  d["indices"] = sel.estimate.indices;
  d["coeffs"] = sel.estimate.coeffs;
  d["criterion"] = sel.criterion;
  d["penalty_values"] = sel.penalty_values;
  return d;
}

py::tuple simulate(const std::string& cfg_json) {
  const ExperimentConfig cfg = config_from_json(cfg_json);
  if (cfg.signals.empty() || cfg.noises.empty() || cfg.n_values.empty())
    throw std::invalid_argument("simulate: signals, noises, n_values required");
  const auto sig = cfg.signals.front().build();
  const int n = cfg.n_values.front();
  const int p = cfg.mode == Mode::Discrete
                    ? p_for(cfg, n)
                    : p_sim_for(cfg, n, cfg.family.build(n, cfg.beta, 1 << 20).max_index(),
                                sig->max_frequency());
  const SamplePath path =
      simulate_path(*sig, cfg.noises.front(), GridSpec(n, p), cfg.seed, 0);
  return py::make_tuple(path.d_y, path.d_xi, p);
}

py::dict zeta_covariance(const std::string& kind, double theta, int k, int n,
                         int replicates, std::uint64_t seed) {
  const NoiseModel model =
      kind == "white" ? NoiseModel::white() : NoiseModel::ou(theta);
  const ZetaCovariance z = empirical_zeta_cov(model, k, n, replicates, seed);
  py::dict d;
  d["lambda_max"] = z.lambda_max;
  d["lambda_max_se"] = z.lambda_max_se;
  d["p"] = z.p;
  std::vector<std::vector<double>> mat(z.k, std::vector<double>(z.k));
  for (int i = 0; i < z.k; ++i)
    for (int c = 0; c < z.k; ++c) mat[i][c] = z.second_moment(i, c);
  d["second_moment"] = mat;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "penalized model selection for periodic signals in correlated "
            "Gaussian noise";
#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
  m.def("z_star", &solve_z_star, "root of ln z = z - 2 in (2, 10)");
  m.def("constants", &constants, py::arg("lambda_star") = 1.0,
        py::arg("l_star") = 0.58197670686932642, py::arg("scale") = 1.0);
  m.def("basis_eval", &TrigBasis::eval, py::arg("j"), py::arg("t"));
  m.def("run_risk", &run_risk, py::arg("config_json"));
  m.def("run_oracle_check", &run_oracle_check, py::arg("config_json"));
  m.def("run_rate_study", &run_rate_study, py::arg("config_json"));
  m.def("van_trees", &van_trees, py::arg("n"), py::arg("beta"), py::arg("nu"));
  m.def("lower_bound_study", &lower_bound_study, py::arg("n"), py::arg("beta"),
        py::arg("nu"), py::arg("replicates"), py::arg("seed"),
        py::arg("threads") = 1);
  m.def("select_coefficients", &select_coefficients, py::arg("alpha_hat"),
        py::arg("n"), py::arg("lambda_star") = 1.0, py::arg("d_max") = 12,
        py::arg("kind") = "lse");
  m.def("simulate", &simulate, py::arg("config_json"),
        "returns (d_y, d_xi, p) for the first signal/noise/n of the config");
  m.def("zeta_covariance", &zeta_covariance, py::arg("kind"), py::arg("theta"),
        py::arg("k"), py::arg("n"), py::arg("replicates"), py::arg("seed"));
}
