#include "perisel/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace perisel {

using nlohmann::json;

std::string SignalSpec::label() const {
  char buf[96];
  switch (kind) {
    case Kind::Zero:
      return "zero";
    case Kind::Coeffs: {
      if (coeffs.size() > 6) {
        std::snprintf(buf, sizeof(buf), "coeffs(d=%zu)", coeffs.size());
        return buf;
      }
      std::string s = "coeffs(";
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%g", coeffs[i]);
        s += buf;
        if (i + 1 < coeffs.size()) s += ",";
      }
      return s + ")";
    }
    case Kind::SobolevBoundary:
      std::snprintf(buf, sizeof(buf), "sobolev_boundary(beta=%g,r=%g)", beta, r);
      return buf;
    case Kind::SobolevRandom:
      std::snprintf(buf, sizeof(buf), "sobolev_random(beta=%g,r=%g,seed=%llu)",
                    beta, r, static_cast<unsigned long long>(seed));
      return buf;
    case Kind::Bump:
      std::snprintf(buf, sizeof(buf), "bump(m=%d,delta=%g)", bump.m, bump.delta);
      return buf;
  }
  return "signal";
}

std::shared_ptr<Signal> SignalSpec::build() const {
  switch (kind) {
    case Kind::Zero:
      return std::make_shared<TrigSignal>();
    case Kind::Coeffs:
      return std::make_shared<TrigSignal>(coeffs, label());
    case Kind::SobolevBoundary:
      return std::make_shared<TrigSignal>(sobolev_boundary_signal(beta, r, j_max));
    case Kind::SobolevRandom:
      return std::make_shared<TrigSignal>(
          sobolev_random_signal(beta, r, j_max, seed));
    case Kind::Bump:
      return std::make_shared<BumpSignal>(bump, label());
  }
  throw std::logic_error("SignalSpec::build: bad kind");
}

ModelFamily FamilySpec::build(int n, double beta, int index_cap) const {
  if (kind == Kind::General) {
    ModelFamily fam = ModelFamily::general(models, weights);
    if (fam.max_index() > index_cap)
      throw std::invalid_argument(
          "family: max index exceeds the sampling resolution p");
    return fam;
  }
  int d = d_max;
  if (d <= 0) {  // auto: track the n^{1/(2 beta + 1)} optimal dimension
    d = std::max(8, static_cast<int>(
                        std::ceil(6.0 * std::pow(n, 1.0 / (2.0 * beta + 1.0)))));
  }
  d = std::max(1, std::min(d, index_cap));
  return ModelFamily::ordered(d);
}

int p_for(const ExperimentConfig& cfg, int n) {
  switch (cfg.p_rule) {
    case PRule::SqrtOdd:
      return 2 * static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)))) + 1;
    case PRule::Fixed:
      return cfg.p_fixed;
    case PRule::CbrtOdd: {
      int p = std::max(3, static_cast<int>(std::floor(std::cbrt(static_cast<double>(n)))));
      if (p % 2 == 0) ++p;
      return p;
    }
  }
  throw std::logic_error("p_for: bad rule");
}

int p_sim_for(const ExperimentConfig& cfg, int /*n*/, int family_max_index,
              int signal_max_freq) {
  if (cfg.p_sim_override > 0) return cfg.p_sim_override;
  int p = 33;
  p = std::max(p, 8 * (family_max_index / 2));
  p = std::max(p, 2 * signal_max_freq + 1);
  if (p % 2 == 0) ++p;
  return p;
}

namespace {

void check_signal(const SignalSpec& s, const std::string& path,
                  std::vector<ValidationIssue>& out) {
  switch (s.kind) {
    case SignalSpec::Kind::Coeffs:
      for (double c : s.coeffs)
        if (!std::isfinite(c)) {
          out.push_back({path + ".coeffs", "coefficients must be finite"});
          break;
        }
      break;
    case SignalSpec::Kind::SobolevBoundary:
    case SignalSpec::Kind::SobolevRandom:
      if (!(s.beta > 0.0))
        out.push_back({path + ".beta", "smoothness index beta must be > 0"});
      if (!(s.r > 0.0))
        out.push_back({path + ".r", "class radius r must be > 0"});
      if (s.j_max < 1)
        out.push_back({path + ".j_max", "profile length must be >= 1"});
      break;
    case SignalSpec::Kind::Bump:
      if (s.bump.m < 1)
        out.push_back({path + ".bump.m", "bump count m must be >= 1"});
      else if (static_cast<int>(s.bump.z.size()) != s.bump.m)
        out.push_back({path + ".bump.z", "z must have length m"});
      else
        for (double z : s.bump.z)
          if (std::abs(z) > s.bump.delta + 1e-12) {
            out.push_back({path + ".bump.z",
                           "amplitudes must satisfy |z_i| <= delta"});
            break;
          }
      break;
    case SignalSpec::Kind::Zero:
      break;
  }
}

}  // namespace

std::vector<ValidationIssue> validate_config(const ExperimentConfig& cfg,
                                             StudyKind study) {
  std::vector<ValidationIssue> out;
  const bool mc_study = study == StudyKind::Risk || study == StudyKind::OracleCheck ||
                        study == StudyKind::RateStudy ||
                        study == StudyKind::LowerBound || study == StudyKind::Improve;
  const bool needs_signals = study != StudyKind::LowerBound &&
                             study != StudyKind::RateStudy &&
                             study != StudyKind::Improve;
  const bool needs_noises =
      study != StudyKind::LowerBound && study != StudyKind::Improve;

  if (mc_study && cfg.replicates < 100)
    out.push_back({"replicates",
                   "Monte Carlo studies assume replicates >= 100 for usable "
                   "standard errors"});
  if (cfg.threads < 0)
    out.push_back({"threads", "thread count must be >= 0 (0 = environment)"});
  if (cfg.n_values.empty())
    out.push_back({"n_values", "at least one observation horizon n required"});
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i)
    if (cfg.n_values[i] < 1)
      out.push_back({"n_values[" + std::to_string(i) + "]", "n must be >= 1"});

  if (needs_signals && cfg.signals.empty())
    out.push_back({"signals", "at least one signal spec required"});
  for (std::size_t i = 0; i < cfg.signals.size(); ++i)
    check_signal(cfg.signals[i], "signals[" + std::to_string(i) + "]", out);

  if (needs_noises && cfg.noises.empty())
    out.push_back({"noises", "at least one noise model required"});

  if (cfg.use_kappa_penalty) {
    double max_lam = 0.0;
    for (const NoiseModel& m : cfg.noises)
      max_lam = std::max(max_lam, m.lambda_star());
    if (cfg.kappa + 1e-12 < max_lam)
      out.push_back({"kappa",
                     "kappa must dominate every lambda* in the noise set "
                     "(uniform-class penalty replaces lambda* by kappa)"});
  }
  if (!(cfg.penalty_scale > 0.0))
    out.push_back({"penalty_scale", "penalty scale must be > 0"});
  if (cfg.lambda_star_override < 0.0)
    out.push_back({"lambda_star_override", "override must be >= 0 (0 = off)"});
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
    out.push_back({"epsilon", "loss-splitting epsilon must lie in (0, 1)"});

  if (cfg.estimator == EstimatorKind::Shrunk) {
    for (std::size_t i = 0; i < cfg.noises.size(); ++i)
      if (cfg.noises[i].kind() != NoiseKind::White)
        out.push_back({"noises[" + std::to_string(i) + "]",
                       "the shrinkage risk identity is established for white "
                       "noise only; estimator=shrunk requires white noise"});
    if (study == StudyKind::OracleCheck && cfg.mode == Mode::Discrete)
      out.push_back({"estimator",
                     "no certified oracle form covers shrinkage under "
                     "discrete sampling; use estimator=lse"});
  }

  if (cfg.mode == Mode::Discrete) {
    for (int n : cfg.n_values) {
      const int p = p_for(cfg, n);
      if (p < 1 || p % 2 == 0) {
        out.push_back({cfg.p_rule == PRule::Fixed ? "p_fixed" : "p_rule",
                       "p is a given odd number; got p=" + std::to_string(p)});
        break;
      }
    }
    if (study == StudyKind::RateStudy && !cfg.allow_subcritical_p) {
      for (int n : cfg.n_values) {
        const int p = p_for(cfg, n);
        if (static_cast<double>(p) <
            std::sqrt(static_cast<double>(n)) - 1e-9) {
          out.push_back(
              {"p_rule",
               "the discrete-sampling rate guarantee requires p >= sqrt(n) "
               "(got p=" + std::to_string(p) + " at n=" + std::to_string(n) +
               "); set allow_subcritical_p to study the degraded regime"});
          break;
        }
      }
    }
  }
  if (cfg.p_sim_override != 0 &&
      (cfg.p_sim_override < 1 || cfg.p_sim_override % 2 == 0))
    out.push_back({"p_sim_override", "simulation resolution must be odd"});

  if (study == StudyKind::RateStudy) {
    if (!(cfg.beta > 1.0))
      out.push_back({"beta",
                     "the rate guarantee needs beta >= 1 + eps for some eps > 0; "
                     "beta <= 1 is excluded"});
    if (!(cfg.r > 0.0)) out.push_back({"r", "class radius r must be > 0"});
    if (cfg.n_values.size() < 4) {
      out.push_back({"n_values", "rate ladder needs >= 4 horizons"});
    } else {
      double rmin = 1e300, rmax = 0.0;
      bool increasing = true;
      for (std::size_t i = 0; i + 1 < cfg.n_values.size(); ++i) {
        if (cfg.n_values[i + 1] <= cfg.n_values[i]) increasing = false;
        const double ratio = static_cast<double>(cfg.n_values[i + 1]) /
                             std::max(1, cfg.n_values[i]);
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
      }
      if (!increasing || rmin < 1.2 || rmax / rmin > 2.0)
        out.push_back({"n_values",
                       "rate ladder must be increasing and geometrically "
                       "spaced (consecutive ratios >= 1.2, within 2x of each "
                       "other)"});
    }
  }
  if (study == StudyKind::LowerBound) {
    if (!(cfg.beta > 0.0))
      out.push_back({"beta", "smoothness index beta must be > 0"});
    if (!(cfg.nu > 0.0))
      out.push_back({"nu", "prior amplitude nu must be > 0"});
  }
  if (study == StudyKind::Estimate) {
    if (cfg.model_indices.empty())
      out.push_back({"model_indices", "estimate needs a model index set"});
    for (std::size_t i = 0; i < cfg.model_indices.size(); ++i) {
      if (cfg.model_indices[i] < 1 ||
          (i > 0 && cfg.model_indices[i] <= cfg.model_indices[i - 1])) {
        out.push_back({"model_indices",
                       "indices must be strictly increasing and 1-based"});
        break;
      }
    }
  }
  return out;
}

void require_valid(const ExperimentConfig& cfg, StudyKind study) {
  const auto issues = validate_config(cfg, study);
  if (issues.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& i : issues) msg += "\n  " + i.path + ": " + i.message;
  throw std::invalid_argument(msg);
}

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config field " + path + ": " + what);
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad_field(key, e.what());
  }
}

SignalSpec parse_signal(const json& j, const std::string& path) {
  SignalSpec s;
  const std::string kind = get_or<std::string>(j, "kind", "zero");
  if (kind == "zero") {
    s.kind = SignalSpec::Kind::Zero;
  } else if (kind == "coeffs") {
    s.kind = SignalSpec::Kind::Coeffs;
    s.coeffs = get_or<std::vector<double>>(j, "coeffs", {});
  } else if (kind == "sobolev_boundary" || kind == "sobolev_random") {
    s.kind = kind == "sobolev_boundary" ? SignalSpec::Kind::SobolevBoundary
                                        : SignalSpec::Kind::SobolevRandom;
    s.beta = get_or<double>(j, "beta", 2.0);
    s.r = get_or<double>(j, "r", 1.0);
    s.j_max = get_or<int>(j, "j_max", 64);
    s.seed = get_or<std::uint64_t>(j, "seed", 1);
  } else if (kind == "bump") {
    s.kind = SignalSpec::Kind::Bump;
    s.bump.m = get_or<int>(j, "m", 1);
    s.bump.delta = get_or<double>(j, "delta", 1.0);
    s.bump.z = get_or<std::vector<double>>(j, "z", {});
  } else {
    bad_field(path + ".kind", "unknown signal kind '" + kind + "'");
  }
  return s;
}

NoiseModel parse_noise(const json& j, const std::string& path) {
  const std::string kind = get_or<std::string>(j, "kind", "");
  try {
    if (kind == "white") return NoiseModel::white();
    if (kind == "ou") return NoiseModel::ou(get_or<double>(j, "theta", 0.0));
    if (kind == "car")
      return NoiseModel::car(get_or<std::vector<double>>(j, "theta", {}),
                             get_or<double>(j, "delta", 0.0));
  } catch (const std::invalid_argument& e) {
    bad_field(path, e.what());
  }
  bad_field(path + ".kind", "unknown noise kind '" + kind + "'");
}

}  // namespace

ExperimentConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

  ExperimentConfig cfg;
  const std::string mode = get_or<std::string>(j, "mode", "continuous");
  if (mode == "continuous") cfg.mode = Mode::Continuous;
  else if (mode == "discrete") cfg.mode = Mode::Discrete;
  else bad_field("mode", "must be 'continuous' or 'discrete'");

  if (j.contains("signals")) {
    if (!j["signals"].is_array()) bad_field("signals", "must be an array");
    for (std::size_t i = 0; i < j["signals"].size(); ++i)
      cfg.signals.push_back(
          parse_signal(j["signals"][i], "signals[" + std::to_string(i) + "]"));
  }
  if (j.contains("noises")) {
    if (!j["noises"].is_array()) bad_field("noises", "must be an array");
    for (std::size_t i = 0; i < j["noises"].size(); ++i)
      cfg.noises.push_back(
          parse_noise(j["noises"][i], "noises[" + std::to_string(i) + "]"));
  }

  cfg.kappa = get_or<double>(j, "kappa", 2.0);
  cfg.use_kappa_penalty = get_or<bool>(j, "use_kappa_penalty", false);
  cfg.n_values = get_or<std::vector<int>>(j, "n_values", {});
  const std::string prule = get_or<std::string>(j, "p_rule", "sqrt");
  if (prule == "sqrt") cfg.p_rule = PRule::SqrtOdd;
  else if (prule == "fixed") cfg.p_rule = PRule::Fixed;
  else if (prule == "cbrt") cfg.p_rule = PRule::CbrtOdd;
  else bad_field("p_rule", "must be 'sqrt', 'fixed' or 'cbrt'");
  cfg.p_fixed = get_or<int>(j, "p_fixed", 0);
  cfg.p_sim_override = get_or<int>(j, "p_sim_override", 0);

  if (j.contains("family")) {
    const json& f = j["family"];
    const std::string fkind = get_or<std::string>(f, "kind", "ordered");
    if (fkind == "ordered") {
      cfg.family.kind = FamilySpec::Kind::Ordered;
      cfg.family.d_max = get_or<int>(f, "d_max", 12);
    } else if (fkind == "general") {
      cfg.family.kind = FamilySpec::Kind::General;
      const auto models =
          get_or<std::vector<std::vector<int>>>(f, "models", {});
      cfg.family.weights = get_or<std::vector<double>>(f, "weights", {});
      if (cfg.family.weights.empty())
        cfg.family.weights.assign(models.size(), 1.0);
      for (std::size_t i = 0; i < models.size(); ++i) {
        Model m;
        m.indices = models[i];
        m.name = "g" + std::to_string(i);
        cfg.family.models.push_back(std::move(m));
      }
    } else {
      bad_field("family.kind", "must be 'ordered' or 'general'");
    }
  }

  cfg.model_indices = get_or<std::vector<int>>(j, "model_indices", {});
  const std::string est = get_or<std::string>(j, "estimator", "lse");
  if (est == "lse") cfg.estimator = EstimatorKind::Lse;
  else if (est == "shrunk") cfg.estimator = EstimatorKind::Shrunk;
  else bad_field("estimator", "must be 'lse' or 'shrunk'");

  cfg.replicates = get_or<int>(j, "replicates", 1000);
  cfg.seed = get_or<std::uint64_t>(j, "seed", 1);
  cfg.threads = get_or<int>(j, "threads", 1);
  cfg.beta = get_or<double>(j, "beta", 2.0);
  cfg.r = get_or<double>(j, "r", 1.0);
  cfg.nu = get_or<double>(j, "nu", 1.0);
  cfg.m_bumps = get_or<int>(j, "m_bumps", 0);
  cfg.epsilon = get_or<double>(j, "epsilon", 0.5);
  cfg.penalty_scale = get_or<double>(j, "penalty_scale", 1.0);
  cfg.lambda_star_override = get_or<double>(j, "lambda_star_override", 0.0);
  cfg.noise_free = get_or<bool>(j, "noise_free", false);
  cfg.allow_subcritical_p = get_or<bool>(j, "allow_subcritical_p", false);
  cfg.audit = get_or<bool>(j, "audit", false);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["mode"] = cfg.mode == Mode::Continuous ? "continuous" : "discrete";
  j["signals"] = json::array();
  for (const SignalSpec& s : cfg.signals) {
    json js;
    switch (s.kind) {
      case SignalSpec::Kind::Zero: js["kind"] = "zero"; break;
      case SignalSpec::Kind::Coeffs:
        js["kind"] = "coeffs";
        js["coeffs"] = s.coeffs;
        break;
      case SignalSpec::Kind::SobolevBoundary:
      case SignalSpec::Kind::SobolevRandom:
        js["kind"] = s.kind == SignalSpec::Kind::SobolevBoundary
                         ? "sobolev_boundary" : "sobolev_random";
        js["beta"] = s.beta;
        js["r"] = s.r;
        js["j_max"] = s.j_max;
        js["seed"] = s.seed;
        break;
      case SignalSpec::Kind::Bump:
        js["kind"] = "bump";
        js["m"] = s.bump.m;
        js["delta"] = s.bump.delta;
        js["z"] = s.bump.z;
        break;
    }
    j["signals"].push_back(js);
  }
  j["noises"] = json::array();
  for (const NoiseModel& m : cfg.noises) {
    json jn;
    switch (m.kind()) {
      case NoiseKind::White: jn["kind"] = "white"; break;
      case NoiseKind::Ou:
        jn["kind"] = "ou";
        jn["theta"] = m.theta()[0];
        break;
      case NoiseKind::Car:
        jn["kind"] = "car";
        jn["theta"] = m.theta();
        jn["delta"] = m.delta();
        break;
    }
    j["noises"].push_back(jn);
  }
  j["kappa"] = cfg.kappa;
  j["use_kappa_penalty"] = cfg.use_kappa_penalty;
  j["n_values"] = cfg.n_values;
  j["p_rule"] = cfg.p_rule == PRule::SqrtOdd   ? "sqrt"
                : cfg.p_rule == PRule::Fixed   ? "fixed"
                                               : "cbrt";
  j["p_fixed"] = cfg.p_fixed;
  j["p_sim_override"] = cfg.p_sim_override;
  if (cfg.family.kind == FamilySpec::Kind::Ordered) {
    j["family"] = {{"kind", "ordered"}, {"d_max", cfg.family.d_max}};
  } else {
    json models = json::array();
    for (const Model& m : cfg.family.models) models.push_back(m.indices);
    j["family"] = {{"kind", "general"},
                   {"models", models},
                   {"weights", cfg.family.weights}};
  }
  j["model_indices"] = cfg.model_indices;
  j["estimator"] = cfg.estimator == EstimatorKind::Lse ? "lse" : "shrunk";
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["beta"] = cfg.beta;
  j["r"] = cfg.r;
  j["nu"] = cfg.nu;
  j["m_bumps"] = cfg.m_bumps;
  j["epsilon"] = cfg.epsilon;
  j["penalty_scale"] = cfg.penalty_scale;
  j["lambda_star_override"] = cfg.lambda_star_override;
  j["noise_free"] = cfg.noise_free;
  j["allow_subcritical_p"] = cfg.allow_subcritical_p;
  j["audit"] = cfg.audit;
  return j.dump(2) + "\n";
}

std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides) {
  if (overrides.empty()) return json_text;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("override '" + ov + "': expected key=value");
    std::string key = ov.substr(0, eq);
    const std::string value = ov.substr(eq + 1);
    // "family.d_max" / "signals[0].beta" -> JSON pointer "/family/d_max" ...
    std::string ptr;
    for (char c : key) {
      if (c == '.') ptr += '/';
      else if (c == '[') ptr += '/';
      else if (c == ']') continue;
      else ptr += c;
    }
    json parsed;
    try {
      parsed = json::parse(value);
    } catch (const json::exception&) {
      parsed = value;  // bare strings stay strings
    }
    try {
      j[json::json_pointer("/" + ptr)] = parsed;
    } catch (const json::exception& e) {
      throw std::invalid_argument("override '" + ov + "': " + e.what());
    }
  }
  return j.dump();
}

}  // namespace perisel
