#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "perisel/noise.hpp"
#include "perisel/selection.hpp"

namespace perisel {

/// Declarative signal description; build() materializes the Signal.
struct SignalSpec {
  enum class Kind { Zero, Coeffs, SobolevBoundary, SobolevRandom, Bump };
  Kind kind = Kind::Zero;
  std::vector<double> coeffs;   // Coeffs
  double beta = 2.0;            // Sobolev*
  double r = 1.0;
  int j_max = 64;
  std::uint64_t seed = 1;       // SobolevRandom
  BumpFamilySpec bump;          // Bump

  std::string label() const;
  std::shared_ptr<Signal> build() const;
};

/// Family description. d_max = 0 in the ordered case means "auto": the
/// dimension grows like n^{1/(2 beta + 1)} so the best model stays interior
/// along an n-ladder (capped by p in discrete mode).
struct FamilySpec {
  enum class Kind { Ordered, General };
  Kind kind = Kind::Ordered;
  int d_max = 12;
  std::vector<Model> models;      // General
  std::vector<double> weights;

  ModelFamily build(int n, double beta, int index_cap) const;
};

/// Rule for the per-period sample count p in discrete mode.
enum class PRule {
  SqrtOdd,  // p = 2 floor(sqrt(n)) + 1, the critical-rate design
  Fixed,    // p = p_fixed
  CbrtOdd,  // smallest odd >= floor(n^{1/3}); deliberately subcritical
};

enum class StudyKind {
  Simulate, Estimate, Select, Risk, OracleCheck, RateStudy, LowerBound, Improve,
};

struct ExperimentConfig {
  Mode mode = Mode::Continuous;
  std::vector<SignalSpec> signals;
  std::vector<NoiseModel> noises;
  double kappa = 2.0;              // uniform noise-class constant
  bool use_kappa_penalty = false;  // penalty built from kappa, not lambda*
  std::vector<int> n_values;
  PRule p_rule = PRule::SqrtOdd;
  int p_fixed = 0;
  int p_sim_override = 0;          // continuous-mode grid override (odd)
  FamilySpec family;
  std::vector<int> model_indices;  // single-model ops (estimate)
  EstimatorKind estimator = EstimatorKind::Lse;
  int replicates = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  double beta = 2.0;
  double r = 1.0;
  double nu = 1.0;
  int m_bumps = 0;                 // 0 = floor(n^{1/(2 beta + 1)})
  double epsilon = 0.5;            // discrete lower-bound split parameter
  double penalty_scale = 1.0;      // negative-control knob
  double lambda_star_override = 0.0;
  bool noise_free = false;         // degenerate test hook: d_xi = 0
  bool allow_subcritical_p = false;
  bool audit = false;              // keep per-replicate selections
};

/// p per the rule; always odd.
int p_for(const ExperimentConfig& cfg, int n);
/// Continuous-mode simulation resolution: smallest odd p covering the family
/// (8 points per top oscillation) and the signal (above Nyquist), >= 33.
int p_sim_for(const ExperimentConfig& cfg, int n, int family_max_index,
              int signal_max_freq);

struct ValidationIssue {
  std::string path;     // e.g. "noises[1].theta"
  std::string message;  // rationale
};

/// Cross-field validation; empty result means valid for the given study.
std::vector<ValidationIssue> validate_config(const ExperimentConfig& cfg,
                                             StudyKind study);
/// Throws std::invalid_argument joining all issues (used as the op guard).
void require_valid(const ExperimentConfig& cfg, StudyKind study);

ExperimentConfig config_from_json(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);  // resolved, pretty

/// Applies dotted-path overrides ("replicates=4000", "family.d_max=8",
/// "signals[0].beta=1.5") on the JSON representation before parsing.
std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides);

}  // namespace perisel
