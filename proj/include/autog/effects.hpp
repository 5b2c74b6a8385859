#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

#include "autog/fit.hpp"
#include "autog/gibbs.hpp"
#include "autog/model.hpp"

namespace autog {

struct AllocationPolicy {
  enum class Kind { bernoulli, all_treated, none_treated };
  Kind kind = Kind::bernoulli;
  double alpha = 0.5;

  static AllocationPolicy Bernoulli(double a);
  static AllocationPolicy AllTreated() { return {Kind::all_treated, 1.0}; }
  static AllocationPolicy NoneTreated() { return {Kind::none_treated, 0.0}; }
};

enum class EffectMode { rao_blackwell, exact_clamp };

// Monte Carlo evaluation settings for one effects computation: R allocation
// draws, each scored over K retained sweeps after m_star burn-in sweeps.
struct EffectEval {
  int R = 20;
  int K = 50;
  int m_star = 10;
  std::uint64_t seed = 0;
  bool include_isolated = true;
};

enum class CiType { wald, quantile };

struct UncertaintyPlan {
  enum class Method { parametric_bootstrap, normal_resample };
  Method method = Method::parametric_bootstrap;
  int replicates = 200;  // B or J
  std::uint64_t seed = 0;
  CiType ci_type = CiType::wald;
};

struct EffectEstimates {
  double beta_alpha = 0.0;
  double direct = 0.0;
  double spillover = 0.0;
  bool has_uncertainty = false;
  std::array<double, 3> se{};            // order: beta_alpha, direct, spillover
  std::array<std::array<double, 2>, 3> ci95{};
  int replicates = 0;      // uncertainty replicates retained
  int failed_replicates = 0;
  EffectMode mode = EffectMode::rao_blackwell;
};

// Point estimates of beta(alpha), DE(alpha), IE(alpha) by Gibbs-sampled
// g-computation. rao_blackwell scores single-coordinate treatment swaps
// against the running chain; exact_clamp runs dedicated per-unit chains with
// the unit's own treatment clamped (unbiased, O(N) costlier). Both arms of
// every contrast share a seed stream.
EffectEstimates estimate_effects(const NetworkGraph& g, const OutcomeParams& py,
                                 const CovariateParams& pl,
                                 const AllocationPolicy& policy,
                                 const EffectEval& eval,
                                 EffectMode mode = EffectMode::rao_blackwell,
                                 WeightScheme w = WeightScheme::raw_sum);

enum class Estimator { coding, pl };

struct BootstrapSettings {
  int regen_sweeps = 300;  // Gibbs sweeps to regenerate (L, Y) per replicate
  int regen_burn_in = 299;
};

// Parametric bootstrap: regenerate (L, Y) at the fitted parameters holding the
// observed treatment vector fixed, refit with the same estimator, recompute
// effects; SE/CI from the replicate distribution. Aborts if more than 20% of
// replicate fits fail.
EffectEstimates bootstrap_effects(const NetworkGraph& g, const FieldSample& data,
                                  const OutcomeParams& tau_y_hat,
                                  const CovariateParams& tau_l_hat,
                                  Estimator estimator, const StableSet& s,
                                  const AllocationPolicy& policy,
                                  const UncertaintyPlan& plan,
                                  const BootstrapSettings& boot,
                                  const EffectEval& eval,
                                  EffectMode mode = EffectMode::rao_blackwell,
                                  WeightScheme w = WeightScheme::raw_sum);

// Normal-resampling alternative: draw parameter vectors from the fitted
// coding covariances, recompute effects per draw, summarize.
EffectEstimates normal_resample_effects(const NetworkGraph& g,
                                        const OutcomeParams& tau_y_hat,
                                        const Eigen::MatrixXd& cov_y,
                                        const CovariateParams& tau_l_hat,
                                        const Eigen::MatrixXd& cov_l,
                                        const AllocationPolicy& policy,
                                        const UncertaintyPlan& plan,
                                        const EffectEval& eval,
                                        EffectMode mode = EffectMode::rao_blackwell,
                                        WeightScheme w = WeightScheme::raw_sum);

std::string effects_report_text(const EffectEstimates& e,
                                const std::optional<std::array<double, 3>>& truth);
std::string effects_report_json(const EffectEstimates& e,
                                const std::optional<std::array<double, 3>>& truth);

}  // namespace autog
