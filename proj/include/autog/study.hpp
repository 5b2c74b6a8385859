#pragma once

#include <array>
#include <optional>
#include <string>

#include "autog/effects.hpp"

namespace autog {

// One simulation-study run: generate (or load) a network, compute instance
// truth at the true parameters, then replicate simulate -> fit -> effects
// pipelines and aggregate bias / variance / coverage per endpoint.
struct StudyConfig {
  // network: either an edge-list path or a random degree-constrained graph
  std::string graph_path;
  int n = 800;
  int degree_min = 2;
  int degree_max = 4;
  // analysis graph perturbation: fraction of edges hidden from the analyst
  double missing_edge_fraction = 0.0;

  ModelParams truth = sim_defaults();
  bool sharp_null = false;  // zero the treatment terms of the outcome model

  int replicates = 100;  // S
  ChainSettings sim;     // data-synthesis chain per replicate
  double alpha = 0.7;

  bool run_coding = true;
  bool run_pl = true;
  bool with_uncertainty = true;  // bootstrap CIs for the coding estimator
  UncertaintyPlan uncertainty;
  BootstrapSettings boot;
  EffectEval eval;        // per-replicate effect evaluation
  int truth_draws = 600;  // allocation draws for the instance-truth run
  EffectMode mode = EffectMode::rao_blackwell;

  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  int stable_restarts = 64;

  StudyConfig() {
    sim.total_sweeps = 4000;
    sim.burn_in = 1000;
    sim.thin = 3;
  }
};

struct EndpointStats {
  double truth = 0.0;
  double mean_bias = 0.0;
  double mc_variance = 0.0;
  double mean_robust_variance = 0.0;
  double coverage = 0.0;
};

struct EstimatorReport {
  std::array<EndpointStats, 3> endpoints{};  // beta_alpha, direct, spillover
  int excluded = 0;
  bool has_coverage = false;
};

struct StudyReport {
  int n = 0;
  int n_edges = 0;
  int max_degree = 0;
  int stable_set_size = 0;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::array<double, 3> truth{};
  std::optional<EstimatorReport> coding;
  std::optional<EstimatorReport> pl;
};

StudyReport run_study(const StudyConfig& cfg);

std::string study_report_text(const StudyReport& r);
std::string study_report_json(const StudyReport& r);

// Canonical hash of the configuration, embedded in reports.
std::string config_hash(const StudyConfig& cfg);

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace autog
