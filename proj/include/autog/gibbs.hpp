#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "autog/model.hpp"

namespace autog {

struct ChainSettings {
  int total_sweeps = 4000;
  int burn_in = 1000;
  int thin = 3;
  std::uint64_t seed = 0;
  enum class Init { all_zero, independent_bernoulli_half, user_supplied };
  Init init = Init::independent_bernoulli_half;
  FieldSample init_state;
  bool random_scan = false;

  void validate() const;
  int retained_count() const { return (total_sweeps - burn_in) / thin; }
};

struct TreatmentMode {
  enum class Kind { fixed, policy, model };
  Kind kind = Kind::fixed;
  std::vector<std::uint8_t> a;   // fixed
  double alpha = 0.0;            // policy
  bool redraw_each_replicate = true;
  TreatmentParams tau_a;         // model

  static TreatmentMode Fixed(std::vector<std::uint8_t> a_);
  static TreatmentMode Policy(double alpha_, bool redraw = true);
  static TreatmentMode Model(TreatmentParams t);
};

// Single-site systematic-scan sampler over (L, A, Y) with flat state arrays.
// One sweep updates, for each unit in index order, the covariate coordinates
// L_{k,i} (k in order), then A_i when a treatment model is attached, then Y_i.
class Sampler {
 public:
  Sampler(const NetworkGraph& g, const CovariateParams& pl,
          const OutcomeParams& py, WeightScheme w);

  void set_treatment(const std::vector<std::uint8_t>& a);
  void init_state(ChainSettings::Init init, const FieldSample* user,
                  std::mt19937_64& rng);
  void sweep(std::mt19937_64& rng, const TreatmentParams* treat_model = nullptr,
             bool random_scan = false);
  // block-restricted sweeps, for sampling one field while the others are held
  void sweep_L(std::mt19937_64& rng, bool random_scan = false);
  void sweep_A(std::mt19937_64& rng, const TreatmentParams& t,
               bool random_scan = false);
  void sweep_Y(std::mt19937_64& rng, bool random_scan = false);

  double prob_Y(int i, int a_override = -1) const;
  double prob_L(int i, int k) const;
  double prob_A(int i, const TreatmentParams& t) const;

  const FieldSample& state() const { return f_; }
  FieldSample& mutable_state() { return f_; }
  int n() const { return n_; }
  int p() const { return p_; }

 private:
  const NetworkGraph& g_;
  int n_, p_;
  CovariateParams pl_;
  OutcomeParams py_;
  std::vector<int> adj_off_, adj_idx_;  // CSR adjacency
  std::vector<double> wi_;              // per-unit pair weight
  FieldSample f_;
};

// Runs a chain and returns retained, thinned post-burn-in snapshots.
std::vector<FieldSample> run_chain(const NetworkGraph& g,
                                   const CovariateParams& pl,
                                   const OutcomeParams& py,
                                   const TreatmentMode& mode,
                                   const ChainSettings& settings,
                                   WeightScheme w = WeightScheme::raw_sum);

// Per-unit Monte Carlo counterfactual means under a fixed intervention a:
// burn m_star sweeps, then average over K retained sweeps (sampled Y_i, or
// the conditional mean when rao_blackwell is set).
std::vector<double> estimate_beta(const NetworkGraph& g,
                                  const CovariateParams& pl,
                                  const OutcomeParams& py,
                                  const std::vector<std::uint8_t>& a, int K,
                                  int m_star, std::uint64_t seed,
                                  bool rao_blackwell = false,
                                  WeightScheme w = WeightScheme::raw_sum);

void save_snapshots_csv(const std::vector<FieldSample>& snaps, int thin,
                        int burn_in, const std::string& path);

}  // namespace autog
