#pragma once

#include <vector>

#include "autog/model.hpp"

namespace autog {
namespace oracle {

// Exact distribution over all binary configurations of a field, indexed by the
// bit mask of the configuration (bit b = variable b).
struct ExactDistribution {
  int n_bits = 0;
  std::vector<double> probs;  // size 2^n_bits, sums to 1
};

inline constexpr int kDefaultCapBits = 12;

// Joint of Y given (a, l): probabilities proportional to exp(energy_Y).
// Bit i of the mask is Y_i. Requires raw_sum weights and N <= cap bits.
ExactDistribution exact_joint_Y(const NetworkGraph& g, const FieldSample& al,
                                const OutcomeParams& py,
                                int cap_bits = kDefaultCapBits);

// Joint of the covariate field: bit (i*p + k) of the mask is L_{k,i}.
ExactDistribution exact_joint_L(const NetworkGraph& g, int p,
                                const CovariateParams& pl,
                                int cap_bits = kDefaultCapBits);

// Exact counterfactual means E(Y_i) under intervention a, marginalizing L.
std::vector<double> exact_beta(const NetworkGraph& g,
                               const std::vector<std::uint8_t>& a,
                               const OutcomeParams& py, const CovariateParams& pl,
                               int cap_bits = kDefaultCapBits);

struct ExactEffects {
  double beta_alpha = 0.0;
  double direct = 0.0;
  double spillover = 0.0;
};

// Allocation-averaged network effects with independent Bernoulli(alpha)
// treatment draws, by full enumeration over (a, l, y).
ExactEffects exact_effects(const NetworkGraph& g, double alpha,
                           const OutcomeParams& py, const CovariateParams& pl,
                           int cap_bits = kDefaultCapBits);

}  // namespace oracle
}  // namespace autog
