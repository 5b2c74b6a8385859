#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "autog/graph.hpp"

namespace autog {

enum class WeightScheme { raw_sum, degree_normalized };

// One realization of the field: L is N x p row-major, A and Y length N,
// all entries in {0,1}.
struct FieldSample {
  int n = 0;
  int p = 0;
  std::vector<std::uint8_t> L;  // L[i*p + k]
  std::vector<std::uint8_t> A;
  std::vector<std::uint8_t> Y;

  FieldSample() = default;
  FieldSample(int n_, int p_)
      : n(n_), p(p_), L(static_cast<size_t>(n_) * p_, 0), A(n_, 0), Y(n_, 0) {}
  std::uint8_t l(int i, int k) const { return L[static_cast<size_t>(i) * p + k]; }
  void set_l(int i, int k, std::uint8_t v) { L[static_cast<size_t>(i) * p + k] = v; }
};

// Covariate-field parameters: intercepts tau (length p), within-unit pair
// coefficients rho (symmetric, zero diagonal), cross-unit coefficients nu
// (symmetric). Stored row-major p x p.
struct CovariateParams {
  int p = 0;
  std::vector<double> tau;
  std::vector<double> rho;
  std::vector<double> nu;

  CovariateParams() = default;
  CovariateParams(int p_, std::vector<double> tau_, std::vector<double> rho_,
                  std::vector<double> nu_);
  double rho_at(int k, int s) const { return rho[static_cast<size_t>(k) * p + s]; }
  double nu_at(int k, int s) const { return nu[static_cast<size_t>(k) * p + s]; }
};

// Treatment model coefficients, layout:
//   gamma[0]                intercept
//   gamma[1+2k], gamma[2+2k] own L_k, neighbor L_k aggregate (k = 0..p-1)
//   gamma[2p+1]             neighbor treatment aggregate
struct TreatmentParams {
  int p = 0;
  std::vector<double> gamma;

  TreatmentParams() = default;
  TreatmentParams(int p_, std::vector<double> gamma_) : p(p_), gamma(std::move(gamma_)) {
    if (static_cast<int>(gamma.size()) != 2 * p + 2)
      throw std::invalid_argument("gamma must have length 2p+2");
  }
};

struct OutcomeParams {
  int p = 0;
  double beta0 = 0.0;
  double beta_a = 0.0;
  double beta_a_nbr = 0.0;
  std::vector<double> beta_l;
  std::vector<double> beta_l_nbr;
  double theta = 0.0;
};

struct ModelParams {
  CovariateParams tau_l;
  TreatmentParams tau_a;
  OutcomeParams tau_y;
  WeightScheme weights = WeightScheme::raw_sum;
};

// Pair weight w_{ij} realized from the scheme: raw_sum -> 1,
// degree_normalized -> 1/|N_i| (0 for isolated units).
double pair_weight(const NetworkGraph& g, int i, WeightScheme w);

// Full conditionals (Gibbs factors), all returning Pr(variable = 1 | blanket).
double cond_prob_Y(const NetworkGraph& g, int i, const FieldSample& f,
                   const OutcomeParams& params, WeightScheme w,
                   int a_i_override = -1);
double cond_prob_L(const NetworkGraph& g, int i, int k, const FieldSample& f,
                   const CovariateParams& params, WeightScheme w);
double cond_prob_A(const NetworkGraph& g, int i, const FieldSample& f,
                   const TreatmentParams& params, WeightScheme w);

// Unnormalized log-densities of the full fields. Pair terms use symmetrized
// weights (w_ij + w_ji)/2 so the joint is well defined; under raw_sum this
// coheres exactly with the conditionals above.
double energy_Y(const NetworkGraph& g, const FieldSample& f,
                const OutcomeParams& params, WeightScheme w);
double energy_L(const NetworkGraph& g, const FieldSample& f,
                const CovariateParams& params, WeightScheme w);

// Built-in simulation truth used by the study harness and CLI defaults (p=3).
ModelParams sim_defaults();

void check_dims(const NetworkGraph& g, const FieldSample& f);

}  // namespace autog
