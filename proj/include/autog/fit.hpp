#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "autog/model.hpp"

namespace autog {

enum class CovarianceForm { outer_product, neg_hessian };

struct FitOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
  double ridge = 1e-10;
  std::vector<double> init;  // empty = zero vector
  CovarianceForm covariance_form = CovarianceForm::outer_product;
};

struct FitResult {
  Eigen::VectorXd estimate;
  Eigen::MatrixXd covariance;  // already scaled: Cov(tau_hat) estimate
  bool has_covariance = false;
  double objective_value = 0.0;
  bool converged = false;
  int iterations = 0;
  int effective_n = 0;
  std::string diagnostic;
};

// A Bernoulli-logistic objective: rows (x, y) with a unit id per row so that
// unit-level scores can be formed for coding covariance matrices.
struct LogisticDesign {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<int> unit;
};

double logistic_loglik(const LogisticDesign& d, const Eigen::VectorXd& beta);
Eigen::VectorXd logistic_score(const LogisticDesign& d, const Eigen::VectorXd& beta);

LogisticDesign build_outcome_design(const NetworkGraph& g, const FieldSample& f,
                                    const std::vector<int>& units, WeightScheme w);
LogisticDesign build_covariate_design(const NetworkGraph& g, const FieldSample& f,
                                      const std::vector<int>& units, WeightScheme w);
LogisticDesign build_treatment_design(const NetworkGraph& g, const FieldSample& f,
                                      const std::vector<int>& units, WeightScheme w);

// Parameter vector layouts used by the designs above.
//   outcome:    [beta0, beta_a, beta_a_nbr, beta_l(1..p), beta_l_nbr(1..p), theta]
//   covariates: [tau(1..p), rho_{ks} k<s lex, nu_{ks} k<=s lex]
//   treatment:  gamma as stored
Eigen::VectorXd outcome_to_vector(const OutcomeParams& p);
OutcomeParams outcome_from_vector(int p, const Eigen::VectorXd& v);
Eigen::VectorXd covariates_to_vector(const CovariateParams& p);
CovariateParams covariates_from_vector(int p, const Eigen::VectorXd& v);

FitResult fit_coding_outcome(const NetworkGraph& g, const FieldSample& f,
                             const StableSet& s, const FitOptions& opts = {},
                             WeightScheme w = WeightScheme::raw_sum);
FitResult fit_coding_covariates(const NetworkGraph& g, const FieldSample& f,
                                const StableSet& s, const FitOptions& opts = {},
                                WeightScheme w = WeightScheme::raw_sum);
FitResult fit_pl_outcome(const NetworkGraph& g, const FieldSample& f,
                         const FitOptions& opts = {},
                         WeightScheme w = WeightScheme::raw_sum);
FitResult fit_pl_covariates(const NetworkGraph& g, const FieldSample& f,
                            const FitOptions& opts = {},
                            WeightScheme w = WeightScheme::raw_sum);
FitResult fit_treatment(const NetworkGraph& g, const FieldSample& f,
                        const FitOptions& opts = {},
                        WeightScheme w = WeightScheme::raw_sum);

void save_fit_json(const FitResult& r, const std::string& model_name, int p,
                   const std::string& path);
FitResult load_fit_json(const std::string& path, std::string* model_name,
                        int* p);

}  // namespace autog
