#include "autog/model.hpp"

#include <cmath>

#include "autog/util.hpp"

namespace autog {

CovariateParams::CovariateParams(int p_, std::vector<double> tau_,
                                 std::vector<double> rho_, std::vector<double> nu_)
    : p(p_), tau(std::move(tau_)), rho(std::move(rho_)), nu(std::move(nu_)) {
  const size_t pp = static_cast<size_t>(p) * p;
  if (tau.size() != static_cast<size_t>(p) || rho.size() != pp || nu.size() != pp)
    throw std::invalid_argument("CovariateParams: bad dimensions");
  for (int k = 0; k < p; ++k) {
    if (rho_at(k, k) != 0.0)
      throw std::invalid_argument("rho must have zero diagonal");
    for (int s = 0; s < p; ++s) {
      if (rho_at(k, s) != rho_at(s, k))
        throw std::invalid_argument("rho must be symmetric");
      if (nu_at(k, s) != nu_at(s, k))
        throw std::invalid_argument("nu must be symmetric");
    }
  }
}

void check_dims(const NetworkGraph& g, const FieldSample& f) {
  if (f.n != g.n_units()) throw std::invalid_argument("field/graph size mismatch");
}

double pair_weight(const NetworkGraph& g, int i, WeightScheme w) {
  if (w == WeightScheme::raw_sum) return 1.0;
  const int d = g.degree(i);
  return d == 0 ? 0.0 : 1.0 / d;
}

double cond_prob_Y(const NetworkGraph& g, int i, const FieldSample& f,
                   const OutcomeParams& params, WeightScheme w,
                   int a_i_override) {
  check_dims(g, f);
  if (params.p != f.p) throw std::invalid_argument("outcome params dimension mismatch");
  const double wi = pair_weight(g, i, w);
  const int ai = a_i_override >= 0 ? a_i_override : f.A[i];
  double lp = params.beta0 + params.beta_a * ai;
  for (int k = 0; k < f.p; ++k) lp += params.beta_l[k] * f.l(i, k);
  double sa = 0.0, sy = 0.0;
  std::vector<double> sl(f.p, 0.0);
  for (int j : g.neighbors(i)) {
    sa += f.A[j];
    sy += f.Y[j];
    for (int k = 0; k < f.p; ++k) sl[k] += f.l(j, k);
  }
  lp += params.beta_a_nbr * wi * sa + params.theta * wi * sy;
  for (int k = 0; k < f.p; ++k) lp += params.beta_l_nbr[k] * wi * sl[k];
  return expit(lp);
}

double cond_prob_L(const NetworkGraph& g, int i, int k, const FieldSample& f,
                   const CovariateParams& params, WeightScheme w) {
  check_dims(g, f);
  if (params.p != f.p) throw std::invalid_argument("covariate params dimension mismatch");
  if (k < 0 || k >= f.p) throw std::out_of_range("covariate index out of range");
  const double wi = pair_weight(g, i, w);
  double lp = params.tau[k];
  for (int s = 0; s < f.p; ++s)
    if (s != k) lp += params.rho_at(k, s) * f.l(i, s);
  std::vector<double> sl(f.p, 0.0);
  for (int j : g.neighbors(i))
    for (int s = 0; s < f.p; ++s) sl[s] += f.l(j, s);
  for (int s = 0; s < f.p; ++s) lp += params.nu_at(k, s) * wi * sl[s];
  return expit(lp);
}

double cond_prob_A(const NetworkGraph& g, int i, const FieldSample& f,
                   const TreatmentParams& params, WeightScheme w) {
  check_dims(g, f);
  if (params.p != f.p) throw std::invalid_argument("treatment params dimension mismatch");
  const double wi = pair_weight(g, i, w);
  double lp = params.gamma[0];
  double sa = 0.0;
  std::vector<double> sl(f.p, 0.0);
  for (int j : g.neighbors(i)) {
    sa += f.A[j];
    for (int k = 0; k < f.p; ++k) sl[k] += f.l(j, k);
  }
  for (int k = 0; k < f.p; ++k)
    lp += params.gamma[1 + 2 * k] * f.l(i, k) + params.gamma[2 + 2 * k] * wi * sl[k];
  lp += params.gamma[2 * f.p + 1] * wi * sa;
  return expit(lp);
}

double energy_Y(const NetworkGraph& g, const FieldSample& f,
                const OutcomeParams& params, WeightScheme w) {
  check_dims(g, f);
  double u = 0.0;
  for (int i = 0; i < f.n; ++i) {
    if (!f.Y[i]) continue;
    const double wi = pair_weight(g, i, w);
    double gi = params.beta0 + params.beta_a * f.A[i];
    double sa = 0.0;
    std::vector<double> sl(f.p, 0.0);
    for (int j : g.neighbors(i)) {
      sa += f.A[j];
      for (int k = 0; k < f.p; ++k) sl[k] += f.l(j, k);
    }
    gi += params.beta_a_nbr * wi * sa;
    for (int k = 0; k < f.p; ++k)
      gi += params.beta_l[k] * f.l(i, k) + params.beta_l_nbr[k] * wi * sl[k];
    u += gi;
  }
  for (auto [i, j] : g.edges()) {
    if (f.Y[i] && f.Y[j]) {
      const double wij = 0.5 * (pair_weight(g, i, w) + pair_weight(g, j, w));
      u += params.theta * wij;
    }
  }
  return u;
}

double energy_L(const NetworkGraph& g, const FieldSample& f,
                const CovariateParams& params, WeightScheme w) {
  check_dims(g, f);
  double u = 0.0;
  for (int i = 0; i < f.n; ++i) {
    for (int k = 0; k < f.p; ++k) {
      if (!f.l(i, k)) continue;
      u += params.tau[k];
      for (int s = k + 1; s < f.p; ++s)
        if (f.l(i, s)) u += params.rho_at(k, s);
    }
  }
  for (auto [i, j] : g.edges()) {
    const double wij = 0.5 * (pair_weight(g, i, w) + pair_weight(g, j, w));
    for (int k = 0; k < f.p; ++k) {
      if (!f.l(i, k)) continue;
      for (int s = 0; s < f.p; ++s)
        if (f.l(j, s)) u += params.nu_at(k, s) * wij;
    }
  }
  return u;
}

ModelParams sim_defaults() {
  ModelParams m;
  m.tau_l = CovariateParams(
      3, {-1.0, 0.50, -0.50},
      {0.0, 0.1, 0.2,
       0.1, 0.0, 0.1,
       0.2, 0.1, 0.0},
      {0.1, 0.0, 0.0,
       0.0, 0.1, 0.0,
       0.0, 0.0, 0.1});
  m.tau_a = TreatmentParams(3, {-1.00, 0.50, 0.10, 0.20, 0.05, 0.25, -0.08, 0.30});
  m.tau_y.p = 3;
  m.tau_y.beta0 = -0.30;
  m.tau_y.beta_a = -0.60;
  m.tau_y.beta_a_nbr = -0.20;
  m.tau_y.beta_l = {-0.20, -0.10, 0.40};
  m.tau_y.beta_l_nbr = {-0.05, -0.01, 0.01};
  m.tau_y.theta = 0.20;
  m.weights = WeightScheme::raw_sum;
  return m;
}

}  // namespace autog
