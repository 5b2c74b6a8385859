#include "autog/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace autog {
namespace oracle {

namespace {

// normalize exp(energies) with log-sum-exp, long double accumulation
std::vector<double> normalize(const std::vector<long double>& energies) {
  long double emax = energies[0];
  for (long double e : energies) emax = std::max(emax, e);
  long double z = 0.0L;
  for (long double e : energies) z += std::exp(e - emax);
  std::vector<double> probs(energies.size());
  for (size_t m = 0; m < energies.size(); ++m)
    probs[m] = static_cast<double>(std::exp(energies[m] - emax) / z);
  return probs;
}

void check_cap(int bits, int cap_bits) {
  if (bits > cap_bits) throw std::invalid_argument("enumeration cap exceeded");
}

}  // namespace

ExactDistribution exact_joint_Y(const NetworkGraph& g, const FieldSample& al,
                                const OutcomeParams& py, int cap_bits) {
  const int n = g.n_units();
  check_cap(n, cap_bits);
  check_dims(g, al);
  FieldSample f = al;
  std::vector<long double> energies(size_t(1) << n);
  for (size_t m = 0; m < energies.size(); ++m) {
    for (int i = 0; i < n; ++i) f.Y[i] = (m >> i) & 1u;
    energies[m] = energy_Y(g, f, py, WeightScheme::raw_sum);
  }
  return ExactDistribution{n, normalize(energies)};
}

ExactDistribution exact_joint_L(const NetworkGraph& g, int p,
                                const CovariateParams& pl, int cap_bits) {
  const int n = g.n_units();
  const int bits = n * p;
  check_cap(bits, cap_bits);
  FieldSample f(n, p);
  std::vector<long double> energies(size_t(1) << bits);
  for (size_t m = 0; m < energies.size(); ++m) {
    for (int b = 0; b < bits; ++b) f.L[b] = (m >> b) & 1u;
    energies[m] = energy_L(g, f, pl, WeightScheme::raw_sum);
  }
  return ExactDistribution{bits, normalize(energies)};
}

std::vector<double> exact_beta(const NetworkGraph& g,
                               const std::vector<std::uint8_t>& a,
                               const OutcomeParams& py, const CovariateParams& pl,
                               int cap_bits) {
  const int n = g.n_units();
  const int p = pl.p;
  if (static_cast<int>(a.size()) != n) throw std::invalid_argument("bad a length");
  const auto ljoint = exact_joint_L(g, p, pl, cap_bits);
  std::vector<double> beta(n, 0.0);
  FieldSample f(n, p);
  f.A = a;
  for (size_t lm = 0; lm < ljoint.probs.size(); ++lm) {
    const double fl = ljoint.probs[lm];
    if (fl == 0.0) continue;
    for (int b = 0; b < n * p; ++b) f.L[b] = (lm >> b) & 1u;
    const auto yjoint = exact_joint_Y(g, f, py, cap_bits);
    for (size_t ym = 0; ym < yjoint.probs.size(); ++ym) {
      const double w = fl * yjoint.probs[ym];
      for (int i = 0; i < n; ++i)
        if ((ym >> i) & 1u) beta[i] += w;
    }
  }
  return beta;
}

ExactEffects exact_effects(const NetworkGraph& g, double alpha,
                           const OutcomeParams& py, const CovariateParams& pl,
                           int cap_bits) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha out of range");
  const int n = g.n_units();
  check_cap(n, cap_bits);
  // psi[a_mask][i] = E(Y_i(a)), marginal over L
  const size_t na = size_t(1) << n;
  std::vector<std::vector<double>> psi(na);
  std::vector<std::uint8_t> a(n);
  for (size_t m = 0; m < na; ++m) {
    for (int i = 0; i < n; ++i) a[i] = (m >> i) & 1u;
    psi[m] = exact_beta(g, a, py, pl, cap_bits);
  }
  ExactEffects out;
  for (int i = 0; i < n; ++i) {
    double b = 0.0, de = 0.0, sp0 = 0.0;
    for (size_t m = 0; m < na; ++m) {
      if ((m >> i) & 1u) continue;  // enumerate a_{-i} with slot i clear
      double pi = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        pi *= ((m >> j) & 1u) ? alpha : 1.0 - alpha;
      }
      const double psi0 = psi[m][i];
      const double psi1 = psi[m | (size_t(1) << i)][i];
      b += pi * (alpha * psi1 + (1.0 - alpha) * psi0);
      de += pi * (psi1 - psi0);
      sp0 += pi * psi0;
    }
    out.beta_alpha += b;
    out.direct += de;
    out.spillover += sp0 - psi[0][i];
  }
  out.beta_alpha /= n;
  out.direct /= n;
  out.spillover /= n;
  return out;
}

}  // namespace oracle
}  // namespace autog
