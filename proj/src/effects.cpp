#include "autog/effects.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "autog/util.hpp"
#include "json.hpp"

namespace autog {

namespace {

constexpr double kZ95 = 1.959963984540054;

inline double unit_uniform(std::mt19937_64& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}

std::vector<std::uint8_t> draw_allocation(const AllocationPolicy& policy, int n,
                                          std::mt19937_64& rng) {
  std::vector<std::uint8_t> a(n, 0);
  switch (policy.kind) {
    case AllocationPolicy::Kind::bernoulli:
      for (auto& v : a) v = unit_uniform(rng) < policy.alpha;
      break;
    case AllocationPolicy::Kind::all_treated:
      std::fill(a.begin(), a.end(), 1);
      break;
    case AllocationPolicy::Kind::none_treated:
      break;
  }
  return a;
}

// run a chain under fixed a; call score(sampler) after each retained sweep
template <typename ScoreFn>
void scan_chain(Sampler& s, const std::vector<std::uint8_t>& a,
                std::uint64_t seed, int m_star, int K, ScoreFn&& score) {
  std::mt19937_64 rng(seed);
  s.set_treatment(a);
  s.init_state(ChainSettings::Init::independent_bernoulli_half, nullptr, rng);
  for (int m = 0; m < m_star; ++m) s.sweep(rng);
  for (int k = 0; k < K; ++k) {
    s.sweep(rng);
    score(s);
  }
}

struct Accum {
  double beta = 0.0, de = 0.0, sp = 0.0, sp_base = 0.0;
  long long count = 0;
};

std::vector<int> effect_units(const NetworkGraph& g, bool include_isolated) {
  std::vector<int> u;
  for (int i = 0; i < g.n_units(); ++i)
    if (include_isolated || g.degree(i) > 0) u.push_back(i);
  if (u.empty()) throw std::invalid_argument("no units to report effects over");
  return u;
}

void summarize(EffectEstimates& out, const std::vector<std::array<double, 3>>& reps,
               const std::array<double, 3>& point, CiType ci_type) {
  const int m = static_cast<int>(reps.size());
  if (m < 2) throw std::invalid_argument("need at least 2 uncertainty replicates");
  for (int e = 0; e < 3; ++e) {
    double mean = 0.0;
    for (const auto& r : reps) mean += r[e];
    mean /= m;
    double ss = 0.0;
    for (const auto& r : reps) ss += (r[e] - mean) * (r[e] - mean);
    out.se[e] = std::sqrt(ss / (m - 1));
    if (ci_type == CiType::wald) {
      out.ci95[e] = {point[e] - kZ95 * out.se[e], point[e] + kZ95 * out.se[e]};
    } else {
      std::vector<double> v(m);
      for (int r = 0; r < m; ++r) v[r] = reps[r][e];
      std::sort(v.begin(), v.end());
      auto q = [&](double p) {
        const double idx = p * (m - 1);
        const int lo = static_cast<int>(idx);
        const int hi = std::min(lo + 1, m - 1);
        return v[lo] + (idx - lo) * (v[hi] - v[lo]);
      };
      out.ci95[e] = {q(0.025), q(0.975)};
    }
  }
  out.has_uncertainty = true;
  out.replicates = m;
}

}  // namespace

AllocationPolicy AllocationPolicy::Bernoulli(double a) {
  if (a < 0.0 || a > 1.0) throw std::invalid_argument("alpha must lie in [0,1]");
  return {Kind::bernoulli, a};
}

EffectEstimates estimate_effects(const NetworkGraph& g, const OutcomeParams& py,
                                 const CovariateParams& pl,
                                 const AllocationPolicy& policy,
                                 const EffectEval& eval, EffectMode mode,
                                 WeightScheme w) {
  if (eval.R < 1 || eval.K < 1 || eval.m_star < 0)
    throw std::invalid_argument("invalid effect evaluation settings");
  const int n = g.n_units();
  const auto units = effect_units(g, eval.include_isolated);
  const std::vector<std::uint8_t> zeros(n, 0);
  Sampler s(g, pl, py, w);
  Accum acc;
  std::mt19937_64 policy_rng(seed_mix(eval.seed, 0x0a11c0de));
  for (int r = 0; r < eval.R; ++r) {
    const auto a = draw_allocation(policy, n, policy_rng);
    const std::uint64_t chain_seed = seed_mix(eval.seed, r);
    if (mode == EffectMode::rao_blackwell) {
      scan_chain(s, a, chain_seed, eval.m_star, eval.K, [&](const Sampler& sm) {
        for (int i : units) {
          const double p1 = sm.prob_Y(i, 1);
          const double p0 = sm.prob_Y(i, 0);
          acc.beta += a[i] ? p1 : p0;
          acc.de += p1 - p0;
          acc.sp += p0;
        }
      });
      // baseline arm shares the chain seed (common random numbers)
      scan_chain(s, zeros, chain_seed, eval.m_star, eval.K, [&](const Sampler& sm) {
        for (int i : units) acc.sp_base += sm.prob_Y(i, 0);
      });
    } else {
      scan_chain(s, a, chain_seed, eval.m_star, eval.K, [&](const Sampler& sm) {
        for (int i : units) acc.beta += sm.prob_Y(i);
      });
      for (int i : units) {
        const std::uint64_t unit_seed = seed_mix(eval.seed, r, i);
        auto arm = a;
        double psi1 = 0.0, psi0 = 0.0, psi00 = 0.0;
        arm[i] = 1;
        scan_chain(s, arm, unit_seed, eval.m_star, eval.K,
                   [&](const Sampler& sm) { psi1 += sm.prob_Y(i); });
        arm[i] = 0;
        scan_chain(s, arm, unit_seed, eval.m_star, eval.K,
                   [&](const Sampler& sm) { psi0 += sm.prob_Y(i); });
        scan_chain(s, zeros, unit_seed, eval.m_star, eval.K,
                   [&](const Sampler& sm) { psi00 += sm.prob_Y(i); });
        acc.de += psi1 - psi0;
        acc.sp += psi0;
        acc.sp_base += psi00;
      }
    }
    acc.count += static_cast<long long>(units.size()) * eval.K;
  }
  EffectEstimates out;
  out.mode = mode;
  out.beta_alpha = acc.beta / acc.count;
  out.direct = acc.de / acc.count;
  out.spillover = (acc.sp - acc.sp_base) / acc.count;
  return out;
}

EffectEstimates bootstrap_effects(const NetworkGraph& g, const FieldSample& data,
                                  const OutcomeParams& tau_y_hat,
                                  const CovariateParams& tau_l_hat,
                                  Estimator estimator, const StableSet& s,
                                  const AllocationPolicy& policy,
                                  const UncertaintyPlan& plan,
                                  const BootstrapSettings& boot,
                                  const EffectEval& eval, EffectMode mode,
                                  WeightScheme w) {
  if (plan.method != UncertaintyPlan::Method::parametric_bootstrap)
    throw std::invalid_argument("plan method must be parametric_bootstrap");
  if (plan.replicates < 2) throw std::invalid_argument("need >= 2 replicates");
  EffectEstimates point = estimate_effects(g, tau_y_hat, tau_l_hat, policy, eval,
                                           mode, w);
  ChainSettings regen;
  regen.total_sweeps = boot.regen_sweeps;
  regen.burn_in = boot.regen_burn_in;
  regen.thin = 1;
  std::vector<std::array<double, 3>> reps;
  int failed = 0;
  FitOptions fopts;
  for (int b = 1; b <= plan.replicates; ++b) {
    regen.seed = seed_mix(plan.seed, b);
    // treatment is held at its observed value; only (L, Y) are regenerated
    auto snaps = run_chain(g, tau_l_hat, tau_y_hat, TreatmentMode::Fixed(data.A),
                           regen, w);
    const FieldSample& bdata = snaps.back();
    FitResult fy, fl;
    if (estimator == Estimator::coding) {
      fy = fit_coding_outcome(g, bdata, s, fopts, w);
      fl = fit_coding_covariates(g, bdata, s, fopts, w);
    } else {
      fy = fit_pl_outcome(g, bdata, fopts, w);
      fl = fit_pl_covariates(g, bdata, fopts, w);
    }
    if (!fy.converged || !fl.converged) {
      ++failed;
      continue;
    }
    const auto py_b = outcome_from_vector(data.p, fy.estimate);
    const auto pl_b = covariates_from_vector(data.p, fl.estimate);
    EffectEval beval = eval;
    beval.seed = seed_mix(plan.seed, b, 0xeffec7);
    const auto e = estimate_effects(g, py_b, pl_b, policy, beval, mode, w);
    reps.push_back({e.beta_alpha, e.direct, e.spillover});
  }
  if (failed * 5 > plan.replicates)
    throw std::runtime_error("bootstrap aborted: more than 20% of replicate fits failed");
  summarize(point, reps, {point.beta_alpha, point.direct, point.spillover},
            plan.ci_type);
  point.failed_replicates = failed;
  return point;
}

EffectEstimates normal_resample_effects(const NetworkGraph& g,
                                        const OutcomeParams& tau_y_hat,
                                        const Eigen::MatrixXd& cov_y,
                                        const CovariateParams& tau_l_hat,
                                        const Eigen::MatrixXd& cov_l,
                                        const AllocationPolicy& policy,
                                        const UncertaintyPlan& plan,
                                        const EffectEval& eval, EffectMode mode,
                                        WeightScheme w) {
  if (plan.replicates < 2) throw std::invalid_argument("need >= 2 replicates");
  auto sqrt_factor = [](const Eigen::MatrixXd& cov) {
    Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    const double max_ev = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXd d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i) {
      if (d[i] < -1e-8 * std::max(1.0, max_ev))
        throw std::runtime_error("covariance matrix is not positive semidefinite");
      d[i] = std::sqrt(std::max(0.0, d[i]));
    }
    return Eigen::MatrixXd(es.eigenvectors() * d.asDiagonal());
  };
  const Eigen::MatrixXd ly = sqrt_factor(cov_y);
  const Eigen::MatrixXd ll = sqrt_factor(cov_l);
  const Eigen::VectorXd my = outcome_to_vector(tau_y_hat);
  const Eigen::VectorXd ml = covariates_to_vector(tau_l_hat);
  EffectEstimates point = estimate_effects(g, tau_y_hat, tau_l_hat, policy, eval,
                                           mode, w);
  std::mt19937_64 rng(plan.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::array<double, 3>> reps;
  for (int j = 1; j <= plan.replicates; ++j) {
    Eigen::VectorXd zy(my.size()), zl(ml.size());
    for (int i = 0; i < zy.size(); ++i) zy[i] = normal(rng);
    for (int i = 0; i < zl.size(); ++i) zl[i] = normal(rng);
    const auto py_j = outcome_from_vector(tau_y_hat.p, my + ly * zy);
    const auto pl_j = covariates_from_vector(tau_l_hat.p, ml + ll * zl);
    // shared evaluation seed: replicate spread reflects parameter uncertainty
    // only, so a point-mass parameter distribution yields exactly zero SE
    EffectEval jeval = eval;
    jeval.seed = seed_mix(plan.seed, 0x7e5a);
    const auto e = estimate_effects(g, py_j, pl_j, policy, jeval, mode, w);
    reps.push_back({e.beta_alpha, e.direct, e.spillover});
  }
  summarize(point, reps, {point.beta_alpha, point.direct, point.spillover},
            plan.ci_type);
  return point;
}

std::string effects_report_text(const EffectEstimates& e,
                                const std::optional<std::array<double, 3>>& truth) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  const char* names[3] = {"beta(alpha)", "direct", "spillover"};
  const double est[3] = {e.beta_alpha, e.direct, e.spillover};
  os << "endpoint      ";
  if (truth) os << "truth     ";
  os << "estimate  ";
  if (e.has_uncertainty) os << "se        ci95_lo   ci95_hi";
  os << "\n";
  for (int k = 0; k < 3; ++k) {
    os.width(14);
    os.setf(std::ios::left);
    os << names[k];
    os.unsetf(std::ios::left);
    if (truth) { os.width(10); os.setf(std::ios::left); os << (*truth)[k]; os.unsetf(std::ios::left); }
    os.width(10);
    os.setf(std::ios::left);
    os << est[k];
    os.unsetf(std::ios::left);
    if (e.has_uncertainty) {
      os.width(10); os.setf(std::ios::left); os << e.se[k]; os.unsetf(std::ios::left);
      os.width(10); os.setf(std::ios::left); os << e.ci95[k][0]; os.unsetf(std::ios::left);
      os << e.ci95[k][1];
    }
    os << "\n";
  }
  os << "mode: "
     << (e.mode == EffectMode::rao_blackwell ? "rao-blackwell" : "exact-clamp");
  if (e.has_uncertainty)
    os << "  replicates: " << e.replicates << "  failed: " << e.failed_replicates;
  os << "\n";
  return os.str();
}

std::string effects_report_json(const EffectEstimates& e,
                                const std::optional<std::array<double, 3>>& truth) {
  nlohmann::json j;
  j["beta_alpha"] = e.beta_alpha;
  j["direct"] = e.direct;
  j["spillover"] = e.spillover;
  j["mode"] = e.mode == EffectMode::rao_blackwell ? "rao-blackwell" : "exact-clamp";
  if (truth)
    j["truth"] = {{"beta_alpha", (*truth)[0]}, {"direct", (*truth)[1]},
                  {"spillover", (*truth)[2]}};
  if (e.has_uncertainty) {
    j["se"] = {{"beta_alpha", e.se[0]}, {"direct", e.se[1]}, {"spillover", e.se[2]}};
    j["ci95"] = {{"beta_alpha", e.ci95[0]}, {"direct", e.ci95[1]},
                 {"spillover", e.ci95[2]}};
    j["replicates"] = e.replicates;
    j["failed_replicates"] = e.failed_replicates;
  }
  return j.dump(2);
}

}  // namespace autog
