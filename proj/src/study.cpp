#include "autog/study.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include "autog/io.hpp"
#include "autog/util.hpp"
#include "json.hpp"

namespace autog {

namespace {

struct ReplicateResult {
  bool coding_ok = false;
  bool pl_ok = false;
  std::array<double, 3> coding_est{};
  std::array<double, 3> pl_est{};
  bool has_ci = false;
  std::array<double, 3> coding_se{};
  std::array<std::array<double, 2>, 3> coding_ci{};
};

OutcomeParams apply_sharp_null(OutcomeParams py) {
  py.beta_a = 0.0;
  py.beta_a_nbr = 0.0;
  return py;
}

EstimatorReport aggregate(const std::vector<ReplicateResult>& results,
                          const std::array<double, 3>& truth, bool coding,
                          bool has_coverage) {
  EstimatorReport rep;
  rep.has_coverage = has_coverage;
  std::vector<const ReplicateResult*> ok;
  for (const auto& r : results)
    if (coding ? r.coding_ok : r.pl_ok) ok.push_back(&r);
  rep.excluded = static_cast<int>(results.size() - ok.size());
  if (ok.empty()) return rep;
  for (int e = 0; e < 3; ++e) {
    auto& st = rep.endpoints[e];
    st.truth = truth[e];
    double mean = 0.0;
    for (auto* r : ok) mean += coding ? r->coding_est[e] : r->pl_est[e];
    mean /= ok.size();
    st.mean_bias = mean - truth[e];
    double ss = 0.0;
    for (auto* r : ok) {
      const double v = (coding ? r->coding_est[e] : r->pl_est[e]) - mean;
      ss += v * v;
    }
    st.mc_variance = ok.size() > 1 ? ss / (ok.size() - 1) : 0.0;
    if (coding && has_coverage) {
      double rv = 0.0;
      int covered = 0;
      for (auto* r : ok) {
        rv += r->coding_se[e] * r->coding_se[e];
        if (truth[e] >= r->coding_ci[e][0] && truth[e] <= r->coding_ci[e][1])
          ++covered;
      }
      st.mean_robust_variance = rv / ok.size();
      st.coverage = static_cast<double>(covered) / ok.size();
    }
  }
  return rep;
}

}  // namespace

std::string config_hash(const StudyConfig& cfg) {
  std::ostringstream os;
  os << cfg.graph_path << '|' << cfg.n << '|' << cfg.degree_min << '|'
     << cfg.degree_max << '|' << cfg.missing_edge_fraction << '|'
     << cfg.sharp_null << '|' << cfg.replicates << '|' << cfg.sim.total_sweeps
     << '|' << cfg.sim.burn_in << '|' << cfg.sim.thin << '|' << cfg.alpha << '|'
     << cfg.run_coding << '|' << cfg.run_pl << '|' << cfg.with_uncertainty << '|'
     << cfg.uncertainty.replicates << '|' << cfg.eval.R << '|' << cfg.eval.K
     << '|' << cfg.eval.m_star << '|' << cfg.truth_draws << '|' << cfg.seed;
  for (double t : cfg.truth.tau_l.tau) os << ',' << t;
  for (double t : cfg.truth.tau_a.gamma) os << ',' << t;
  os << ',' << cfg.truth.tau_y.beta0 << ',' << cfg.truth.tau_y.theta;
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0')
      << seed_mix(std::hash<std::string>{}(os.str()), 0x5d);
  return hex.str();
}

StudyReport run_study(const StudyConfig& cfg) {
  const NetworkGraph sim_graph =
      cfg.graph_path.empty()
          ? random_graph(cfg.n, cfg.degree_min, cfg.degree_max,
                         seed_mix(cfg.seed, 0x9aaf))
          : load_edge_list(cfg.graph_path);
  const NetworkGraph analysis_graph =
      cfg.missing_edge_fraction > 0.0
          ? remove_random_edges(sim_graph, cfg.missing_edge_fraction,
                                seed_mix(cfg.seed, 0x3d9e))
          : sim_graph;

  OutcomeParams truth_y = cfg.truth.tau_y;
  if (cfg.sharp_null) truth_y = apply_sharp_null(truth_y);
  const CovariateParams& truth_l = cfg.truth.tau_l;
  const WeightScheme w = cfg.truth.weights;

  const auto stable =
      find_max_stable_set(analysis_graph, cfg.stable_restarts,
                          seed_mix(cfg.seed, 0x57ab1e));

  // instance truth on the data-generating graph at the true parameters
  EffectEval truth_eval = cfg.eval;
  truth_eval.R = cfg.truth_draws;
  truth_eval.seed = seed_mix(cfg.seed, 0x7271);
  const auto truth_eff =
      estimate_effects(sim_graph, truth_y, truth_l,
                       AllocationPolicy::Bernoulli(cfg.alpha), truth_eval,
                       cfg.mode, w);
  const std::array<double, 3> truth =
      cfg.sharp_null
          ? std::array<double, 3>{truth_eff.beta_alpha, 0.0, 0.0}
          : std::array<double, 3>{truth_eff.beta_alpha, truth_eff.direct,
                                  truth_eff.spillover};

  std::vector<ReplicateResult> results(cfg.replicates);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int s = next.fetch_add(1);
      if (s >= cfg.replicates) return;
      ReplicateResult& rr = results[s];
      ChainSettings sim = cfg.sim;
      sim.seed = seed_mix(cfg.seed, s, 0xda7a);
      const auto snaps = run_chain(sim_graph, truth_l, truth_y,
                                   TreatmentMode::Model(cfg.truth.tau_a), sim, w);
      const FieldSample& data = snaps.back();
      const AllocationPolicy policy = AllocationPolicy::Bernoulli(cfg.alpha);
      EffectEval eval = cfg.eval;
      eval.seed = seed_mix(cfg.seed, s, 0xe5a1);
      if (cfg.run_coding) {
        try {
          const auto fy = fit_coding_outcome(analysis_graph, data, stable, {}, w);
          const auto fl = fit_coding_covariates(analysis_graph, data, stable, {}, w);
          if (fy.converged && fl.converged) {
            const auto py = outcome_from_vector(data.p, fy.estimate);
            const auto pl = covariates_from_vector(data.p, fl.estimate);
            if (cfg.with_uncertainty) {
              UncertaintyPlan plan = cfg.uncertainty;
              plan.seed = seed_mix(cfg.seed, s, 0xb007);
              const auto e = bootstrap_effects(analysis_graph, data, py, pl,
                                               Estimator::coding, stable, policy,
                                               plan, cfg.boot, eval, cfg.mode, w);
              rr.coding_est = {e.beta_alpha, e.direct, e.spillover};
              rr.coding_se = e.se;
              rr.coding_ci = e.ci95;
              rr.has_ci = true;
            } else {
              const auto e = estimate_effects(analysis_graph, py, pl, policy,
                                              eval, cfg.mode, w);
              rr.coding_est = {e.beta_alpha, e.direct, e.spillover};
            }
            rr.coding_ok = true;
          }
        } catch (const std::exception&) {
          rr.coding_ok = false;
        }
      }
      if (cfg.run_pl) {
        try {
          const auto fy = fit_pl_outcome(analysis_graph, data, {}, w);
          const auto fl = fit_pl_covariates(analysis_graph, data, {}, w);
          if (fy.converged && fl.converged) {
            const auto py = outcome_from_vector(data.p, fy.estimate);
            const auto pl = covariates_from_vector(data.p, fl.estimate);
            EffectEval peval = eval;
            peval.seed = seed_mix(cfg.seed, s, 0xe5a2);
            const auto e = estimate_effects(analysis_graph, py, pl, policy,
                                            peval, cfg.mode, w);
            rr.pl_est = {e.beta_alpha, e.direct, e.spillover};
            rr.pl_ok = true;
          }
        } catch (const std::exception&) {
          rr.pl_ok = false;
        }
      }
    }
  };
  int n_workers = cfg.workers > 0
                      ? cfg.workers
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::max(1, std::min(n_workers, cfg.replicates));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  StudyReport rep;
  rep.n = sim_graph.n_units();
  rep.n_edges = analysis_graph.n_edges();
  rep.max_degree = analysis_graph.max_degree();
  rep.stable_set_size = static_cast<int>(stable.members.size());
  rep.replicates = cfg.replicates;
  rep.seed = cfg.seed;
  rep.config_hash = config_hash(cfg);
  rep.truth = truth;
  if (cfg.run_coding)
    rep.coding = aggregate(results, truth, true, cfg.with_uncertainty);
  if (cfg.run_pl) rep.pl = aggregate(results, truth, false, false);
  return rep;
}

std::string study_report_text(const StudyReport& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os << "study: N=" << r.n << " |E|=" << r.n_edges << " max_degree="
     << r.max_degree << " n1=" << r.stable_set_size << " S=" << r.replicates
     << "\nseed=" << r.seed << " config=" << r.config_hash << " version="
     << kArtifactVersion << "\n";
  const char* names[3] = {"beta(alpha)", "direct", "spillover"};
  auto block = [&](const char* title, const EstimatorReport& e) {
    os << title << " (excluded " << e.excluded << ")\n";
    os << "  endpoint      truth     bias      mc_var    robust_var  coverage\n";
    for (int k = 0; k < 3; ++k) {
      const auto& st = e.endpoints[k];
      os << "  " << std::setw(14) << std::left << names[k] << std::right
         << std::setprecision(4) << std::setw(8) << st.truth << "  "
         << std::setw(8) << st.mean_bias << "  " << std::setprecision(5)
         << std::setw(8) << st.mc_variance << "  ";
      if (e.has_coverage)
        os << std::setw(10) << st.mean_robust_variance << "  "
           << std::setprecision(3) << std::setw(8) << st.coverage;
      else
        os << std::setw(10) << "-" << "  " << std::setw(8) << "-";
      os << "\n";
    }
  };
  if (r.coding) block("coding", *r.coding);
  if (r.pl) block("pseudo-likelihood", *r.pl);
  return os.str();
}

std::string study_report_json(const StudyReport& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["n_edges"] = r.n_edges;
  j["max_degree"] = r.max_degree;
  j["stable_set_size"] = r.stable_set_size;
  j["replicates"] = r.replicates;
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["version"] = kArtifactVersion;
  j["truth"] = {{"beta_alpha", r.truth[0]}, {"direct", r.truth[1]},
                {"spillover", r.truth[2]}};
  auto block = [&](const EstimatorReport& e) {
    nlohmann::json b;
    b["excluded"] = e.excluded;
    const char* names[3] = {"beta_alpha", "direct", "spillover"};
    for (int k = 0; k < 3; ++k) {
      const auto& st = e.endpoints[k];
      nlohmann::json s = {{"truth", st.truth},
                          {"mean_bias", st.mean_bias},
                          {"mc_variance", st.mc_variance}};
      if (e.has_coverage) {
        s["mean_robust_variance"] = st.mean_robust_variance;
        s["coverage"] = st.coverage;
      }
      b[names[k]] = s;
    }
    return b;
  };
  if (r.coding) j["coding"] = block(*r.coding);
  if (r.pl) j["pl"] = block(*r.pl);
  return j.dump(2);
}

}  // namespace autog
