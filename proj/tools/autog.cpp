#include <array>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "autog/effects.hpp"
#include "autog/io.hpp"
#include "autog/oracle.hpp"
#include "autog/study.hpp"
#include "autog/util.hpp"

namespace {

using namespace autog;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitInternal = 4;

void density_to_degrees(const std::string& density, int& dmin, int& dmax) {
  if (density == "low") { dmin = 2; dmax = 4; }
  else if (density == "med" || density == "medium") { dmin = 5; dmax = 7; }
  else if (density == "high") { dmin = 8; dmax = 10; }
  else throw CLI::ValidationError("--density must be low, med, or high");
}

int cmd_gen_graph(int n, const std::string& density, int dmin, int dmax,
                  std::uint64_t seed, const std::string& out) {
  if (!density.empty()) density_to_degrees(density, dmin, dmax);
  const auto g = random_graph(n, dmin, dmax, seed);
  save_edge_list(g, out);
  const auto s = find_max_stable_set(g, 64, seed_mix(seed, 0x57ab1e));
  std::map<int, int> hist;
  for (int i = 0; i < g.n_units(); ++i) ++hist[g.degree(i)];
  std::cout << "n_units " << g.n_units() << "\nn_edges " << g.n_edges()
            << "\nstable_set_size " << s.members.size() << "\ndegree_histogram";
  for (auto [d, c] : hist) std::cout << " " << d << ":" << c;
  std::cout << "\nwrote " << out << "\n";
  return kExitOk;
}

int cmd_simulate(const std::string& graph_path, const std::string& params_path,
                 int sweeps, int burn_in, int thin, std::uint64_t seed,
                 const std::string& out) {
  const auto g = load_edge_list(graph_path);
  const ModelParams m = params_path.empty() ? sim_defaults() : load_params(params_path);
  ChainSettings cs;
  cs.total_sweeps = sweeps;
  cs.burn_in = burn_in;
  cs.thin = thin;
  cs.seed = seed;
  const auto snaps = run_chain(g, m.tau_l, m.tau_y, TreatmentMode::Model(m.tau_a),
                               cs, m.weights);
  save_node_table(snaps.back(), out);
  std::cout << "wrote " << out << " (n=" << snaps.back().n
            << ", p=" << snaps.back().p << ")\n";
  return kExitOk;
}

int cmd_fit(const std::string& graph_path, const std::string& data_path,
            const std::string& estimator, bool with_treatment,
            std::uint64_t seed, const std::string& out_prefix) {
  const auto g = load_edge_list(graph_path);
  const auto data = load_node_table(data_path);
  FitOptions opts;
  FitResult fy, fl;
  if (estimator == "coding") {
    const auto s = find_max_stable_set(g, 64, seed_mix(seed, 0x57ab1e));
    fy = fit_coding_outcome(g, data, s, opts);
    fl = fit_coding_covariates(g, data, s, opts);
  } else if (estimator == "pl") {
    fy = fit_pl_outcome(g, data, opts);
    fl = fit_pl_covariates(g, data, opts);
  } else {
    throw CLI::ValidationError("--estimator must be coding or pl");
  }
  save_fit_json(fy, "outcome", data.p, out_prefix + "_outcome.json");
  save_fit_json(fl, "covariates", data.p, out_prefix + "_covariates.json");
  std::cout << "outcome: converged=" << fy.converged << " iterations="
            << fy.iterations << " effective_n=" << fy.effective_n << "\n"
            << "covariates: converged=" << fl.converged << " iterations="
            << fl.iterations << " effective_n=" << fl.effective_n << "\n";
  if (estimator == "pl")
    std::cout << "note: pseudo-likelihood fits carry no covariance; use the "
                 "parametric bootstrap (effects --uncertainty bootstrap) for "
                 "standard errors\n";
  if (with_treatment) {
    const auto ft = fit_treatment(g, data, opts);
    save_fit_json(ft, "treatment", data.p, out_prefix + "_treatment.json");
    if (!ft.converged) {
      std::cerr << "treatment fit failed: " << ft.diagnostic << "\n";
      return kExitNonConvergence;
    }
  }
  if (!fy.converged || !fl.converged) {
    std::cerr << "fit failed: " << (fy.converged ? fl.diagnostic : fy.diagnostic)
              << "\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int cmd_effects(const std::string& graph_path, const std::string& params_path,
                const std::string& fit_outcome, const std::string& fit_covariates,
                const std::string& data_path, double alpha,
                const std::string& uncertainty, int replicates,
                const std::string& mode_name, int R, int K, int m_star,
                std::uint64_t seed, const std::string& out) {
  const auto g = load_edge_list(graph_path);
  OutcomeParams py;
  CovariateParams pl;
  WeightScheme w = WeightScheme::raw_sum;
  std::optional<Eigen::MatrixXd> cov_y, cov_l;
  if (!params_path.empty()) {
    const auto m = load_params(params_path);
    py = m.tau_y;
    pl = m.tau_l;
    w = m.weights;
  } else {
    if (fit_outcome.empty() || fit_covariates.empty())
      throw CLI::ValidationError("need --params or both --fit-outcome and --fit-covariates");
    int p = 0;
    const auto fy = load_fit_json(fit_outcome, nullptr, &p);
    const auto fl = load_fit_json(fit_covariates, nullptr, nullptr);
    if (!fy.converged || !fl.converged)
      throw std::runtime_error("loaded fit did not converge");
    py = outcome_from_vector(p, fy.estimate);
    pl = covariates_from_vector(p, fl.estimate);
    if (fy.has_covariance) cov_y = fy.covariance;
    if (fl.has_covariance) cov_l = fl.covariance;
  }
  const auto policy = AllocationPolicy::Bernoulli(alpha);
  const EffectMode mode = mode_name == "exact-clamp" ? EffectMode::exact_clamp
                                                     : EffectMode::rao_blackwell;
  EffectEval eval{R, K, m_star, seed, true};
  EffectEstimates e;
  if (uncertainty == "none") {
    e = estimate_effects(g, py, pl, policy, eval, mode, w);
  } else if (uncertainty == "bootstrap") {
    if (data_path.empty())
      throw CLI::ValidationError("--uncertainty bootstrap requires --data");
    const auto data = load_node_table(data_path);
    UncertaintyPlan plan;
    plan.method = UncertaintyPlan::Method::parametric_bootstrap;
    plan.replicates = replicates;
    plan.seed = seed_mix(seed, 0xb007);
    const auto s = find_max_stable_set(g, 64, seed_mix(seed, 0x57ab1e));
    // refit with coding when covariances were available, else PL
    const Estimator est = cov_y ? Estimator::coding : Estimator::pl;
    e = bootstrap_effects(g, data, py, pl, est, s, policy, plan, {}, eval, mode, w);
  } else if (uncertainty == "normal") {
    if (!cov_y || !cov_l)
      throw std::runtime_error(
          "--uncertainty normal requires coding fits with covariances");
    UncertaintyPlan plan;
    plan.method = UncertaintyPlan::Method::normal_resample;
    plan.replicates = replicates;
    plan.seed = seed_mix(seed, 0x4e5a);
    e = normal_resample_effects(g, py, *cov_y, pl, *cov_l, policy, plan, eval,
                                mode, w);
  } else {
    throw CLI::ValidationError("--uncertainty must be none, bootstrap, or normal");
  }
  const auto json = effects_report_json(e, std::nullopt);
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write file: " + out);
    os << json << "\n";
  }
  std::cout << effects_report_text(e, std::nullopt);
  return kExitOk;
}

int cmd_oracle(const std::string& graph_path, const std::string& params_path,
               double alpha, const std::string& out) {
  const auto g = load_edge_list(graph_path);
  const ModelParams m = params_path.empty() ? sim_defaults() : load_params(params_path);
  const auto eff = oracle::exact_effects(g, alpha, m.tau_y, m.tau_l);
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(12);
  os << "{\n  \"beta_alpha\": " << eff.beta_alpha << ",\n  \"direct\": "
     << eff.direct << ",\n  \"spillover\": " << eff.spillover << "\n}\n";
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write file: " + out);
    f << os.str();
  }
  std::cout << os.str();
  return kExitOk;
}

int cmd_reproduce_study(const std::string& graph_path, const std::string& density,
                        int size, const std::string& scenario,
                        double missing_fraction, int S, int boot_reps,
                        const std::string& estimator, int sweeps, int burn_in,
                        int thin, double alpha, bool no_uncertainty,
                        std::uint64_t seed, int workers, const std::string& out) {
  StudyConfig cfg;
  cfg.graph_path = graph_path;
  cfg.n = size;
  if (!density.empty()) density_to_degrees(density, cfg.degree_min, cfg.degree_max);
  if (scenario == "sharp-null") cfg.sharp_null = true;
  else if (scenario == "missing-edges") cfg.missing_edge_fraction = missing_fraction;
  else if (scenario != "standard")
    throw CLI::ValidationError("--scenario must be standard, sharp-null, or missing-edges");
  cfg.replicates = S;
  cfg.sim.total_sweeps = sweeps;
  cfg.sim.burn_in = burn_in;
  cfg.sim.thin = thin;
  cfg.alpha = alpha;
  cfg.run_coding = estimator == "coding" || estimator == "both";
  cfg.run_pl = estimator == "pl" || estimator == "both";
  if (!cfg.run_coding && !cfg.run_pl)
    throw CLI::ValidationError("--estimator must be coding, pl, or both");
  cfg.with_uncertainty = cfg.run_coding && !no_uncertainty;
  cfg.uncertainty.replicates = boot_reps;
  cfg.seed = seed;
  cfg.workers = workers;
  const auto report = run_study(cfg);
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write file: " + out);
    os << study_report_json(report) << "\n";
  }
  std::cout << study_report_text(report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"auto-g-computation: network causal effects from a single realization"};
  app.require_subcommand(1);

  // gen-graph
  auto* gg = app.add_subcommand("gen-graph", "generate a degree-constrained random graph");
  int gg_n = 800, gg_min = 2, gg_max = 4;
  std::string gg_density, gg_out = "graph.txt";
  std::uint64_t gg_seed = 1;
  gg->add_option("--n", gg_n, "number of units");
  gg->add_option("--density", gg_density, "low|med|high degree class");
  gg->add_option("--min-deg", gg_min, "minimum degree");
  gg->add_option("--max-deg", gg_max, "maximum degree");
  gg->add_option("--seed", gg_seed, "RNG seed");
  gg->add_option("--out", gg_out, "output edge-list path");

  // simulate
  auto* sim = app.add_subcommand("simulate", "synthesize one (L, A, Y) realization");
  std::string sim_graph, sim_params, sim_out = "data.csv";
  int sim_sweeps = 4000, sim_burn = 1000, sim_thin = 3;
  std::uint64_t sim_seed = 1;
  sim->add_option("--graph", sim_graph, "edge-list path")->required();
  sim->add_option("--params", sim_params, "parameter JSON (default: built-in truth)");
  sim->add_option("--sweeps", sim_sweeps, "total Gibbs sweeps");
  sim->add_option("--burn-in", sim_burn, "burn-in sweeps");
  sim->add_option("--thin", sim_thin, "thinning interval");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "output node-table CSV");

  // fit
  auto* fit = app.add_subcommand("fit", "estimate auto-model parameters");
  std::string fit_graph, fit_data, fit_estimator = "coding", fit_out = "fit";
  bool fit_treat = false;
  std::uint64_t fit_seed = 1;
  fit->add_option("--graph", fit_graph, "edge-list path")->required();
  fit->add_option("--data", fit_data, "node-table CSV")->required();
  fit->add_option("--estimator", fit_estimator, "coding|pl");
  fit->add_flag("--treatment", fit_treat, "also fit the treatment model");
  fit->add_option("--seed", fit_seed, "RNG seed (stable-set search)");
  fit->add_option("--out", fit_out, "output path prefix");

  // effects
  auto* eff = app.add_subcommand("effects", "auto-g-computation of network effects");
  std::string eff_graph, eff_params, eff_fy, eff_fl, eff_data, eff_out;
  std::string eff_uncertainty = "none", eff_mode = "rao-blackwell";
  double eff_alpha = 0.7;
  int eff_reps = 200, eff_R = 20, eff_K = 50, eff_m = 10;
  std::uint64_t eff_seed = 1;
  eff->add_option("--graph", eff_graph, "edge-list path")->required();
  eff->add_option("--params", eff_params, "parameter JSON (truth run)");
  eff->add_option("--fit-outcome", eff_fy, "outcome fit JSON");
  eff->add_option("--fit-covariates", eff_fl, "covariate fit JSON");
  eff->add_option("--data", eff_data, "node-table CSV (bootstrap)");
  eff->add_option("--alpha", eff_alpha, "allocation probability");
  eff->add_option("--uncertainty", eff_uncertainty, "none|bootstrap|normal");
  eff->add_option("--replicates", eff_reps, "uncertainty replicates");
  eff->add_option("--mode", eff_mode, "rao-blackwell|exact-clamp");
  eff->add_option("--draws", eff_R, "allocation draws R");
  eff->add_option("--keep", eff_K, "retained sweeps K per draw");
  eff->add_option("--burn-in", eff_m, "burn-in sweeps m*");
  eff->add_option("--seed", eff_seed, "RNG seed");
  eff->add_option("--out", eff_out, "output JSON path");

  // oracle
  auto* orc = app.add_subcommand("oracle", "exact enumeration effects on tiny graphs");
  std::string orc_graph, orc_params, orc_out;
  double orc_alpha = 0.7;
  orc->add_option("--graph", orc_graph, "edge-list path")->required();
  orc->add_option("--params", orc_params, "parameter JSON (default: built-in truth)");
  orc->add_option("--alpha", orc_alpha, "allocation probability");
  orc->add_option("--out", orc_out, "output JSON path");

  // reproduce-study
  auto* st = app.add_subcommand("reproduce-study", "simulation-study harness");
  std::string st_graph, st_density = "low", st_scenario = "standard";
  std::string st_estimator = "both", st_out;
  int st_size = 800, st_S = 100, st_boot = 200;
  int st_sweeps = 4000, st_burn = 1000, st_thin = 3, st_workers = 0;
  double st_alpha = 0.7, st_missing = 0.14;
  bool st_no_unc = false;
  std::uint64_t st_seed = 1;
  st->add_option("--graph", st_graph, "edge-list path (else generated)");
  st->add_option("--density", st_density, "low|med|high");
  st->add_option("--size", st_size, "network size");
  st->add_option("--scenario", st_scenario, "standard|sharp-null|missing-edges");
  st->add_option("--missing-fraction", st_missing, "edge fraction to hide");
  st->add_option("--replicates", st_S, "simulation replicates S");
  st->add_option("--boot", st_boot, "bootstrap replicates per simulation");
  st->add_option("--estimator", st_estimator, "coding|pl|both");
  st->add_option("--sweeps", st_sweeps, "data-synthesis sweeps");
  st->add_option("--burn-in", st_burn, "data-synthesis burn-in");
  st->add_option("--thin", st_thin, "data-synthesis thinning");
  st->add_option("--alpha", st_alpha, "allocation probability");
  st->add_flag("--no-uncertainty", st_no_unc, "skip bootstrap CIs");
  st->add_option("--seed", st_seed, "RNG seed");
  st->add_option("--workers", st_workers, "worker threads (0 = hardware)");
  st->add_option("--out", st_out, "output JSON path");

  try {
    app.parse(argc, argv);
    if (*gg) return cmd_gen_graph(gg_n, gg_density, gg_min, gg_max, gg_seed, gg_out);
    if (*sim) return cmd_simulate(sim_graph, sim_params, sim_sweeps, sim_burn,
                                  sim_thin, sim_seed, sim_out);
    if (*fit) return cmd_fit(fit_graph, fit_data, fit_estimator, fit_treat,
                             fit_seed, fit_out);
    if (*eff) return cmd_effects(eff_graph, eff_params, eff_fy, eff_fl, eff_data,
                                 eff_alpha, eff_uncertainty, eff_reps, eff_mode,
                                 eff_R, eff_K, eff_m, eff_seed, eff_out);
    if (*orc) return cmd_oracle(orc_graph, orc_params, orc_alpha, orc_out);
    if (*st) return cmd_reproduce_study(st_graph, st_density, st_size, st_scenario,
                                        st_missing, st_S, st_boot, st_estimator,
                                        st_sweeps, st_burn, st_thin, st_alpha,
                                        st_no_unc, st_seed, st_workers, st_out);
    return kExitInternal;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
