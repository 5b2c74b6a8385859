#include "autog/fit.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "autog/util.hpp"
#include "json.hpp"

namespace autog {

namespace {

// log(1 + exp(x)) without overflow
double log1pexp(double x) {
  if (x > 35.0) return x;
  return std::log1p(std::exp(x));
}

std::vector<int> all_units(int n) {
  std::vector<int> u(n);
  std::iota(u.begin(), u.end(), 0);
  return u;
}

struct NewtonOutcome {
  Eigen::VectorXd beta;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string diagnostic;
};

NewtonOutcome newton_logistic(const LogisticDesign& d, const FitOptions& opts) {
  const int dim = static_cast<int>(d.X.cols());
  NewtonOutcome out;
  out.beta = Eigen::VectorXd::Zero(dim);
  if (!opts.init.empty()) {
    if (static_cast<int>(opts.init.size()) != dim)
      throw std::invalid_argument("init vector dimension mismatch");
    for (int j = 0; j < dim; ++j) out.beta[j] = opts.init[j];
  }
  double ll = logistic_loglik(d, out.beta);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    out.iterations = it;
    const Eigen::VectorXd eta = d.X * out.beta;
    Eigen::VectorXd p(eta.size()), w(eta.size());
    for (int r = 0; r < eta.size(); ++r) {
      p[r] = expit(eta[r]);
      w[r] = p[r] * (1.0 - p[r]);
    }
    const Eigen::VectorXd grad = d.X.transpose() * (d.y - p);
    if (grad.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) {
      out.converged = true;
      break;
    }
    Eigen::MatrixXd H = d.X.transpose() * w.asDiagonal() * d.X;
    H.diagonal().array() += opts.ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Eigen::VectorXd step;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      step = ldlt.solve(grad);
    } else {
      Eigen::MatrixXd Hs = H;
      Hs.diagonal().array() += 1e-4 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
      step = Hs.ldlt().solve(grad);
    }
    // a negligible step means the optimum is resolved to machine precision
    // even if the gradient hovers at its floating-point noise floor
    if (step.lpNorm<Eigen::Infinity>() <
        1e-7 * (1.0 + out.beta.lpNorm<Eigen::Infinity>())) {
      out.converged = true;
      break;
    }
    // backtracking line search on the log-likelihood (halving, max 50)
    double t = 1.0;
    double ll_new = ll;
    Eigen::VectorXd cand = out.beta;
    for (int bt = 0; bt < 50; ++bt) {
      cand = out.beta + t * step;
      ll_new = logistic_loglik(d, cand);
      if (ll_new >= ll) break;
      t *= 0.5;
    }
    if (ll_new < ll) {
      out.diagnostic = "line search failed";
      break;
    }
    out.beta = cand;
    ll = ll_new;
  }
  out.objective = ll;
  if (out.converged && out.beta.lpNorm<Eigen::Infinity>() > 15.0) {
    out.converged = false;
    out.diagnostic = "separation suspected: coefficient magnitude exceeds 15";
  } else if (!out.converged && out.diagnostic.empty()) {
    if (out.beta.lpNorm<Eigen::Infinity>() > 15.0)
      out.diagnostic = "separation suspected: diverging coefficients";
    else
      out.diagnostic = "maximum iterations reached";
  }
  return out;
}

// Sum of per-unit scores and per-unit outer products; rows sharing a unit id
// are combined into one score first.
Eigen::MatrixXd unit_score_outer(const LogisticDesign& d,
                                 const Eigen::VectorXd& beta) {
  const int dim = static_cast<int>(d.X.cols());
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd cur = Eigen::VectorXd::Zero(dim);
  int cur_unit = d.unit.empty() ? -1 : d.unit.front();
  auto flush = [&]() {
    outer.noalias() += cur * cur.transpose();
    cur.setZero();
  };
  for (int r = 0; r < d.X.rows(); ++r) {
    if (d.unit[r] != cur_unit) {
      flush();
      cur_unit = d.unit[r];
    }
    const double resid = d.y[r] - expit(d.X.row(r).dot(beta));
    cur += resid * d.X.row(r).transpose();
  }
  if (!d.unit.empty()) flush();
  return outer;
}

Eigen::MatrixXd neg_hessian(const LogisticDesign& d, const Eigen::VectorXd& beta) {
  Eigen::VectorXd w(d.X.rows());
  for (int r = 0; r < d.X.rows(); ++r) {
    const double p = expit(d.X.row(r).dot(beta));
    w[r] = p * (1.0 - p);
  }
  return d.X.transpose() * w.asDiagonal() * d.X;
}

Eigen::MatrixXd robust_inverse(const Eigen::MatrixXd& m, double ridge) {
  Eigen::MatrixXd a = m;
  a.diagonal().array() += ridge;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("singular information matrix");
  return ldlt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

FitResult finish_coding(const LogisticDesign& d, const NewtonOutcome& nw,
                        const FitOptions& opts, int effective_n, bool sandwich) {
  FitResult r;
  r.estimate = nw.beta;
  r.objective_value = nw.objective;
  r.converged = nw.converged;
  r.iterations = nw.iterations;
  r.effective_n = effective_n;
  r.diagnostic = nw.diagnostic;
  if (!nw.converged) return r;
  const Eigen::MatrixXd outer = unit_score_outer(d, nw.beta);
  if (sandwich) {
    // modified coding objective: sandwich H^{-1} Sum(s s') H^{-1}
    const Eigen::MatrixXd Hinv = robust_inverse(neg_hessian(d, nw.beta), opts.ridge);
    r.covariance = Hinv * outer * Hinv;
  } else if (opts.covariance_form == CovarianceForm::outer_product) {
    r.covariance = robust_inverse(outer, opts.ridge);
  } else {
    r.covariance = robust_inverse(neg_hessian(d, nw.beta), opts.ridge);
  }
  r.covariance = 0.5 * (r.covariance + r.covariance.transpose()).eval();
  r.has_covariance = true;
  return r;
}

FitResult finish_pl(const NewtonOutcome& nw, int effective_n) {
  FitResult r;
  r.estimate = nw.beta;
  r.objective_value = nw.objective;
  r.converged = nw.converged;
  r.iterations = nw.iterations;
  r.effective_n = effective_n;
  r.diagnostic = nw.diagnostic;
  // no covariance: pseudo-likelihood information matrices are not valid for
  // Wald inference here; standard errors come from the parametric bootstrap
  return r;
}

}  // namespace

double logistic_loglik(const LogisticDesign& d, const Eigen::VectorXd& beta) {
  double ll = 0.0;
  for (int r = 0; r < d.X.rows(); ++r) {
    const double eta = d.X.row(r).dot(beta);
    ll += d.y[r] * eta - log1pexp(eta);
  }
  return ll;
}

Eigen::VectorXd logistic_score(const LogisticDesign& d, const Eigen::VectorXd& beta) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d.X.cols());
  for (int r = 0; r < d.X.rows(); ++r) {
    const double resid = d.y[r] - expit(d.X.row(r).dot(beta));
    g += resid * d.X.row(r).transpose();
  }
  return g;
}

LogisticDesign build_outcome_design(const NetworkGraph& g, const FieldSample& f,
                                    const std::vector<int>& units, WeightScheme w) {
  check_dims(g, f);
  const int p = f.p;
  const int dim = 2 * p + 4;
  LogisticDesign d;
  d.X.resize(static_cast<int>(units.size()), dim);
  d.y.resize(static_cast<int>(units.size()));
  d.unit = units;
  for (size_t r = 0; r < units.size(); ++r) {
    const int i = units[r];
    const double wi = pair_weight(g, i, w);
    double sa = 0.0, sy = 0.0;
    std::vector<double> sl(p, 0.0);
    for (int j : g.neighbors(i)) {
      sa += f.A[j];
      sy += f.Y[j];
      for (int k = 0; k < p; ++k) sl[k] += f.l(j, k);
    }
    int c = 0;
    d.X(r, c++) = 1.0;
    d.X(r, c++) = f.A[i];
    d.X(r, c++) = wi * sa;
    for (int k = 0; k < p; ++k) d.X(r, c++) = f.l(i, k);
    for (int k = 0; k < p; ++k) d.X(r, c++) = wi * sl[k];
    d.X(r, c++) = wi * sy;
    d.y[r] = f.Y[i];
  }
  return d;
}

LogisticDesign build_covariate_design(const NetworkGraph& g, const FieldSample& f,
                                      const std::vector<int>& units, WeightScheme w) {
  check_dims(g, f);
  const int p = f.p;
  const int n_rho = p * (p - 1) / 2;
  const int n_nu = p * (p + 1) / 2;
  const int dim = p + n_rho + n_nu;
  LogisticDesign d;
  d.X = Eigen::MatrixXd::Zero(static_cast<int>(units.size()) * p, dim);
  d.y.resize(static_cast<int>(units.size()) * p);
  d.unit.resize(static_cast<size_t>(units.size()) * p);
  int row = 0;
  for (int i : units) {
    const double wi = pair_weight(g, i, w);
    std::vector<double> sl(p, 0.0);
    for (int j : g.neighbors(i))
      for (int s = 0; s < p; ++s) sl[s] += f.l(j, s);
    for (int k = 0; k < p; ++k, ++row) {
      d.X(row, k) = 1.0;  // tau_k
      int c = p;
      for (int u = 0; u < p; ++u)
        for (int v = u + 1; v < p; ++v, ++c) {
          if (k == u) d.X(row, c) = f.l(i, v);
          else if (k == v) d.X(row, c) = f.l(i, u);
        }
      for (int u = 0; u < p; ++u)
        for (int v = u; v < p; ++v, ++c) {
          double x = 0.0;
          if (k == u) x += wi * sl[v];
          if (u != v && k == v) x += wi * sl[u];
          d.X(row, c) = x;
        }
      d.y[row] = f.l(i, k);
      d.unit[row] = i;
    }
  }
  return d;
}

LogisticDesign build_treatment_design(const NetworkGraph& g, const FieldSample& f,
                                      const std::vector<int>& units, WeightScheme w) {
  check_dims(g, f);
  const int p = f.p;
  const int dim = 2 * p + 2;
  LogisticDesign d;
  d.X.resize(static_cast<int>(units.size()), dim);
  d.y.resize(static_cast<int>(units.size()));
  d.unit = units;
  for (size_t r = 0; r < units.size(); ++r) {
    const int i = units[r];
    const double wi = pair_weight(g, i, w);
    double sa = 0.0;
    std::vector<double> sl(p, 0.0);
    for (int j : g.neighbors(i)) {
      sa += f.A[j];
      for (int k = 0; k < p; ++k) sl[k] += f.l(j, k);
    }
    int c = 0;
    d.X(r, c++) = 1.0;
    for (int k = 0; k < p; ++k) {
      d.X(r, c++) = f.l(i, k);
      d.X(r, c++) = wi * sl[k];
    }
    d.X(r, c++) = wi * sa;
    d.y[r] = f.A[i];
  }
  return d;
}

Eigen::VectorXd outcome_to_vector(const OutcomeParams& p) {
  Eigen::VectorXd v(2 * p.p + 4);
  int c = 0;
  v[c++] = p.beta0;
  v[c++] = p.beta_a;
  v[c++] = p.beta_a_nbr;
  for (int k = 0; k < p.p; ++k) v[c++] = p.beta_l[k];
  for (int k = 0; k < p.p; ++k) v[c++] = p.beta_l_nbr[k];
  v[c++] = p.theta;
  return v;
}

OutcomeParams outcome_from_vector(int p, const Eigen::VectorXd& v) {
  if (v.size() != 2 * p + 4) throw std::invalid_argument("bad outcome vector size");
  OutcomeParams o;
  o.p = p;
  int c = 0;
  o.beta0 = v[c++];
  o.beta_a = v[c++];
  o.beta_a_nbr = v[c++];
  o.beta_l.resize(p);
  o.beta_l_nbr.resize(p);
  for (int k = 0; k < p; ++k) o.beta_l[k] = v[c++];
  for (int k = 0; k < p; ++k) o.beta_l_nbr[k] = v[c++];
  o.theta = v[c++];
  return o;
}

Eigen::VectorXd covariates_to_vector(const CovariateParams& cp) {
  const int p = cp.p;
  Eigen::VectorXd v(p + p * (p - 1) / 2 + p * (p + 1) / 2);
  int c = 0;
  for (int k = 0; k < p; ++k) v[c++] = cp.tau[k];
  for (int u = 0; u < p; ++u)
    for (int s = u + 1; s < p; ++s) v[c++] = cp.rho_at(u, s);
  for (int u = 0; u < p; ++u)
    for (int s = u; s < p; ++s) v[c++] = cp.nu_at(u, s);
  return v;
}

CovariateParams covariates_from_vector(int p, const Eigen::VectorXd& v) {
  if (v.size() != p + p * (p - 1) / 2 + p * (p + 1) / 2)
    throw std::invalid_argument("bad covariate vector size");
  std::vector<double> tau(p), rho(static_cast<size_t>(p) * p, 0.0),
      nu(static_cast<size_t>(p) * p, 0.0);
  int c = 0;
  for (int k = 0; k < p; ++k) tau[k] = v[c++];
  for (int u = 0; u < p; ++u)
    for (int s = u + 1; s < p; ++s) {
      rho[static_cast<size_t>(u) * p + s] = rho[static_cast<size_t>(s) * p + u] = v[c];
      ++c;
    }
  for (int u = 0; u < p; ++u)
    for (int s = u; s < p; ++s) {
      nu[static_cast<size_t>(u) * p + s] = nu[static_cast<size_t>(s) * p + u] = v[c];
      ++c;
    }
  return CovariateParams(p, std::move(tau), std::move(rho), std::move(nu));
}

FitResult fit_coding_outcome(const NetworkGraph& g, const FieldSample& f,
                             const StableSet& s, const FitOptions& opts,
                             WeightScheme w) {
  if (!is_stable(g, s.members)) throw std::invalid_argument("set is not stable");
  const auto d = build_outcome_design(g, f, s.members, w);
  return finish_coding(d, newton_logistic(d, opts), opts,
                       static_cast<int>(s.members.size()), /*sandwich=*/false);
}

FitResult fit_coding_covariates(const NetworkGraph& g, const FieldSample& f,
                                const StableSet& s, const FitOptions& opts,
                                WeightScheme w) {
  if (!is_stable(g, s.members)) throw std::invalid_argument("set is not stable");
  const auto d = build_covariate_design(g, f, s.members, w);
  return finish_coding(d, newton_logistic(d, opts), opts,
                       static_cast<int>(s.members.size()), /*sandwich=*/true);
}

FitResult fit_pl_outcome(const NetworkGraph& g, const FieldSample& f,
                         const FitOptions& opts, WeightScheme w) {
  const auto d = build_outcome_design(g, f, all_units(f.n), w);
  return finish_pl(newton_logistic(d, opts), f.n);
}

FitResult fit_pl_covariates(const NetworkGraph& g, const FieldSample& f,
                            const FitOptions& opts, WeightScheme w) {
  const auto d = build_covariate_design(g, f, all_units(f.n), w);
  return finish_pl(newton_logistic(d, opts), f.n);
}

FitResult fit_treatment(const NetworkGraph& g, const FieldSample& f,
                        const FitOptions& opts, WeightScheme w) {
  const auto d = build_treatment_design(g, f, all_units(f.n), w);
  return finish_pl(newton_logistic(d, opts), f.n);
}

void save_fit_json(const FitResult& r, const std::string& model_name, int p,
                   const std::string& path) {
  nlohmann::json j;
  j["model"] = model_name;
  j["p"] = p;
  j["estimate"] = std::vector<double>(r.estimate.data(),
                                      r.estimate.data() + r.estimate.size());
  if (r.has_covariance) {
    std::vector<std::vector<double>> cov(r.covariance.rows());
    for (int a = 0; a < r.covariance.rows(); ++a)
      for (int b = 0; b < r.covariance.cols(); ++b)
        cov[a].push_back(r.covariance(a, b));
    j["covariance"] = cov;
  } else {
    j["covariance"] = nullptr;
  }
  j["effective_n"] = r.effective_n;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["objective_value"] = r.objective_value;
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

FitResult load_fit_json(const std::string& path, std::string* model_name,
                        int* p) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  nlohmann::json j;
  in >> j;
  FitResult r;
  if (model_name) *model_name = j.at("model").get<std::string>();
  if (p) *p = j.at("p").get<int>();
  const auto est = j.at("estimate").get<std::vector<double>>();
  r.estimate = Eigen::Map<const Eigen::VectorXd>(est.data(), est.size());
  if (!j.at("covariance").is_null()) {
    const auto cov = j.at("covariance").get<std::vector<std::vector<double>>>();
    r.covariance.resize(cov.size(), cov.size());
    for (size_t a = 0; a < cov.size(); ++a)
      for (size_t b = 0; b < cov[a].size(); ++b)
        r.covariance(a, b) = cov[a][b];
    r.has_covariance = true;
  }
  r.effective_n = j.at("effective_n").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.iterations = j.at("iterations").get<int>();
  r.objective_value = j.value("objective_value", 0.0);
  r.diagnostic = j.value("diagnostic", "");
  return r;
}

}  // namespace autog
