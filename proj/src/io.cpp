#include "autog/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace autog {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

}  // namespace

NetworkGraph load_edge_list(const std::string& path, int n_units) {
  auto in = open_in(path);
  std::vector<std::pair<int, int>> edges;
  int max_idx = -1;
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ss(line);
    int a, b;
    if (!(ss >> a >> b)) throw std::runtime_error("bad edge line: " + line);
    edges.emplace_back(a, b);
    max_idx = std::max({max_idx, a, b});
  }
  const int n = n_units >= 0 ? n_units : max_idx + 1;
  return NetworkGraph(n, std::move(edges));
}

void save_edge_list(const NetworkGraph& g, const std::string& path) {
  auto out = open_out(path);
  out << "# n_units " << g.n_units() << "\n";
  for (auto [a, b] : g.edges()) out << a << " " << b << "\n";
}

FieldSample load_node_table(const std::string& path) {
  auto in = open_in(path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty node table");
  int p = 0;
  {
    std::istringstream hs(header);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(hs, col, ',')) cols.push_back(col);
    if (cols.size() < 3 || cols.front() != "unit")
      throw std::runtime_error("bad node table header");
    p = static_cast<int>(cols.size()) - 3;
    for (int k = 0; k < p; ++k)
      if (cols[1 + k] != "L_" + std::to_string(k + 1))
        throw std::runtime_error("bad node table header: expected L_" +
                                 std::to_string(k + 1) + ", got " + cols[1 + k]);
    if (cols[1 + p] != "A" || cols[2 + p] != "Y")
      throw std::runtime_error("bad node table header: expected A,Y columns");
  }
  std::vector<std::vector<int>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ss(line);
    std::vector<int> vals;
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stoi(tok));
    if (static_cast<int>(vals.size()) != p + 3)
      throw std::runtime_error("bad node table row: " + line);
    rows.push_back(std::move(vals));
  }
  FieldSample f(static_cast<int>(rows.size()), p);
  for (const auto& r : rows) {
    const int i = r[0];
    if (i < 0 || i >= f.n) throw std::runtime_error("unit index out of range in node table");
    for (int k = 0; k < p; ++k) {
      if (r[1 + k] != 0 && r[1 + k] != 1) throw std::runtime_error("non-binary entry");
      f.set_l(i, k, static_cast<std::uint8_t>(r[1 + k]));
    }
    if ((r[1 + p] != 0 && r[1 + p] != 1) || (r[2 + p] != 0 && r[2 + p] != 1))
      throw std::runtime_error("non-binary entry");
    f.A[i] = static_cast<std::uint8_t>(r[1 + p]);
    f.Y[i] = static_cast<std::uint8_t>(r[2 + p]);
  }
  return f;
}

void save_node_table(const FieldSample& f, const std::string& path) {
  auto out = open_out(path);
  out << "unit";
  for (int k = 0; k < f.p; ++k) out << ",L_" << (k + 1);
  out << ",A,Y\n";
  for (int i = 0; i < f.n; ++i) {
    out << i;
    for (int k = 0; k < f.p; ++k) out << "," << int(f.l(i, k));
    out << "," << int(f.A[i]) << "," << int(f.Y[i]) << "\n";
  }
}

std::string weight_scheme_name(WeightScheme w) {
  return w == WeightScheme::raw_sum ? "raw_sum" : "degree_normalized";
}

WeightScheme weight_scheme_from_name(const std::string& s) {
  if (s == "raw_sum") return WeightScheme::raw_sum;
  if (s == "degree_normalized") return WeightScheme::degree_normalized;
  throw std::runtime_error("unknown weight_scheme: " + s);
}

ModelParams load_params(const std::string& path) {
  auto in = open_in(path);
  nlohmann::json j;
  in >> j;
  ModelParams m;
  const auto& jl = j.at("tau_l");
  auto tau = jl.at("tau").get<std::vector<double>>();
  const int p = static_cast<int>(tau.size());
  m.tau_l = CovariateParams(p, std::move(tau),
                            jl.at("rho").get<std::vector<double>>(),
                            jl.at("nu").get<std::vector<double>>());
  m.tau_a = TreatmentParams(p, j.at("tau_a").at("gamma").get<std::vector<double>>());
  const auto& jy = j.at("tau_y");
  m.tau_y.p = p;
  m.tau_y.beta0 = jy.at("beta0").get<double>();
  m.tau_y.beta_a = jy.at("beta_a").get<double>();
  m.tau_y.beta_a_nbr = jy.at("beta_a_nbr").get<double>();
  m.tau_y.beta_l = jy.at("beta_l").get<std::vector<double>>();
  m.tau_y.beta_l_nbr = jy.at("beta_l_nbr").get<std::vector<double>>();
  m.tau_y.theta = jy.at("theta").get<double>();
  if (static_cast<int>(m.tau_y.beta_l.size()) != p ||
      static_cast<int>(m.tau_y.beta_l_nbr.size()) != p)
    throw std::runtime_error("tau_y covariate coefficient length mismatch");
  m.weights = weight_scheme_from_name(j.value("weight_scheme", "raw_sum"));
  return m;
}

void save_params(const ModelParams& m, const std::string& path) {
  nlohmann::json j;
  j["tau_l"] = {{"tau", m.tau_l.tau}, {"rho", m.tau_l.rho}, {"nu", m.tau_l.nu}};
  j["tau_a"] = {{"gamma", m.tau_a.gamma}};
  j["tau_y"] = {{"beta0", m.tau_y.beta0},
                {"beta_a", m.tau_y.beta_a},
                {"beta_a_nbr", m.tau_y.beta_a_nbr},
                {"beta_l", m.tau_y.beta_l},
                {"beta_l_nbr", m.tau_y.beta_l_nbr},
                {"theta", m.tau_y.theta}};
  j["weight_scheme"] = weight_scheme_name(m.weights);
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace autog
