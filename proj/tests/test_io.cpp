#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "autog/fit.hpp"
#include "autog/io.hpp"
#include "doctest.h"

using namespace autog;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() /
          ("autog_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const {
    return (dir / name).string();
  }
};

}  // namespace

TEST_CASE("edge list round trip") {
  TempDir t;
  const auto g = random_graph(40, 2, 5, 3);
  const auto path = t / "g.txt";
  save_edge_list(g, path);
  const auto back = load_edge_list(path);
  CHECK(back.n_units() == g.n_units());
  CHECK(back.edges() == g.edges());
}

TEST_CASE("edge list parsing tolerates comments and infers size") {
  TempDir t;
  const auto path = t / "hand.txt";
  {
    std::ofstream f(path);
    f << "# a comment\n\n0 1\n2 1\n";
  }
  const auto g = load_edge_list(path);
  CHECK(g.n_units() == 3);  // inferred from the largest index
  CHECK(g.n_edges() == 2);
  const auto g5 = load_edge_list(path, 5);
  CHECK(g5.n_units() == 5);
  CHECK_THROWS_AS(load_edge_list(t / "missing.txt"), std::runtime_error);
  {
    std::ofstream f(t / "bad.txt");
    f << "0 x\n";
  }
  CHECK_THROWS_AS(load_edge_list(t / "bad.txt"), std::runtime_error);
}

TEST_CASE("node table round trip") {
  TempDir t;
  FieldSample f(4, 2);
  f.A = {1, 0, 1, 0};
  f.Y = {0, 0, 1, 1};
  f.set_l(0, 0, 1);
  f.set_l(3, 1, 1);
  const auto path = t / "d.csv";
  save_node_table(f, path);
  const auto back = load_node_table(path);
  CHECK(back.n == 4);
  CHECK(back.p == 2);
  CHECK(back.L == f.L);
  CHECK(back.A == f.A);
  CHECK(back.Y == f.Y);
}

TEST_CASE("node table validation") {
  TempDir t;
  {
    std::ofstream f(t / "bad_header.csv");
    f << "unit,X_1,A,Y\n0,0,0,0\n";
  }
  CHECK_THROWS_AS(load_node_table(t / "bad_header.csv"), std::runtime_error);
  {
    std::ofstream f(t / "bad_value.csv");
    f << "unit,L_1,A,Y\n0,2,0,0\n";
  }
  CHECK_THROWS_AS(load_node_table(t / "bad_value.csv"), std::runtime_error);
}

TEST_CASE("parameter JSON round trip") {
  TempDir t;
  auto m = sim_defaults();
  m.weights = WeightScheme::degree_normalized;
  const auto path = t / "params.json";
  save_params(m, path);
  const auto back = load_params(path);
  CHECK(back.tau_l.tau == m.tau_l.tau);
  CHECK(back.tau_l.rho == m.tau_l.rho);
  CHECK(back.tau_l.nu == m.tau_l.nu);
  CHECK(back.tau_a.gamma == m.tau_a.gamma);
  CHECK(back.tau_y.beta0 == m.tau_y.beta0);
  CHECK(back.tau_y.beta_l == m.tau_y.beta_l);
  CHECK(back.tau_y.beta_l_nbr == m.tau_y.beta_l_nbr);
  CHECK(back.tau_y.theta == m.tau_y.theta);
  CHECK(back.weights == WeightScheme::degree_normalized);
}

TEST_CASE("weight scheme names") {
  CHECK(weight_scheme_name(WeightScheme::raw_sum) == "raw_sum");
  CHECK(weight_scheme_from_name("degree_normalized") ==
        WeightScheme::degree_normalized);
  CHECK_THROWS_AS(weight_scheme_from_name("bogus"), std::runtime_error);
}

TEST_CASE("parameter JSON validation") {
  TempDir t;
  {
    std::ofstream f(t / "bad.json");
    f << "{\"tau_l\":{\"tau\":[0.1],\"rho\":[0.0],\"nu\":[0.1]},"
         "\"tau_a\":{\"gamma\":[0,0,0,0]},"
         "\"tau_y\":{\"beta0\":0,\"beta_a\":0,\"beta_a_nbr\":0,"
         "\"beta_l\":[0,0],\"beta_l_nbr\":[0],\"theta\":0},"
         "\"weight_scheme\":\"raw_sum\"}";
  }
  CHECK_THROWS_AS(load_params(t / "bad.json"), std::runtime_error);
  CHECK_THROWS_AS(load_params(t / "nope.json"), std::runtime_error);
}

TEST_CASE("fit JSON round trip") {
  TempDir t;
  FitResult r;
  r.estimate = Eigen::Vector3d(0.1, -0.2, 0.3);
  r.covariance = Eigen::Matrix3d::Identity() * 0.5;
  r.has_covariance = true;
  r.converged = true;
  r.iterations = 7;
  r.effective_n = 150;
  r.objective_value = -42.5;
  const auto path = t / "fit.json";
  save_fit_json(r, "outcome", 3, path);
  std::string model;
  int p = 0;
  const auto back = load_fit_json(path, &model, &p);
  CHECK(model == "outcome");
  CHECK(p == 3);
  CHECK(back.converged);
  CHECK(back.iterations == 7);
  CHECK(back.effective_n == 150);
  CHECK(back.estimate.isApprox(r.estimate));
  CHECK(back.has_covariance);
  CHECK(back.covariance.isApprox(r.covariance));

  // covariance-free fits serialize with a null covariance
  r.has_covariance = false;
  save_fit_json(r, "outcome", 3, t / "fit2.json");
  const auto back2 = load_fit_json(t / "fit2.json", nullptr, nullptr);
  CHECK(!back2.has_covariance);
}
