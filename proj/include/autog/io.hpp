#pragma once

#include <string>

#include "autog/graph.hpp"
#include "autog/model.hpp"

namespace autog {

// Edge-list text format: one edge per line, two whitespace-separated 0-based
// unit indices; '#' comment lines and blank lines ignored.
NetworkGraph load_edge_list(const std::string& path, int n_units = -1);
void save_edge_list(const NetworkGraph& g, const std::string& path);

// Node table CSV: header "unit,L_1..L_p,A,Y", values in {0,1}, 0-based units.
FieldSample load_node_table(const std::string& path);
void save_node_table(const FieldSample& f, const std::string& path);

// Parameter file: JSON object with keys tau_l {tau, rho, nu}, tau_a {gamma},
// tau_y {beta0, beta_a, beta_a_nbr, beta_l, beta_l_nbr, theta}, weight_scheme.
// Matrices are row-major flat arrays.
ModelParams load_params(const std::string& path);
void save_params(const ModelParams& m, const std::string& path);

std::string weight_scheme_name(WeightScheme w);
WeightScheme weight_scheme_from_name(const std::string& s);

}  // namespace autog
