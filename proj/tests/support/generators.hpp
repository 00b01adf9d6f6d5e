#pragma once

// Seeded random inputs for property tests.

#include <map>
#include <string>
#include <vector>

#include "dateiv/cbn.hpp"
#include "dateiv/rng.hpp"

namespace testgen {

// Random DAG over 2..max_vars variables with 2..max_domain values each;
// every CPT entry is strictly positive, so all full assignments have
// positive probability.
inline dateiv::CausalBayesNet random_net(dateiv::SplitMix64& rng,
                                         std::size_t max_vars = 5,
                                         std::size_t max_domain = 3) {
  const std::size_t n = 2 + rng.next_below(max_vars - 1);
  std::vector<dateiv::Variable> variables;
  std::map<std::string, std::vector<std::string>> parents;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t width = 2 + rng.next_below(max_domain - 1);
    std::vector<std::string> domain;
    for (std::size_t j = 0; j < width; ++j) domain.push_back(std::to_string(j));
    variables.push_back({"V" + std::to_string(v), std::move(domain)});

    std::vector<std::string> ps;
    for (std::size_t u = 0; u < v && ps.size() < 3; ++u) {
      if (rng.next_unit() < 0.5) ps.push_back("V" + std::to_string(u));
    }
    parents["V" + std::to_string(v)] = std::move(ps);
  }

  dateiv::Dag dag(variables, parents);
  dateiv::NetBuilder builder(dag);
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t width = variables[v].domain.size();
    std::size_t rows = 1;
    std::vector<std::size_t> parent_widths;
    for (const std::string& pname : parents[variables[v].name]) {
      const std::size_t pw = variables[dag.index_of(pname)].domain.size();
      parent_widths.push_back(pw);
      rows *= pw;
    }
    for (std::size_t row = 0; row < rows; ++row) {
      std::vector<std::string> parent_values;
      std::size_t rest = row;
      std::size_t scale = rows;
      for (std::size_t pw : parent_widths) {
        scale /= pw;
        parent_values.push_back(std::to_string(rest / scale));
        rest %= scale;
      }
      std::vector<double> dist(width);
      double sum = 0.0;
      for (double& p : dist) {
        p = 0.05 + rng.next_unit();
        sum += p;
      }
      for (double& p : dist) p /= sum;
      builder.row(variables[v].name, parent_values, dist);
    }
  }
  return builder.build();
}

inline dateiv::FullAssignment random_full_assignment(
    const dateiv::CausalBayesNet& net, dateiv::SplitMix64& rng) {
  dateiv::FullAssignment assignment;
  for (const dateiv::Variable& var : net.dag().variables()) {
    assignment.set(var.name, var.domain[rng.next_below(var.domain.size())]);
  }
  return assignment;
}

}  // namespace testgen
