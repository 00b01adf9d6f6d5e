#pragma once

// Brute-force reference implementations for the four-variable trial model.
// The joint is tabulated directly from the individuals' parameters and
// queried by exhaustive summation; CausalBayesNet is never involved, so
// these stay independent of the enumeration code they check.

#include <optional>
#include <vector>

#include "dateiv/population.hpp"

namespace oracle {

struct Cell {
  int assign;
  int indiv;  // 0-based position in the population
  int take;
  int cure;
  double p;
};

inline std::vector<Cell> joint_table(const dateiv::Population& pop,
                                     double p_assign) {
  const auto& inds = pop.individuals();
  const double uniform = 1.0 / static_cast<double>(inds.size());
  std::vector<Cell> table;
  table.reserve(8 * inds.size());
  for (int a = 0; a <= 1; ++a) {
    const double pa = a == 1 ? p_assign : 1.0 - p_assign;
    for (int i = 0; i < static_cast<int>(inds.size()); ++i) {
      const double tau = a == 1 ? inds[i].tau1 : inds[i].tau0;
      for (int t = 0; t <= 1; ++t) {
        const double pt = t == 1 ? tau : 1.0 - tau;
        const double kappa = t == 1 ? inds[i].kappa1 : inds[i].kappa0;
        for (int c = 0; c <= 1; ++c) {
          const double pc = c == 1 ? kappa : 1.0 - kappa;
          table.push_back({a, i, t, c, pa * uniform * pt * pc});
        }
      }
    }
  }
  return table;
}

inline double event(const std::vector<Cell>& table, std::optional<int> a,
                    std::optional<int> i, std::optional<int> t,
                    std::optional<int> c) {
  double total = 0.0;
  for (const Cell& cell : table) {
    if (a && cell.assign != *a) continue;
    if (i && cell.indiv != *i) continue;
    if (t && cell.take != *t) continue;
    if (c && cell.cure != *c) continue;
    total += cell.p;
  }
  return total;
}

inline double cure_given_assign(const std::vector<Cell>& table, int a) {
  return event(table, a, {}, {}, 1) / event(table, a, {}, {}, {});
}

inline double take_given_assign(const std::vector<Cell>& table, int a) {
  return event(table, a, {}, 1, {}) / event(table, a, {}, {}, {});
}

inline double iv_estimand(const dateiv::Population& pop, double p_assign) {
  const std::vector<Cell> table = joint_table(pop, p_assign);
  return (cure_given_assign(table, 1) - cure_given_assign(table, 0)) /
         (take_given_assign(table, 1) - take_given_assign(table, 0));
}

}  // namespace oracle
