#include "dateiv/population.hpp"

#include <set>
#include <utility>

#include "compensated_sum.hpp"
#include "dateiv/format.hpp"

namespace dateiv {

namespace {

void require_unit_interval(const std::string& id, const char* field, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw RangeError("individual '" + id + "': " + field + " = " +
                     format_double(p) + " outside [0, 1]");
  }
}

bool zero_or_one(double p) { return p == 0.0 || p == 1.0; }

bool is_classic_complier(const Individual& ind) {
  return ind.tau0 == 0.0 && ind.tau1 == 1.0;
}

}  // namespace

Population::Population(std::vector<Individual> individuals)
    : individuals_(std::move(individuals)) {
  if (individuals_.empty()) {
    throw ValidationError("population must contain at least one individual");
  }
  std::set<std::string> seen;
  for (const Individual& ind : individuals_) {
    require_unit_interval(ind.id, "tau0", ind.tau0);
    require_unit_interval(ind.id, "tau1", ind.tau1);
    require_unit_interval(ind.id, "kappa0", ind.kappa0);
    require_unit_interval(ind.id, "kappa1", ind.kappa1);
    if (!seen.insert(ind.id).second) {
      throw DuplicateIdError("duplicate individual id '" + ind.id + "'");
    }
  }
}

std::string to_string(ComplianceClass c) {
  switch (c) {
    case ComplianceClass::Complier: return "complier";
    case ComplianceClass::IndifferentTaker: return "indifferent_taker";
    case ComplianceClass::Defier: return "defier";
  }
  return "unknown";
}

double degree_of_compliance(const Individual& ind) {
  return ind.tau1 - ind.tau0;
}

double individual_treatment_effect(const Individual& ind) {
  return ind.kappa1 - ind.kappa0;
}

ComplianceClass classify(const Individual& ind) {
  const double dc = degree_of_compliance(ind);
  if (dc > 0.0) return ComplianceClass::Complier;
  if (dc < 0.0) return ComplianceClass::Defier;
  return ComplianceClass::IndifferentTaker;
}

std::vector<Individual> compliers(const Population& pop) {
  std::vector<Individual> out;
  for (const Individual& ind : pop.individuals()) {
    if (degree_of_compliance(ind) > 0.0) out.push_back(ind);
  }
  return out;
}

std::vector<double> date_weights(const Population& pop) {
  const std::vector<Individual> com = compliers(pop);
  if (com.empty()) {
    throw NoCompliersError(
        "population has no compliers (no individual with positive degree of "
        "compliance)");
  }
  detail::CompensatedSum denom;
  for (const Individual& ind : com) denom.add(degree_of_compliance(ind));
  std::vector<double> weights;
  weights.reserve(com.size());
  for (const Individual& ind : com) {
    weights.push_back(degree_of_compliance(ind) / denom.value());
  }
  return weights;
}

double date(const Population& pop) {
  const std::vector<Individual> com = compliers(pop);
  const std::vector<double> weights = date_weights(pop);
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i < com.size(); ++i) {
    acc.add(weights[i] * individual_treatment_effect(com[i]));
  }
  return acc.value();
}

double late(const Population& pop) {
  for (const Individual& ind : pop.individuals()) {
    if (!zero_or_one(ind.tau0) || !zero_or_one(ind.tau1) ||
        !zero_or_one(ind.kappa0) || !zero_or_one(ind.kappa1)) {
      throw NotDeterministicError("population is not deterministic: individual '" +
                                  ind.id + "' has a parameter outside {0, 1}");
    }
  }
  detail::CompensatedSum acc;
  std::size_t count = 0;
  for (const Individual& ind : pop.individuals()) {
    if (is_classic_complier(ind)) {
      acc.add(individual_treatment_effect(ind));
      ++count;
    }
  }
  if (count == 0) {
    throw NoCompliersError("population has no classic compliers (tau0=0, tau1=1)");
  }
  return acc.value() / static_cast<double>(count);
}

NoDefiersReport check_no_defiers(const Population& pop) {
  NoDefiersReport report;
  for (const Individual& ind : pop.individuals()) {
    if (ind.tau1 < ind.tau0) report.violators.push_back(ind.id);
  }
  report.holds = report.violators.empty();
  return report;
}

bool check_compliers_exist(const Population& pop) {
  for (const Individual& ind : pop.individuals()) {
    if (degree_of_compliance(ind) > 0.0) return true;
  }
  return false;
}

bool is_deterministic(const Population& pop) {
  for (const Individual& ind : pop.individuals()) {
    if (!zero_or_one(ind.tau0) || !zero_or_one(ind.tau1) ||
        !zero_or_one(ind.kappa0) || !zero_or_one(ind.kappa1)) {
      return false;
    }
  }
  return true;
}

}  // namespace dateiv
