#pragma once

#include <string>
#include <vector>

#include "dateiv/errors.hpp"

namespace dateiv {

/// One unit's four Bernoulli parameters: the chance of taking the treatment
/// under each assignment arm (tau0, tau1) and the chance of being cured under
/// each uptake state (kappa0, kappa1). All four lie in [0, 1].
struct Individual {
  std::string id;
  double tau0 = 0.0;    ///< P(take | assigned to control)
  double tau1 = 0.0;    ///< P(take | assigned to treatment)
  double kappa0 = 0.0;  ///< P(cure | does not take)
  double kappa1 = 0.0;  ///< P(cure | takes)
};

/// Finite ordered collection of individuals with pairwise distinct ids.
class Population {
 public:
  /// Throws ValidationError when empty, RangeError when a parameter leaves
  /// [0, 1], DuplicateIdError on repeated ids.
  explicit Population(std::vector<Individual> individuals);

  const std::vector<Individual>& individuals() const { return individuals_; }
  std::size_t size() const { return individuals_.size(); }

 private:
  std::vector<Individual> individuals_;
};

enum class ComplianceClass { Complier, IndifferentTaker, Defier };

std::string to_string(ComplianceClass c);

/// tau1 - tau0: how much assignment raises this unit's uptake probability.
double degree_of_compliance(const Individual& ind);

/// kappa1 - kappa0: how much uptake raises this unit's cure probability.
double individual_treatment_effect(const Individual& ind);

/// Sign of the degree of compliance, compared exactly against zero.
ComplianceClass classify(const Individual& ind);

/// All individuals with strictly positive degree of compliance, in order.
std::vector<Individual> compliers(const Population& pop);

/// Weight of each complier in the compliance-weighted average, aligned with
/// compliers(pop). Weights are DC_i / sum of complier DCs and add up to 1.
std::vector<double> date_weights(const Population& pop);

/// Degree-of-compliance-weighted average treatment effect over the compliers.
/// Throws NoCompliersError when no individual has positive compliance.
double date(const Population& pop);

/// Classic local average treatment effect: the unweighted mean treatment
/// effect over individuals with (tau0, tau1) = (0, 1). Requires every
/// parameter in the population to be exactly 0 or 1.
double late(const Population& pop);

struct NoDefiersReport {
  bool holds = true;
  std::vector<std::string> violators;  ///< ids with tau1 < tau0
};

NoDefiersReport check_no_defiers(const Population& pop);

bool check_compliers_exist(const Population& pop);

/// True iff every parameter of every individual is exactly 0 or 1.
bool is_deterministic(const Population& pop);

}  // namespace dateiv
