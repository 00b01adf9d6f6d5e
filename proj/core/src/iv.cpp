#include "dateiv/iv.hpp"

#include <cmath>

#include <json.hpp>

#include "compensated_sum.hpp"
#include "dateiv/format.hpp"

namespace dateiv {

CausalBayesNet build_iv_net(const Population& pop, const IvNetConfig& cfg) {
  if (!(cfg.p_assign > 0.0 && cfg.p_assign < 1.0)) {
    throw RangeError("p_assign = " + format_double(cfg.p_assign) +
                     " outside (0, 1)");
  }

  std::vector<std::string> ids;
  ids.reserve(pop.size());
  for (const Individual& ind : pop.individuals()) ids.push_back(ind.id);

  const std::vector<std::string> binary{"0", "1"};
  Dag dag({{"Assign", binary}, {"Indiv", ids}, {"Take", binary}, {"Cure", binary}},
          {{"Take", {"Assign", "Indiv"}}, {"Cure", {"Take", "Indiv"}}});

  NetBuilder builder(std::move(dag));
  builder.row("Assign", {}, {1.0 - cfg.p_assign, cfg.p_assign});

  const double uniform = 1.0 / static_cast<double>(pop.size());
  builder.row("Indiv", {}, std::vector<double>(pop.size(), uniform));

  for (const Individual& ind : pop.individuals()) {
    builder.row("Take", {"0", ind.id}, {1.0 - ind.tau0, ind.tau0});
    builder.row("Take", {"1", ind.id}, {1.0 - ind.tau1, ind.tau1});
    builder.row("Cure", {"0", ind.id}, {1.0 - ind.kappa0, ind.kappa0});
    builder.row("Cure", {"1", ind.id}, {1.0 - ind.kappa1, ind.kappa1});
  }
  return builder.build();
}

double wald_ratio(const IvConditionals& c) {
  return (c.cure_given_assign1 - c.cure_given_assign0) /
         (c.take_given_assign1 - c.take_given_assign0);
}

IvConditionals enumerated_conditionals(const CausalBayesNet& net) {
  IvConditionals c;
  c.cure_given_assign1 =
      net.conditional_probability({{"Cure", "1"}}, {{"Assign", "1"}});
  c.cure_given_assign0 =
      net.conditional_probability({{"Cure", "1"}}, {{"Assign", "0"}});
  c.take_given_assign1 =
      net.conditional_probability({{"Take", "1"}}, {{"Assign", "1"}});
  c.take_given_assign0 =
      net.conditional_probability({{"Take", "1"}}, {{"Assign", "0"}});
  return c;
}

IvConditionals closed_form_conditionals(const Population& pop) {
  detail::CompensatedSum cure1, cure0, take1, take0;
  for (const Individual& ind : pop.individuals()) {
    cure1.add(ind.kappa1 * ind.tau1 + ind.kappa0 * (1.0 - ind.tau1));
    cure0.add(ind.kappa1 * ind.tau0 + ind.kappa0 * (1.0 - ind.tau0));
    take1.add(ind.tau1);
    take0.add(ind.tau0);
  }
  const double n = static_cast<double>(pop.size());
  return IvConditionals{cure1.value() / n, cure0.value() / n,
                        take1.value() / n, take0.value() / n};
}

double iv_estimand(const CausalBayesNet& net) {
  const IvConditionals c = enumerated_conditionals(net);
  const double take_contrast = c.take_given_assign1 - c.take_given_assign0;
  if (std::abs(take_contrast) <= kTakeContrastFloor) {
    throw ZeroDenominatorError(
        "assignment has no net effect on uptake (take contrast " +
        format_double(take_contrast) + ")");
  }
  return wald_ratio(c);
}

IdentityReport check_identity(const Population& pop, const IvNetConfig& cfg,
                              double tolerance) {
  IdentityReport report;
  report.tolerance = tolerance;

  const NoDefiersReport no_defiers = check_no_defiers(pop);
  std::string defier_details = "tau1 >= tau0 for every individual";
  if (!no_defiers.holds) {
    defier_details = "violated by ids:";
    for (const std::string& id : no_defiers.violators) defier_details += " " + id;
  }
  report.assumptions.push_back(
      {"(i) no defiers", no_defiers.holds, false, defier_details});

  const bool have_compliers = check_compliers_exist(pop);
  report.assumptions.push_back(
      {"(ii) compliers exist", have_compliers, false,
       have_compliers ? "some individual has positive degree of compliance"
                      : "no individual has positive degree of compliance"});

  report.assumptions.push_back(
      {"(iii) factorization rule", true, true,
       "the trial net factorizes the joint by construction"});
  report.assumptions.push_back(
      {"(iv) bridge principle", true, true,
       "CPT rows are the individuals' tau/kappa parameters by construction"});

  report.assumptions_hold = no_defiers.holds && have_compliers;

  try {
    report.date_value = date(pop);
  } catch (const NoCompliersError& e) {
    report.date_error = e.what();
  }
  try {
    report.iv_estimand_value = iv_estimand(build_iv_net(pop, cfg));
  } catch (const ZeroDenominatorError& e) {
    report.iv_error = e.what();
  }

  report.absolute_gap = std::abs(report.date_value - report.iv_estimand_value);
  report.pass = report.assumptions_hold && !std::isnan(report.absolute_gap) &&
                report.absolute_gap <= tolerance;
  return report;
}

std::string to_json(const IdentityReport& report, int indent) {
  nlohmann::json j;
  j["date"] = report.date_value;
  j["iv_estimand"] = report.iv_estimand_value;
  j["absolute_gap"] = report.absolute_gap;
  j["tolerance"] = report.tolerance;
  j["assumptions"] = nlohmann::json::array();
  for (const AssumptionResult& a : report.assumptions) {
    j["assumptions"].push_back({{"name", a.name},
                                {"holds", a.holds},
                                {"by_construction", a.by_construction},
                                {"details", a.details}});
  }
  j["assumptions_hold"] = report.assumptions_hold;
  j["pass"] = report.pass;
  j["date_error"] = report.date_error;
  j["iv_error"] = report.iv_error;
  return j.dump(indent);
}

}  // namespace dateiv
