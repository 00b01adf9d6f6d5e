#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "dateiv/cbn.hpp"
#include "dateiv/iv.hpp"
#include "dateiv/scenarios.hpp"
#include "generators.hpp"

using namespace dateiv;

namespace {

CausalBayesNet two_mixed_net() {
  return build_iv_net(builtin_scenario("two-mixed").population);
}

CausalBayesNet chain_point_mass() {
  // A -> B, both certain to be "1".
  Dag dag({{"A", {"0", "1"}}, {"B", {"0", "1"}}}, {{"B", {"A"}}});
  return NetBuilder(dag)
      .row("A", {}, {0.0, 1.0})
      .row("B", {"0"}, {1.0, 0.0})
      .row("B", {"1"}, {0.0, 1.0})
      .build();
}

std::set<std::string> as_set(const std::vector<std::string>& names) {
  return {names.begin(), names.end()};
}

}  // namespace

TEST_CASE("topological order puts parents first, stable by declaration") {
  const auto order = two_mixed_net().dag().topological_order();
  CHECK(order == std::vector<std::string>{"Assign", "Indiv", "Take", "Cure"});

  Dag single({{"X", {"0", "1"}}}, {});
  CHECK(single.topological_order() == std::vector<std::string>{"X"});

  Dag cyclic({{"A", {"0", "1"}}, {"B", {"0", "1"}}},
             {{"A", {"B"}}, {"B", {"A"}}});
  CHECK_THROWS_AS((void)cyclic.topological_order(), CyclicGraphError);
  CHECK_FALSE(cyclic.is_acyclic());
}

TEST_CASE("non-descendants on the trial DAG") {
  const auto net = two_mixed_net();
  const Dag& dag = net.dag();
  CHECK(as_set(dag.non_descendants("Take")) ==
        std::set<std::string>{"Assign", "Indiv"});
  CHECK(as_set(dag.non_descendants("Cure")) ==
        std::set<std::string>{"Assign", "Indiv", "Take"});
  CHECK(as_set(dag.non_descendants("Assign")) == std::set<std::string>{"Indiv"});
  CHECK_THROWS_AS((void)dag.non_descendants("Nope"), UnknownVariableError);
}

TEST_CASE("dag construction rejects malformed inputs") {
  CHECK_THROWS_AS(Dag({{"A", {"0", "0"}}}, {}), ValidationError);
  CHECK_THROWS_AS(Dag({{"A", {"0", "1"}}, {"A", {"0", "1"}}}, {}),
                  ValidationError);
  CHECK_THROWS_AS(Dag({{"A", {"0", "1"}}}, {{"A", {"Missing"}}}),
                  UnknownVariableError);
  CHECK_THROWS_AS(Dag({{"A", {"0", "1"}}, {"B", {"0", "1"}}},
                      {{"B", {"A", "A"}}}),
                  ValidationError);
}

TEST_CASE("joint probability multiplies CPT entries") {
  const auto net = chain_point_mass();
  CHECK(net.joint_probability({{"A", "1"}, {"B", "1"}}) == 1.0);
  CHECK(net.joint_probability({{"A", "0"}, {"B", "1"}}) == 0.0);

  const auto trial = two_mixed_net();
  CHECK(trial.joint_probability(
            {{"Assign", "1"}, {"Indiv", "1"}, {"Take", "1"}, {"Cure", "1"}}) ==
        doctest::Approx(0.14).epsilon(1e-12));
  CHECK_THROWS_AS((void)trial.joint_probability({{"Assign", "1"}}),
                  ValidationError);
}

TEST_CASE("event probability marginalizes the joint") {
  const auto trial = two_mixed_net();
  CHECK(trial.event_probability({}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trial.event_probability({{"Take", "1"}, {"Assign", "1"}}) ==
        doctest::Approx(0.325).epsilon(1e-12));

  const FullAssignment v{
      {"Assign", "1"}, {"Indiv", "2"}, {"Take", "0"}, {"Cure", "1"}};
  CHECK(trial.event_probability(v) == trial.joint_probability(v));
}

TEST_CASE("conditional probability from the factorized joint") {
  const auto trial = two_mixed_net();
  CHECK(trial.conditional_probability({{"Take", "1"}}, {{"Assign", "1"}}) ==
        doctest::Approx(0.65).epsilon(1e-12));
  CHECK(trial.conditional_probability({{"Cure", "1"}}, {{"Assign", "1"}}) ==
        doctest::Approx(0.59).epsilon(1e-12));

  const auto point = chain_point_mass();
  CHECK(point.conditional_probability({{"B", "1"}}, {{"A", "1"}}) == 1.0);
  CHECK_THROWS_AS(
      (void)point.conditional_probability({{"B", "1"}}, {{"A", "0"}}),
      ZeroProbabilityConditionError);
  CHECK_THROWS_AS(
      (void)trial.conditional_probability({{"Take", "1"}}, {{"Take", "0"}}),
      OverlappingAssignmentsError);
}

TEST_CASE("assignments are validated against the net") {
  const auto trial = two_mixed_net();
  CHECK_THROWS_AS((void)trial.event_probability({{"Bogus", "1"}}),
                  UnknownVariableError);
  CHECK_THROWS_AS((void)trial.event_probability({{"Cure", "2"}}),
                  UnknownValueError);
}

TEST_CASE("interventional query under complete evidence") {
  const auto trial = two_mixed_net();
  const FullAssignment v{
      {"Assign", "0"}, {"Indiv", "1"}, {"Take", "0"}, {"Cure", "0"}};
  CHECK(trial.do_query_complete("Take", "1", v, {{"Cure", "1"}}) ==
        doctest::Approx(0.7).epsilon(1e-12));

  const FullAssignment v2{
      {"Assign", "0"}, {"Indiv", "2"}, {"Take", "0"}, {"Cure", "0"}};
  CHECK(trial.do_query_complete("Assign", "1", v2, {{"Take", "1"}}) ==
        doctest::Approx(0.5).epsilon(1e-12));

  CHECK(trial.do_query_complete("Take", "1", v, {{"Take", "1"}}) == 1.0);
  CHECK(trial.do_query_complete("Take", "1", v, {{"Take", "0"}}) == 0.0);
}

TEST_CASE("interventional query under partial evidence") {
  const auto trial = two_mixed_net();
  CHECK(trial.do_query_evidence("Take", "1", {{"Indiv", "1"}}, {{"Cure", "1"}}) ==
        doctest::Approx(0.7).epsilon(1e-12));
  CHECK(trial.do_query_evidence("Take", "1", {}, {{"Cure", "1"}}) ==
        doctest::Approx(0.8).epsilon(1e-12));

  const FullAssignment v{
      {"Assign", "1"}, {"Indiv", "2"}, {"Take", "1"}, {"Cure", "0"}};
  CHECK(trial.do_query_evidence("Take", "1", v, {{"Cure", "1"}}) ==
        trial.do_query_complete("Take", "1", v, {{"Cure", "1"}}));

  const auto point = chain_point_mass();
  CHECK_THROWS_AS(
      (void)point.do_query_evidence("B", "1", {{"A", "0"}}, {{"B", "1"}}),
      ZeroProbabilityEvidenceError);
}

TEST_CASE("validate reports every violation with a location") {
  CHECK(two_mixed_net().validate().ok());

  Dag dag({{"A", {"0", "1"}}, {"B", {"0", "1"}}}, {{"B", {"A"}}});
  NetBuilder builder(dag);
  builder.row("A", {}, {0.6, 0.3});       // row sum 0.9
  builder.row("B", {"0"}, {0.5, 0.5});    // row B(A=1) left missing
  const auto report = builder.build().validate();
  REQUIRE(report.violations.size() == 2);

  bool saw_row_sum = false, saw_missing = false;
  for (const Violation& v : report.violations) {
    if (v.kind == Violation::Kind::RowSum) {
      saw_row_sum = true;
      CHECK(v.location == "A()");
    }
    if (v.kind == Violation::Kind::MissingRow) {
      saw_missing = true;
      CHECK(v.location == "B(A=1)");
    }
  }
  CHECK(saw_row_sum);
  CHECK(saw_missing);

  NetBuilder negative(dag);
  negative.row("A", {}, {1.3, -0.3});
  negative.row("B", {"0"}, {0.5, 0.5});
  negative.row("B", {"1"}, {0.5, 0.5});
  const auto ranges = negative.build().validate();
  CHECK(std::count_if(ranges.violations.begin(), ranges.violations.end(),
                      [](const Violation& v) {
                        return v.kind == Violation::Kind::EntryRange;
                      }) == 2);

  Dag cyclic({{"A", {"0", "1"}}, {"B", {"0", "1"}}},
             {{"A", {"B"}}, {"B", {"A"}}});
  NetBuilder loop(cyclic);
  loop.row("A", {"0"}, {0.5, 0.5}).row("A", {"1"}, {0.5, 0.5});
  loop.row("B", {"0"}, {0.5, 0.5}).row("B", {"1"}, {0.5, 0.5});
  const auto cycle_report = loop.build().validate();
  CHECK(std::any_of(cycle_report.violations.begin(),
                    cycle_report.violations.end(), [](const Violation& v) {
                      return v.kind == Violation::Kind::Cycle;
                    }));
}

TEST_CASE("builder rejects structurally bad rows") {
  Dag dag({{"A", {"0", "1"}}, {"B", {"0", "1"}}}, {{"B", {"A"}}});
  NetBuilder builder(dag);
  CHECK_THROWS_AS(builder.row("Nope", {}, {1.0}), UnknownVariableError);
  CHECK_THROWS_AS(builder.row("B", {}, {0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(builder.row("B", {"2"}, {0.5, 0.5}), UnknownValueError);
  CHECK_THROWS_AS(builder.row("A", {}, {0.5, 0.25, 0.25}), ValidationError);
}

TEST_CASE("random net properties") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SplitMix64 rng = SplitMix64::stream(2024, seed);
    const auto net = testgen::random_net(rng);
    REQUIRE(net.validate().ok());

    // Normalization of the factorized joint.
    CHECK(net.event_probability({}) == doctest::Approx(1.0).epsilon(1e-9));

    const auto v = testgen::random_full_assignment(net, rng);

    // Adding constraints never increases an event's probability.
    PartialAssignment shorter, longer;
    std::size_t taken = 0;
    for (const auto& [name, value] : v.entries()) {
      longer.set(name, value);
      if (++taken <= 1) shorter.set(name, value);
    }
    CHECK(net.event_probability(longer) <=
          net.event_probability(shorter) + 1e-12);

    // Conditioning on parents plus any non-descendants returns the CPT row.
    for (std::size_t var = 0; var < net.dag().variable_count(); ++var) {
      const Variable& x = net.dag().variable(var);
      PartialAssignment given;
      for (std::size_t p : net.dag().parent_indices(var)) {
        given.set(net.dag().variable(p).name,
                  v.at(net.dag().variable(p).name));
      }
      for (const std::string& nd : net.dag().non_descendants(x.name)) {
        given.set(nd, v.at(nd));
      }
      const std::size_t row = net.row_index(var, net.to_value_indices(v));
      const auto dist = net.row_distribution(var, row);
      for (std::size_t j = 0; j < x.domain.size(); ++j) {
        CHECK(net.conditional_probability({{x.name, x.domain[j]}}, given) ==
              doctest::Approx(dist[j]).epsilon(1e-9));
      }
    }

    // Full-evidence interventional queries reduce to the complete form.
    for (std::size_t var = 0; var < net.dag().variable_count(); ++var) {
      const Variable& x = net.dag().variable(var);
      const std::string target_var =
          net.dag().variable((var + 1) % net.dag().variable_count()).name;
      const std::string target_value = v.at(target_var);
      const double via_evidence = net.do_query_evidence(
          x.name, x.domain[0], v, {{target_var, target_value}});
      const double via_complete = net.do_query_complete(
          x.name, x.domain[0], v, {{target_var, target_value}});
      CHECK(via_evidence == via_complete);
    }

    // Intervening on a root is plain conditioning on it and the other roots.
    for (std::size_t var = 0; var < net.dag().variable_count(); ++var) {
      if (!net.dag().parent_indices(var).empty()) continue;
      const Variable& root = net.dag().variable(var);
      PartialAssignment given{{root.name, root.domain[0]}};
      for (const std::string& nd : net.dag().non_descendants(root.name)) {
        given.set(nd, v.at(nd));
      }
      const std::string target_var =
          net.dag().variable((var + 1) % net.dag().variable_count()).name;
      if (given.contains(target_var)) continue;
      const std::string target_value = v.at(target_var);
      const double lhs = net.do_query_complete(root.name, root.domain[0], v,
                                               {{target_var, target_value}});
      const double rhs =
          net.conditional_probability({{target_var, target_value}}, given);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("net json export carries domains, parents and rows") {
  const auto net = two_mixed_net();
  const auto doc = nlohmann::json::parse(net_to_json(net));
  REQUIRE(doc["variables"].size() == 4);
  CHECK(doc["variables"][0]["name"] == "Assign");
  CHECK(doc["variables"][1]["domain"] ==
        nlohmann::json::array({"1", "2"}));
  CHECK(doc["parents"]["Take"] == nlohmann::json::array({"Assign", "Indiv"}));
  CHECK(doc["cpts"]["Assign"][""] == nlohmann::json::array({0.5, 0.5}));
  REQUIRE(doc["cpts"]["Take"].contains("1,1"));
  CHECK(doc["cpts"]["Take"]["1,1"][1] == 0.8);
}
