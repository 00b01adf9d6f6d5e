#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "dateiv/iv.hpp"
#include "dateiv/rng.hpp"
#include "dateiv/scenarios.hpp"

using namespace dateiv;

namespace {

bool same_population(const Population& a, const Population& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Individual& x = a.individuals()[i];
    const Individual& y = b.individuals()[i];
    if (x.id != y.id || x.tau0 != y.tau0 || x.tau1 != y.tau1 ||
        x.kappa0 != y.kappa0 || x.kappa1 != y.kappa1) {
      return false;
    }
  }
  return true;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("serialization round-trips bit for bit") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SplitMix64 rng(seed);
    const Population pop = generate_random(1 + rng.next_below(10), seed);
    const IvNetConfig cfg{0.05 + 0.9 * rng.next_unit()};
    const Scenario restored = parse_scenario(scenario_to_json(pop, cfg));
    CHECK(same_population(restored.population, pop));
    CHECK(restored.config.p_assign == cfg.p_assign);
  }
}

TEST_CASE("save and load through a file") {
  const Scenario s = builtin_scenario("two-mixed");
  const auto path = temp_file("dateiv_roundtrip.json");
  save_scenario(s.population, s.config, path);
  const Scenario loaded = load_scenario(path);
  CHECK(same_population(loaded.population, s.population));
  CHECK(loaded.config.p_assign == 0.5);
  std::filesystem::remove(path);
}

TEST_CASE("load failures carry context") {
  CHECK_THROWS_AS((void)load_scenario("/does/not/exist.json"), IoError);

  CHECK_THROWS_AS((void)parse_scenario("{ not json"), ParseError);
  CHECK_THROWS_AS((void)parse_scenario("[1,2]"), ParseError);

  const std::string missing_version =
      R"({"individuals": [{"id": "a", "tau0": 0, "tau1": 1, "kappa0": 0, "kappa1": 1}]})";
  CHECK_THROWS_AS((void)parse_scenario(missing_version), ParseError);

  const std::string wrong_version =
      R"({"schema_version": 2, "individuals": [{"id": "a", "tau0": 0, "tau1": 1, "kappa0": 0, "kappa1": 1}]})";
  CHECK_THROWS_AS((void)parse_scenario(wrong_version), ParseError);

  const std::string unknown_top =
      R"({"schema_version": 1, "extra": 1, "individuals": [{"id": "a", "tau0": 0, "tau1": 1, "kappa0": 0, "kappa1": 1}]})";
  CHECK_THROWS_AS((void)parse_scenario(unknown_top), ParseError);

  const std::string unknown_field =
      R"({"schema_version": 1, "individuals": [{"id": "a", "taul": 0, "tau0": 0, "tau1": 1, "kappa0": 0, "kappa1": 1}]})";
  try {
    (void)parse_scenario(unknown_field);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("taul") != std::string::npos);
  }

  const std::string out_of_range =
      R"({"schema_version": 1, "individuals": [{"id": "a", "tau0": 0, "tau1": 1.2, "kappa0": 0, "kappa1": 1}]})";
  try {
    (void)parse_scenario(out_of_range);
    FAIL("expected RangeError");
  } catch (const RangeError& e) {
    CHECK(std::string(e.what()).find("tau1") != std::string::npos);
  }

  const std::string duplicate =
      R"({"schema_version": 1, "individuals": [
        {"id": "a", "tau0": 0, "tau1": 1, "kappa0": 0, "kappa1": 1},
        {"id": "a", "tau0": 0, "tau1": 1, "kappa0": 0, "kappa1": 1}]})";
  CHECK_THROWS_AS((void)parse_scenario(duplicate), DuplicateIdError);

  const std::string bad_p =
      R"({"schema_version": 1, "p_assign": 1.5, "individuals": [{"id": "a", "tau0": 0, "tau1": 1, "kappa0": 0, "kappa1": 1}]})";
  CHECK_THROWS_AS((void)parse_scenario(bad_p), RangeError);

  const std::string empty_list = R"({"schema_version": 1, "individuals": []})";
  CHECK_THROWS_AS((void)parse_scenario(empty_list), ParseError);
}

TEST_CASE("generated populations honor their constraints") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Population plain = generate_random(5, seed);
    CHECK(plain.size() == 5);
    CHECK(plain.individuals()[0].id == "1");

    const Population sorted =
        generate_random(5, seed, {.no_defiers = true});
    CHECK(check_no_defiers(sorted).holds);

    const Population det =
        generate_random(5, seed, {.deterministic = true});
    CHECK(is_deterministic(det));

    const Population forced =
        generate_random(3, seed, {.force_complier = true});
    CHECK(check_compliers_exist(forced));
  }
}

TEST_CASE("generation is reproducible and rejects n = 0") {
  const Population a = generate_random(8, 123);
  const Population b = generate_random(8, 123);
  CHECK(same_population(a, b));
  CHECK_THROWS_AS((void)generate_random(0, 1), RangeError);
}

TEST_CASE("constrained generation satisfies the identity check") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    SplitMix64 rng(seed);
    const Population pop =
        generate_random(1 + rng.next_below(30), seed,
                        {.no_defiers = true, .force_complier = true});
    CHECK(check_identity(pop, {}, 1e-9).pass);
  }
}

TEST_CASE("builtin catalog") {
  const auto& catalog = builtin_catalog();
  CHECK(catalog.size() == 5);
  for (const BuiltinInfo& info : catalog) {
    const Scenario s = builtin_scenario(info.name);
    CHECK(s.population.size() == info.size);
    CHECK_FALSE(info.description.empty());
  }
  CHECK_THROWS_AS((void)builtin_scenario("nope"), UnknownScenarioError);
}

TEST_CASE("builtin fixtures") {
  const Scenario two = builtin_scenario("two-mixed");
  REQUIRE(two.population.size() == 2);
  CHECK(two.population.individuals()[0].tau1 == 0.8);
  CHECK(two.population.individuals()[1].kappa1 == 0.9);
  CHECK(two.config.p_assign == 0.5);

  CHECK(is_deterministic(builtin_scenario("classic-late").population));
  CHECK(builtin_scenario("paper-coarse").population.individuals()[0].kappa0 ==
        0.5);

  const Scenario defier = builtin_scenario("with-defier");
  const auto report = check_no_defiers(defier.population);
  CHECK_FALSE(report.holds);

  const Scenario indifferent = builtin_scenario("all-indifferent");
  CHECK_FALSE(check_compliers_exist(indifferent.population));
}
