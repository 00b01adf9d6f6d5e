#include "dateiv/scenarios.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dateiv/format.hpp"
#include "dateiv/rng.hpp"

namespace dateiv {

namespace {

using nlohmann::json;

constexpr std::size_t kForceComplierMaxAttempts = 1000;

double require_probability(const json& value, const std::string& field) {
  if (!value.is_number()) {
    throw ParseError(field + " must be a number");
  }
  const double p = value.get<double>();
  if (!(p >= 0.0 && p <= 1.0)) {
    throw RangeError(field + " = " + format_double(p) + " outside [0, 1]");
  }
  return p;
}

Individual parse_individual(const json& item, std::size_t index) {
  const std::string where = "individuals[" + std::to_string(index) + "]";
  if (!item.is_object()) {
    throw ParseError(where + " must be an object");
  }
  for (const auto& [key, value] : item.items()) {
    (void)value;
    if (key != "id" && key != "tau0" && key != "tau1" && key != "kappa0" &&
        key != "kappa1") {
      throw ParseError(where + ": unknown field '" + key + "'");
    }
  }
  if (!item.contains("id") || !item["id"].is_string() ||
      item["id"].get<std::string>().empty()) {
    throw ParseError(where + ": 'id' must be a non-empty string");
  }
  Individual ind;
  ind.id = item["id"].get<std::string>();
  for (const char* field : {"tau0", "tau1", "kappa0", "kappa1"}) {
    if (!item.contains(field)) {
      throw ParseError(where + " (id '" + ind.id + "'): missing field '" +
                       field + "'");
    }
  }
  const std::string label = where + " (id '" + ind.id + "')";
  ind.tau0 = require_probability(item["tau0"], label + ": tau0");
  ind.tau1 = require_probability(item["tau1"], label + ": tau1");
  ind.kappa0 = require_probability(item["kappa0"], label + ": kappa0");
  ind.kappa1 = require_probability(item["kappa1"], label + ": kappa1");
  return ind;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) {
    throw ParseError("scenario must be a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "schema_version" && key != "p_assign" && key != "individuals") {
      throw ParseError("unknown field '" + key + "'");
    }
  }
  if (!doc.contains("schema_version") ||
      !doc["schema_version"].is_number_integer()) {
    throw ParseError("'schema_version' must be present and an integer");
  }
  if (doc["schema_version"].get<int>() != kScenarioSchemaVersion) {
    throw ParseError("unsupported schema_version " +
                     doc["schema_version"].dump() + " (expected " +
                     std::to_string(kScenarioSchemaVersion) + ")");
  }

  IvNetConfig cfg;
  if (doc.contains("p_assign")) {
    if (!doc["p_assign"].is_number()) {
      throw ParseError("'p_assign' must be a number");
    }
    cfg.p_assign = doc["p_assign"].get<double>();
    if (!(cfg.p_assign > 0.0 && cfg.p_assign < 1.0)) {
      throw RangeError("p_assign = " + format_double(cfg.p_assign) +
                       " outside (0, 1)");
    }
  }

  if (!doc.contains("individuals") || !doc["individuals"].is_array() ||
      doc["individuals"].empty()) {
    throw ParseError("'individuals' must be a non-empty array");
  }
  std::vector<Individual> individuals;
  individuals.reserve(doc["individuals"].size());
  for (std::size_t i = 0; i < doc["individuals"].size(); ++i) {
    individuals.push_back(parse_individual(doc["individuals"][i], i));
  }
  return Scenario{Population(std::move(individuals)), cfg};
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scenario(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const RangeError& e) {
    throw RangeError(path.string() + ": " + e.what());
  }
}

std::string scenario_to_json(const Population& pop, const IvNetConfig& cfg,
                             int indent) {
  json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["p_assign"] = cfg.p_assign;
  doc["individuals"] = json::array();
  for (const Individual& ind : pop.individuals()) {
    doc["individuals"].push_back({{"id", ind.id},
                                  {"tau0", ind.tau0},
                                  {"tau1", ind.tau1},
                                  {"kappa0", ind.kappa0},
                                  {"kappa1", ind.kappa1}});
  }
  return doc.dump(indent);
}

void save_scenario(const Population& pop, const IvNetConfig& cfg,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << scenario_to_json(pop, cfg) << '\n';
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

Population generate_random(std::size_t n, std::uint64_t seed,
                           const GenerateConstraints& constraints) {
  if (n == 0) {
    throw RangeError("population size must be at least 1");
  }
  SplitMix64 rng(seed);
  const auto draw = [&]() {
    const double u = rng.next_unit();
    return constraints.deterministic ? (u < 0.5 ? 0.0 : 1.0) : u;
  };

  for (std::size_t attempt = 0;; ++attempt) {
    std::vector<Individual> individuals;
    individuals.reserve(n);
    bool any_complier = false;
    for (std::size_t i = 0; i < n; ++i) {
      Individual ind;
      ind.id = std::to_string(i + 1);
      ind.tau0 = draw();
      ind.tau1 = draw();
      ind.kappa0 = draw();
      ind.kappa1 = draw();
      if (constraints.no_defiers && ind.tau0 > ind.tau1) {
        std::swap(ind.tau0, ind.tau1);
      }
      any_complier = any_complier || ind.tau1 > ind.tau0;
      individuals.push_back(std::move(ind));
    }
    if (!constraints.force_complier || any_complier) {
      return Population(std::move(individuals));
    }
    if (attempt + 1 >= kForceComplierMaxAttempts) {
      throw Error("force_complier: no complier drawn after " +
                  std::to_string(kForceComplierMaxAttempts) + " attempts");
    }
  }
}

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> catalog{
      {"two-mixed", 2,
       "one complier (uptake 0.2 -> 0.8) and one indifferent taker; "
       "weighted effect and IV estimand both 0.6"},
      {"classic-late", 3,
       "deterministic complier, never-taker and always-taker; the classic "
       "identification case where LATE = DATE = IV estimand = 1"},
      {"paper-coarse", 1,
       "single individual, certain uptake when assigned, cure chance 0.5 "
       "untreated and 1.0 treated; effect 0.5"},
      {"with-defier", 2,
       "complier plus defier; the IV estimand leaves [-1, 1] (7.0) while "
       "the weighted effect over compliers is 1.0"},
      {"all-indifferent", 2,
       "two indifferent takers; no compliers and no uptake contrast, so "
       "both estimands are undefined"},
  };
  return catalog;
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "two-mixed") {
    return Scenario{Population({{"1", 0.2, 0.8, 0.1, 0.7},
                                {"2", 0.5, 0.5, 0.3, 0.9}}),
                    IvNetConfig{}};
  }
  if (name == "classic-late") {
    return Scenario{Population({{"1", 0.0, 1.0, 0.0, 1.0},
                                {"2", 0.0, 0.0, 0.0, 0.0},
                                {"3", 1.0, 1.0, 1.0, 1.0}}),
                    IvNetConfig{}};
  }
  if (name == "paper-coarse") {
    return Scenario{Population({{"1", 0.0, 1.0, 0.5, 1.0}}), IvNetConfig{}};
  }
  if (name == "with-defier") {
    return Scenario{Population({{"1", 0.0, 1.0, 0.0, 1.0},
                                {"2", 0.75, 0.0, 1.0, 0.0}}),
                    IvNetConfig{}};
  }
  if (name == "all-indifferent") {
    return Scenario{Population({{"1", 0.5, 0.5, 0.3, 0.9},
                                {"2", 0.2, 0.2, 0.5, 0.5}}),
                    IvNetConfig{}};
  }
  throw UnknownScenarioError("unknown builtin scenario '" + name +
                             "' (see the catalog command)");
}

}  // namespace dateiv
