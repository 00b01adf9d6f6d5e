#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dateiv/iv.hpp"
#include "dateiv/population.hpp"

namespace dateiv {

inline constexpr int kScenarioSchemaVersion = 1;

struct Scenario {
  Population population;
  IvNetConfig config;
};

/// Parses scenario JSON: {"schema_version": 1, "p_assign": 0.5,
/// "individuals": [{"id", "tau0", "tau1", "kappa0", "kappa1"}, ...]}.
/// Unknown fields are rejected. p_assign is optional and defaults to 0.5.
Scenario parse_scenario(const std::string& json_text);

Scenario load_scenario(const std::filesystem::path& path);

std::string scenario_to_json(const Population& pop, const IvNetConfig& cfg,
                             int indent = 2);

/// Writes scenario JSON; load_scenario(save_scenario(...)) restores every
/// parameter bit for bit.
void save_scenario(const Population& pop, const IvNetConfig& cfg,
                   const std::filesystem::path& path);

struct GenerateConstraints {
  bool no_defiers = false;      ///< sort (tau0, tau1) ascending per individual
  bool force_complier = false;  ///< redraw until some DC > 0 (max 1000 tries)
  bool deterministic = false;   ///< draw parameters from {0, 1}
};

/// Population with ids "1".."n" and parameters i.i.d. uniform on [0, 1],
/// shaped by the constraints. Seeded and reproducible.
Population generate_random(std::size_t n, std::uint64_t seed,
                           const GenerateConstraints& constraints = {});

struct BuiltinInfo {
  std::string name;
  std::size_t size = 0;
  std::string description;
};

const std::vector<BuiltinInfo>& builtin_catalog();

/// Catalog lookup; throws UnknownScenarioError for names not listed by
/// builtin_catalog().
Scenario builtin_scenario(const std::string& name);

}  // namespace dateiv
