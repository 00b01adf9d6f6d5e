#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dateiv/format.hpp"
#include "dateiv/iv.hpp"
#include "dateiv/population.hpp"
#include "dateiv/scenarios.hpp"
#include "dateiv/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;        // flag misuse, I/O, parse failures
constexpr int kExitAssumption = 2;   // assumption violated or estimand undefined
constexpr int kExitGap = 3;          // identity gap above tolerance

class UsageFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioChoice {
  std::string path;
  std::string builtin;
};

void add_scenario_options(CLI::App* cmd, ScenarioChoice& choice) {
  auto* scenario =
      cmd->add_option("--scenario", choice.path, "scenario JSON file");
  auto* builtin = cmd->add_option("--builtin", choice.builtin,
                                  "builtin scenario name (see `catalog`)");
  scenario->excludes(builtin);
  builtin->excludes(scenario);
}

dateiv::Scenario resolve_scenario(const ScenarioChoice& choice) {
  if (!choice.builtin.empty()) return dateiv::builtin_scenario(choice.builtin);
  if (!choice.path.empty()) return dateiv::load_scenario(choice.path);
  throw UsageFailure("pass exactly one of --scenario or --builtin");
}

std::uint64_t resolve_seed(const CLI::Option* seed_option, std::uint64_t flag_value) {
  if (seed_option->count() > 0) return flag_value;
  if (const char* env = std::getenv("DATEIV_SEED")) {
    std::uint64_t parsed = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, parsed);
    if (ec != std::errc() || ptr != end) {
      throw UsageFailure("DATEIV_SEED is not an unsigned integer: '" +
                         std::string(env) + "'");
    }
    return parsed;
  }
  return 42;
}

std::pair<std::string, std::string> parse_binding(const std::string& flag,
                                                  const std::string& text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw UsageFailure(flag + " expects VAR=VALUE, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

dateiv::PartialAssignment parse_assignment(const std::string& flag,
                                           const std::string& text) {
  dateiv::PartialAssignment assignment;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto [var, value] = parse_binding(flag, item);
    if (assignment.contains(var)) {
      throw UsageFailure(flag + " assigns variable '" + var + "' twice");
    }
    assignment.set(var, value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return assignment;
}

void print_row(const std::string& key, const std::string& value) {
  std::string padded = key;
  if (padded.size() < 28) padded.resize(28, ' ');
  std::cout << padded << value << '\n';
}

std::string value_or_reason(double v, const std::string& reason) {
  if (std::isnan(v)) return "undefined (" + reason + ")";
  return dateiv::format_fixed(v, 6);
}

// --- verify -----------------------------------------------------------------

int run_verify(const ScenarioChoice& choice, double tolerance,
               const std::string& format) {
  const dateiv::Scenario s = resolve_scenario(choice);
  const dateiv::IdentityReport report =
      dateiv::check_identity(s.population, s.config, tolerance);

  if (format == "json") {
    std::cout << dateiv::to_json(report) << '\n';
  } else {
    std::cout << "identity check (tolerance "
              << dateiv::format_scientific(tolerance, 6) << ")\n";
    for (const dateiv::AssumptionResult& a : report.assumptions) {
      std::string status = a.holds ? "pass" : "FAIL";
      if (a.by_construction) status += " (by construction)";
      print_row("  " + a.name, status + "  [" + a.details + "]");
    }
    print_row("  date", value_or_reason(report.date_value, report.date_error));
    print_row("  iv estimand",
              value_or_reason(report.iv_estimand_value, report.iv_error));
    print_row("  absolute gap",
              std::isnan(report.absolute_gap)
                  ? std::string("undefined")
                  : dateiv::format_scientific(report.absolute_gap, 6));
    print_row("  verdict", report.pass ? "PASS" : "FAIL");
  }

  if (!report.assumptions_hold) return kExitAssumption;
  if (std::isnan(report.absolute_gap)) return kExitAssumption;
  if (report.absolute_gap > tolerance) return kExitGap;
  return kExitOk;
}

// --- estimate ---------------------------------------------------------------

int run_estimate(const ScenarioChoice& choice, const CLI::Option* p_option,
                 double p_assign) {
  dateiv::Scenario s = resolve_scenario(choice);
  if (p_option->count() > 0) s.config.p_assign = p_assign;

  print_row("DATE", dateiv::format_fixed(dateiv::date(s.population), 6));
  if (dateiv::is_deterministic(s.population)) {
    print_row("LATE", dateiv::format_fixed(dateiv::late(s.population), 6));
  }

  int exit_code = kExitOk;
  try {
    const double iv = dateiv::iv_estimand(
        dateiv::build_iv_net(s.population, s.config));
    print_row("IV estimand", dateiv::format_fixed(iv, 6));
  } catch (const dateiv::ZeroDenominatorError& e) {
    print_row("IV estimand", std::string("undefined (") + e.what() + ")");
    exit_code = kExitAssumption;
  }

  std::size_t counts[3] = {0, 0, 0};
  for (const dateiv::Individual& ind : s.population.individuals()) {
    ++counts[static_cast<int>(dateiv::classify(ind))];
  }
  std::cout << "census: compliers="
            << counts[static_cast<int>(dateiv::ComplianceClass::Complier)]
            << " indifferent_takers="
            << counts[static_cast<int>(dateiv::ComplianceClass::IndifferentTaker)]
            << " defiers="
            << counts[static_cast<int>(dateiv::ComplianceClass::Defier)] << '\n';
  return exit_code;
}

// --- simulate ---------------------------------------------------------------

int run_simulate(const ScenarioChoice& choice, std::size_t n,
                 std::uint64_t seed, std::size_t bootstrap,
                 const std::string& out_path, const std::string& format) {
  const dateiv::Scenario s = resolve_scenario(choice);
  const dateiv::CausalBayesNet net = dateiv::build_iv_net(s.population, s.config);
  const std::vector<dateiv::TrialSample> samples = dateiv::sample(net, seed, n);

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      throw dateiv::IoError("cannot open '" + out_path + "' for writing");
    }
    dateiv::write_samples_csv(out, samples);
  }

  dateiv::TrialResult result = dateiv::wald_estimate(
      samples,
      dateiv::WaldOptions{bootstrap, dateiv::bootstrap_seed_for(seed)});
  result.exact_date = dateiv::date(s.population);
  const double abs_error = std::abs(result.wald_estimate - result.exact_date);

  if (format == "json") {
    nlohmann::json j;
    j["n"] = result.n;
    j["seed"] = seed;
    j["wald_estimate"] = result.wald_estimate;
    j["empirical_se"] = result.empirical_se;
    j["exact_date"] = result.exact_date;
    j["abs_error"] = abs_error;
    j["cure_contrast"] = result.cure_contrast;
    j["take_contrast"] = result.take_contrast;
    std::cout << j.dump(2) << '\n';
  } else if (format == "csv") {
    std::cout << dateiv::to_csv(result);
  } else {
    print_row("n", std::to_string(result.n));
    print_row("wald_estimate", dateiv::format_fixed(result.wald_estimate, 6));
    print_row("empirical_se", dateiv::format_fixed(result.empirical_se, 6));
    print_row("exact_date", dateiv::format_fixed(result.exact_date, 6));
    print_row("abs_error", dateiv::format_fixed(abs_error, 6));
  }
  return kExitOk;
}

// --- do-query ---------------------------------------------------------------

int run_do_query(const ScenarioChoice& choice, const std::string& do_spec,
                 const std::string& evidence_spec,
                 const std::string& target_spec) {
  const dateiv::Scenario s = resolve_scenario(choice);
  const dateiv::CausalBayesNet net =
      dateiv::build_iv_net(s.population, s.config);

  const auto [do_var, do_value] = parse_binding("--do", do_spec);
  const auto [target_var, target_value] = parse_binding("--target", target_spec);
  dateiv::PartialAssignment evidence;
  if (!evidence_spec.empty()) {
    evidence = parse_assignment("--evidence", evidence_spec);
  }

  const double p = net.do_query_evidence(do_var, do_value, evidence,
                                         {{target_var, target_value}});
  std::cout << dateiv::format_fixed(p, 6) << '\n';
  return kExitOk;
}

// --- generate ---------------------------------------------------------------

int run_generate(std::size_t n, std::uint64_t seed,
                 const dateiv::GenerateConstraints& constraints,
                 double p_assign, const std::string& out_path) {
  const dateiv::Population pop = dateiv::generate_random(n, seed, constraints);
  const dateiv::IvNetConfig cfg{p_assign};
  if (out_path.empty()) {
    std::cout << dateiv::scenario_to_json(pop, cfg) << '\n';
  } else {
    dateiv::save_scenario(pop, cfg, out_path);
  }
  return kExitOk;
}

// --- catalog ----------------------------------------------------------------

int run_catalog() {
  for (const dateiv::BuiltinInfo& info : dateiv::builtin_catalog()) {
    std::string name = info.name;
    if (name.size() < 18) name.resize(18, ' ');
    std::cout << name << "N=" << info.size << "  " << info.description << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Compliance-weighted treatment effects, instrumental-variable "
      "identity checks, interventional queries and trial simulation over "
      "stochastic potential outcomes"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  // verify
  ScenarioChoice verify_choice;
  double tolerance = 1e-9;
  std::string verify_format = "table";
  auto* verify = app.add_subcommand(
      "verify", "check that the weighted effect matches the IV estimand");
  add_scenario_options(verify, verify_choice);
  verify->add_option("--tol", tolerance, "gap tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--format", verify_format, "output format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
  verify->callback(
      [&] { exit_code = run_verify(verify_choice, tolerance, verify_format); });

  // estimate
  ScenarioChoice estimate_choice;
  double estimate_p_assign = 0.5;
  auto* estimate = app.add_subcommand(
      "estimate", "print DATE, LATE (when defined), IV estimand and census");
  add_scenario_options(estimate, estimate_choice);
  auto* estimate_p = estimate
                         ->add_option("--p-assign", estimate_p_assign,
                                      "override P(Assign=1)")
                         ->check(CLI::Range(std::nextafter(0.0, 1.0),
                                            std::nextafter(1.0, 0.0)));
  estimate->callback([&] {
    exit_code = run_estimate(estimate_choice, estimate_p, estimate_p_assign);
  });

  // simulate
  ScenarioChoice simulate_choice;
  std::size_t sim_n = 0;
  std::uint64_t sim_seed = 0;
  std::size_t sim_bootstrap = 200;
  std::string sim_out, sim_format = "table";
  auto* simulate = app.add_subcommand(
      "simulate", "draw trial samples and report the sample Wald estimate");
  add_scenario_options(simulate, simulate_choice);
  simulate->add_option("--n", sim_n, "number of samples")
      ->required()
      ->check(CLI::PositiveNumber);
  auto* sim_seed_opt = simulate->add_option(
      "--seed", sim_seed, "RNG seed (falls back to DATEIV_SEED, then 42)");
  simulate->add_option("--bootstrap", sim_bootstrap,
                       "bootstrap resamples for the standard error")
      ->capture_default_str();
  simulate->add_option("--out", sim_out, "write the sample dump CSV here");
  simulate->add_option("--format", sim_format, "output format")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
  simulate->callback([&] {
    exit_code = run_simulate(simulate_choice, sim_n,
                             resolve_seed(sim_seed_opt, sim_seed),
                             sim_bootstrap, sim_out, sim_format);
  });

  // do-query
  ScenarioChoice query_choice;
  std::string do_spec, evidence_spec, target_spec;
  auto* do_query = app.add_subcommand(
      "do-query", "interventional probability on the scenario's trial net");
  add_scenario_options(do_query, query_choice);
  do_query->add_option("--do", do_spec, "intervention, VAR=VALUE")->required();
  do_query->add_option("--evidence", evidence_spec,
                       "conjunctive evidence, VAR=VALUE[,VAR=VALUE...]");
  do_query->add_option("--target", target_spec, "queried event, VAR=VALUE")
      ->required();
  do_query->callback([&] {
    exit_code = run_do_query(query_choice, do_spec, evidence_spec, target_spec);
  });

  // generate
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 0;
  double gen_p_assign = 0.5;
  std::string gen_out;
  dateiv::GenerateConstraints constraints;
  auto* generate = app.add_subcommand(
      "generate", "write a random scenario as JSON (stdout or --out)");
  generate->add_option("--n", gen_n, "population size")
      ->required()
      ->check(CLI::PositiveNumber);
  auto* gen_seed_opt = generate->add_option(
      "--seed", gen_seed, "RNG seed (falls back to DATEIV_SEED, then 42)");
  generate->add_flag("--no-defiers", constraints.no_defiers,
                     "sort each (tau0, tau1) ascending");
  generate->add_flag("--force-complier", constraints.force_complier,
                     "redraw until some individual has positive compliance");
  generate->add_flag("--deterministic", constraints.deterministic,
                     "draw every parameter from {0, 1}");
  generate->add_option("--p-assign", gen_p_assign, "P(Assign=1) for the scenario")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)))
      ->capture_default_str();
  generate->add_option("--out", gen_out, "output path (stdout when omitted)");
  generate->callback([&] {
    exit_code = run_generate(gen_n, resolve_seed(gen_seed_opt, gen_seed),
                             constraints, gen_p_assign, gen_out);
  });

  // catalog
  app.add_subcommand("catalog", "list the builtin scenarios")
      ->callback([&] { exit_code = run_catalog(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const dateiv::NoCompliersError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const dateiv::NotDeterministicError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const dateiv::ZeroDenominatorError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const dateiv::EmptyArmError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const dateiv::ZeroSampleDenominatorError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const dateiv::ZeroProbabilityEvidenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const dateiv::ZeroProbabilityConditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const dateiv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return exit_code;
}
