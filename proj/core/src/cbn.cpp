#include "dateiv/cbn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include <json.hpp>

#include "dateiv/format.hpp"

namespace dateiv {

// ---------------------------------------------------------------------------
// Dag

Dag::Dag(std::vector<Variable> variables,
         std::map<std::string, std::vector<std::string>> parents)
    : variables_(std::move(variables)) {
  if (variables_.empty()) {
    throw ValidationError("a net needs at least one variable");
  }
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const Variable& var = variables_[i];
    if (var.name.empty()) {
      throw ValidationError("variable names must be non-empty");
    }
    if (var.domain.empty()) {
      throw ValidationError("variable '" + var.name + "' needs a non-empty domain");
    }
    std::set<std::string> labels(var.domain.begin(), var.domain.end());
    if (labels.size() != var.domain.size()) {
      throw ValidationError("variable '" + var.name + "' has duplicate domain values");
    }
    if (!index_.emplace(var.name, i).second) {
      throw ValidationError("duplicate variable '" + var.name + "'");
    }
  }

  parents_.resize(variables_.size());
  children_.resize(variables_.size());
  for (const auto& [name, parent_names] : parents) {
    const std::size_t child = index_of(name);
    std::set<std::string> seen;
    for (const std::string& parent_name : parent_names) {
      if (!seen.insert(parent_name).second) {
        throw ValidationError("variable '" + name + "' lists parent '" +
                              parent_name + "' twice");
      }
      const std::size_t parent = index_of(parent_name);
      parents_[child].push_back(parent);
      children_[parent].push_back(child);
    }
  }
}

bool Dag::has_variable(const std::string& name) const {
  return index_.count(name) > 0;
}

std::size_t Dag::index_of(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) {
    throw UnknownVariableError("unknown variable '" + name + "'");
  }
  return it->second;
}

const std::vector<std::size_t>& Dag::parent_indices(std::size_t index) const {
  return parents_[index];
}

const std::vector<std::size_t>& Dag::child_indices(std::size_t index) const {
  return children_[index];
}

bool Dag::is_acyclic() const {
  try {
    (void)topological_order();
    return true;
  } catch (const CyclicGraphError&) {
    return false;
  }
}

std::vector<std::string> Dag::topological_order() const {
  const std::size_t n = variables_.size();
  std::vector<bool> placed(n, false);
  std::vector<std::string> order;
  order.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    bool advanced = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      const bool ready = std::all_of(parents_[i].begin(), parents_[i].end(),
                                     [&](std::size_t p) { return placed[p]; });
      if (ready) {
        placed[i] = true;
        order.push_back(variables_[i].name);
        advanced = true;
        break;
      }
    }
    if (!advanced) {
      throw CyclicGraphError("graph has no topological order (directed cycle)");
    }
  }
  return order;
}

std::vector<std::size_t> Dag::non_descendant_indices(std::size_t x) const {
  std::vector<bool> reachable(variables_.size(), false);
  std::vector<std::size_t> stack{x};
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t child : children_[u]) {
      if (!reachable[child]) {
        reachable[child] = true;
        stack.push_back(child);
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (i != x && !reachable[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::string> Dag::non_descendants(const std::string& x) const {
  std::vector<std::string> out;
  for (std::size_t i : non_descendant_indices(index_of(x))) {
    out.push_back(variables_[i].name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CausalBayesNet

CausalBayesNet::CausalBayesNet(Dag dag, std::vector<Table> tables)
    : dag_(std::move(dag)), tables_(std::move(tables)) {}

int CausalBayesNet::value_index(std::size_t variable_index,
                                const std::string& value) const {
  const Variable& var = dag_.variable(variable_index);
  const auto it = std::find(var.domain.begin(), var.domain.end(), value);
  if (it == var.domain.end()) {
    throw UnknownValueError("variable '" + var.name + "' has no value '" +
                            value + "'");
  }
  return static_cast<int>(it - var.domain.begin());
}

std::vector<int> CausalBayesNet::to_value_indices(
    const PartialAssignment& a) const {
  std::vector<int> values(dag_.variable_count(), -1);
  for (const auto& [name, value] : a.entries()) {
    const std::size_t idx = dag_.index_of(name);
    values[idx] = value_index(idx, value);
  }
  return values;
}

std::vector<int> CausalBayesNet::to_value_indices(const FullAssignment& a) const {
  std::vector<int> values =
      to_value_indices(static_cast<const PartialAssignment&>(a));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) {
      throw ValidationError("full assignment is missing variable '" +
                            dag_.variable(i).name + "'");
    }
  }
  return values;
}

std::size_t CausalBayesNet::row_count(std::size_t variable_index) const {
  return tables_[variable_index].rows;
}

bool CausalBayesNet::has_row(std::size_t variable_index, std::size_t row) const {
  return tables_[variable_index].present[row];
}

std::span<const double> CausalBayesNet::row_distribution(
    std::size_t variable_index, std::size_t row) const {
  const std::size_t width = dag_.variable(variable_index).domain.size();
  const Table& table = tables_[variable_index];
  return std::span<const double>(table.probs.data() + row * width, width);
}

std::size_t CausalBayesNet::row_index(std::size_t variable_index,
                                      std::span<const int> values) const {
  const Table& table = tables_[variable_index];
  const auto& parents = dag_.parent_indices(variable_index);
  std::size_t row = 0;
  for (std::size_t k = 0; k < parents.size(); ++k) {
    const int v = values[parents[k]];
    if (v < 0) {
      throw ValidationError("parent '" + dag_.variable(parents[k]).name +
                            "' of '" + dag_.variable(variable_index).name +
                            "' is unassigned");
    }
    row += static_cast<std::size_t>(v) * table.strides[k];
  }
  return row;
}

std::vector<int> CausalBayesNet::row_parent_values(std::size_t variable_index,
                                                   std::size_t row) const {
  const Table& table = tables_[variable_index];
  const auto& parents = dag_.parent_indices(variable_index);
  std::vector<int> values(parents.size(), 0);
  for (std::size_t k = 0; k < parents.size(); ++k) {
    values[k] = static_cast<int>(row / table.strides[k]);
    row %= table.strides[k];
  }
  return values;
}

double CausalBayesNet::joint_indexed(std::span<const int> values) const {
  double p = 1.0;
  for (std::size_t v = 0; v < tables_.size(); ++v) {
    const Table& table = tables_[v];
    const std::size_t row = row_index(v, values);
    if (!table.present[row]) {
      throw ValidationError("missing CPT row for variable '" +
                            dag_.variable(v).name + "'");
    }
    p *= table.probs[row * dag_.variable(v).domain.size() +
                     static_cast<std::size_t>(values[v])];
    if (p == 0.0) return 0.0;
  }
  return p;
}

double CausalBayesNet::event_indexed(std::span<const int> constraint) const {
  std::vector<int> values(constraint.begin(), constraint.end());
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) {
      values[i] = 0;
      free.push_back(i);
    }
  }
  double total = 0.0;
  while (true) {
    total += joint_indexed(values);
    std::size_t k = 0;
    for (; k < free.size(); ++k) {
      const std::size_t idx = free[k];
      if (++values[idx] <
          static_cast<int>(dag_.variable(idx).domain.size())) {
        break;
      }
      values[idx] = 0;
    }
    if (k == free.size()) break;
  }
  return total;
}

double CausalBayesNet::joint_probability(const FullAssignment& v) const {
  return joint_indexed(to_value_indices(v));
}

double CausalBayesNet::event_probability(const PartialAssignment& e) const {
  return event_indexed(to_value_indices(e));
}

double CausalBayesNet::conditional_probability(
    const PartialAssignment& target, const PartialAssignment& given) const {
  for (const auto& [name, value] : target.entries()) {
    if (given.contains(name)) {
      throw OverlappingAssignmentsError(
          "variable '" + name + "' appears in both target and conditioning "
          "assignments");
    }
  }
  const std::vector<int> given_idx = to_value_indices(given);
  const double p_given = event_indexed(given_idx);
  if (p_given == 0.0) {
    throw ZeroProbabilityConditionError("conditioning event has probability zero");
  }
  std::vector<int> merged = given_idx;
  const std::vector<int> target_idx = to_value_indices(target);
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (target_idx[i] >= 0) merged[i] = target_idx[i];
  }
  return event_indexed(merged) / p_given;
}

double CausalBayesNet::do_complete_indexed(std::size_t x, int x_value,
                                           std::span<const int> v,
                                           std::span<const int> target) const {
  std::vector<int> condition(dag_.variable_count(), -1);
  condition[x] = x_value;
  for (std::size_t nd : dag_.non_descendant_indices(x)) condition[nd] = v[nd];

  const double p_condition = event_indexed(condition);
  if (p_condition == 0.0) {
    throw ZeroProbabilityConditionError(
        "intervention conditioning event {" + dag_.variable(x).name + "=" +
        dag_.variable(x).domain[static_cast<std::size_t>(x_value)] +
        "} with the non-descendant values has probability zero");
  }

  std::vector<int> merged = condition;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (target[i] < 0) continue;
    if (merged[i] >= 0 && merged[i] != target[i]) return 0.0;
    merged[i] = target[i];
  }
  return event_indexed(merged) / p_condition;
}

double CausalBayesNet::do_query_complete(const std::string& x,
                                         const std::string& x_value,
                                         const FullAssignment& v,
                                         const PartialAssignment& target) const {
  const std::size_t x_idx = dag_.index_of(x);
  const int xv = value_index(x_idx, x_value);
  const std::vector<int> v_idx = to_value_indices(v);
  const std::vector<int> target_idx = to_value_indices(target);
  return do_complete_indexed(x_idx, xv, v_idx, target_idx);
}

double CausalBayesNet::do_query_evidence(const std::string& x,
                                         const std::string& x_value,
                                         const PartialAssignment& evidence,
                                         const PartialAssignment& target) const {
  const std::size_t x_idx = dag_.index_of(x);
  const int xv = value_index(x_idx, x_value);
  const std::vector<int> evidence_idx = to_value_indices(evidence);
  const double p_evidence = event_indexed(evidence_idx);
  if (p_evidence == 0.0) {
    throw ZeroProbabilityEvidenceError("evidence has probability zero");
  }
  const std::vector<int> target_idx = to_value_indices(target);

  std::vector<int> values = evidence_idx;
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) {
      values[i] = 0;
      free.push_back(i);
    }
  }
  double total = 0.0;
  while (true) {
    const double w = joint_indexed(values);
    if (w > 0.0) {
      total += do_complete_indexed(x_idx, xv, values, target_idx) *
               (w / p_evidence);
    }
    std::size_t k = 0;
    for (; k < free.size(); ++k) {
      const std::size_t idx = free[k];
      if (++values[idx] <
          static_cast<int>(dag_.variable(idx).domain.size())) {
        break;
      }
      values[idx] = 0;
    }
    if (k == free.size()) break;
  }
  return total;
}

ValidationReport CausalBayesNet::validate() const {
  ValidationReport report;
  if (!dag_.is_acyclic()) {
    report.violations.push_back(
        {Violation::Kind::Cycle, "graph", "directed cycle present"});
  }
  for (std::size_t v = 0; v < tables_.size(); ++v) {
    const Variable& var = dag_.variable(v);
    const Table& table = tables_[v];
    for (std::size_t row = 0; row < table.rows; ++row) {
      std::string location = var.name + "(";
      const std::vector<int> parent_values = row_parent_values(v, row);
      const auto& parents = dag_.parent_indices(v);
      for (std::size_t k = 0; k < parents.size(); ++k) {
        if (k > 0) location += ", ";
        const Variable& parent = dag_.variable(parents[k]);
        location += parent.name + "=" +
                    parent.domain[static_cast<std::size_t>(parent_values[k])];
      }
      location += ")";

      if (!table.present[row]) {
        report.violations.push_back({Violation::Kind::MissingRow, location,
                                     "no distribution for this parent combination"});
        continue;
      }
      double sum = 0.0;
      for (std::size_t j = 0; j < var.domain.size(); ++j) {
        const double p = table.probs[row * var.domain.size() + j];
        if (!(p >= 0.0 && p <= 1.0)) {
          report.violations.push_back(
              {Violation::Kind::EntryRange, location,
               "entry " + format_double(p) + " for value '" + var.domain[j] +
                   "' outside [0, 1]"});
        }
        sum += p;
      }
      if (!(std::abs(sum - 1.0) <= kCptRowSumTolerance)) {
        report.violations.push_back({Violation::Kind::RowSum, location,
                                     "row sums to " + format_double(sum)});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// NetBuilder

NetBuilder::NetBuilder(Dag dag) : dag_(std::move(dag)) {
  tables_.resize(dag_.variable_count());
  for (std::size_t v = 0; v < dag_.variable_count(); ++v) {
    CausalBayesNet::Table& table = tables_[v];
    const auto& parents = dag_.parent_indices(v);
    table.strides.assign(parents.size(), 1);
    table.rows = 1;
    for (std::size_t k = parents.size(); k-- > 0;) {
      table.strides[k] = table.rows;
      table.rows *= dag_.variable(parents[k]).domain.size();
    }
    table.probs.assign(table.rows * dag_.variable(v).domain.size(),
                       std::numeric_limits<double>::quiet_NaN());
    table.present.assign(table.rows, false);
  }
}

NetBuilder& NetBuilder::row(const std::string& variable,
                            const std::vector<std::string>& parent_values,
                            const std::vector<double>& distribution) {
  const std::size_t v = dag_.index_of(variable);
  const Variable& var = dag_.variable(v);
  const auto& parents = dag_.parent_indices(v);
  if (parent_values.size() != parents.size()) {
    throw ValidationError("variable '" + variable + "' expects " +
                          std::to_string(parents.size()) +
                          " parent values, got " +
                          std::to_string(parent_values.size()));
  }
  if (distribution.size() != var.domain.size()) {
    throw ValidationError("variable '" + variable + "' expects a distribution over " +
                          std::to_string(var.domain.size()) + " values, got " +
                          std::to_string(distribution.size()));
  }
  CausalBayesNet::Table& table = tables_[v];
  std::size_t row = 0;
  for (std::size_t k = 0; k < parents.size(); ++k) {
    const Variable& parent = dag_.variable(parents[k]);
    const auto it =
        std::find(parent.domain.begin(), parent.domain.end(), parent_values[k]);
    if (it == parent.domain.end()) {
      throw UnknownValueError("variable '" + parent.name + "' has no value '" +
                              parent_values[k] + "'");
    }
    row += static_cast<std::size_t>(it - parent.domain.begin()) * table.strides[k];
  }
  std::copy(distribution.begin(), distribution.end(),
            table.probs.begin() + row * var.domain.size());
  table.present[row] = true;
  return *this;
}

CausalBayesNet NetBuilder::build() const {
  return CausalBayesNet(dag_, tables_);
}

// ---------------------------------------------------------------------------
// Serialization

std::string net_to_json(const CausalBayesNet& net, int indent) {
  nlohmann::json j;
  j["variables"] = nlohmann::json::array();
  for (const Variable& var : net.dag().variables()) {
    j["variables"].push_back({{"name", var.name}, {"domain", var.domain}});
  }
  nlohmann::json parents = nlohmann::json::object();
  nlohmann::json cpts = nlohmann::json::object();
  for (std::size_t v = 0; v < net.dag().variable_count(); ++v) {
    const Variable& var = net.dag().variable(v);
    nlohmann::json parent_names = nlohmann::json::array();
    for (std::size_t p : net.dag().parent_indices(v)) {
      parent_names.push_back(net.dag().variable(p).name);
    }
    parents[var.name] = parent_names;

    nlohmann::json rows = nlohmann::json::object();
    for (std::size_t row = 0; row < net.row_count(v); ++row) {
      if (!net.has_row(v, row)) continue;
      std::string key;
      const std::vector<int> parent_values = net.row_parent_values(v, row);
      const auto& parent_indices = net.dag().parent_indices(v);
      for (std::size_t k = 0; k < parent_indices.size(); ++k) {
        if (k > 0) key += ",";
        key += net.dag()
                   .variable(parent_indices[k])
                   .domain[static_cast<std::size_t>(parent_values[k])];
      }
      const auto dist = net.row_distribution(v, row);
      rows[key] = std::vector<double>(dist.begin(), dist.end());
    }
    cpts[var.name] = rows;
  }
  j["parents"] = parents;
  j["cpts"] = cpts;
  return j.dump(indent);
}

}  // namespace dateiv
