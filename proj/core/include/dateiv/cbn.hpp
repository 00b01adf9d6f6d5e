#pragma once

#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dateiv/errors.hpp"

namespace dateiv {

/// A named discrete variable with an ordered domain of value labels.
struct Variable {
  std::string name;
  std::vector<std::string> domain;
};

/// Directed graph over declared variables. Acyclicity is not enforced at
/// construction: topological_order() throws on cycles and
/// CausalBayesNet::validate() reports them.
class Dag {
 public:
  Dag(std::vector<Variable> variables,
      std::map<std::string, std::vector<std::string>> parents);

  std::size_t variable_count() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(std::size_t index) const { return variables_[index]; }
  bool has_variable(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;
  const std::vector<std::size_t>& parent_indices(std::size_t index) const;
  const std::vector<std::size_t>& child_indices(std::size_t index) const;

  bool is_acyclic() const;

  /// Every parent precedes its children; ties broken by declaration order,
  /// so the result is deterministic. Throws CyclicGraphError.
  std::vector<std::string> topological_order() const;

  /// Variables not reachable from x along directed edges, excluding x itself,
  /// in declaration order.
  std::vector<std::string> non_descendants(const std::string& x) const;
  std::vector<std::size_t> non_descendant_indices(std::size_t x) const;

 private:
  std::vector<Variable> variables_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
};

/// Partial map from variable names to value labels. Setting a variable twice
/// keeps the latest value.
class PartialAssignment {
 public:
  PartialAssignment() = default;
  PartialAssignment(
      std::initializer_list<std::pair<const std::string, std::string>> entries)
      : entries_(entries) {}

  PartialAssignment& set(const std::string& variable, const std::string& value) {
    entries_[variable] = value;
    return *this;
  }
  bool contains(const std::string& variable) const {
    return entries_.count(variable) > 0;
  }
  const std::string& at(const std::string& variable) const {
    return entries_.at(variable);
  }
  const std::map<std::string, std::string>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::string, std::string> entries_;
};

/// Assignment meant to cover every variable of a net; totality is checked
/// against the net at the point of use.
class FullAssignment : public PartialAssignment {
 public:
  using PartialAssignment::PartialAssignment;
};

struct Violation {
  enum class Kind { Cycle, MissingRow, RowSum, EntryRange };
  Kind kind;
  std::string location;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

inline constexpr double kCptRowSumTolerance = 1e-9;

class NetBuilder;

/// Discrete causal Bayes net: a DAG plus one conditional probability table
/// per variable. Immutable once built; every query is a pure function, so
/// concurrent use needs no synchronization. Inference is exact enumeration
/// over the full joint.
class CausalBayesNet {
 public:
  const Dag& dag() const { return dag_; }

  /// Product of CPT entries along the assignment (the factorized joint).
  double joint_probability(const FullAssignment& v) const;

  /// Sum of the joint over all completions of a partial assignment.
  double event_probability(const PartialAssignment& e) const;

  /// P(target | given) from the factorized joint. Target and conditioning
  /// variables must be disjoint; the conditioning event must have positive
  /// probability.
  double conditional_probability(const PartialAssignment& target,
                                 const PartialAssignment& given) const;

  /// Interventional query under complete evidence v: condition on X = x_value
  /// together with v restricted to the non-descendants of X. Values of X and
  /// its descendants in v are ignored. A target clashing with the
  /// conditioning event has probability 0; a consistent overlap is allowed.
  double do_query_complete(const std::string& x, const std::string& x_value,
                           const FullAssignment& v,
                           const PartialAssignment& target) const;

  /// Interventional query under partial evidence: the average of
  /// do_query_complete over all full assignments v, weighted by P(v |
  /// evidence). Completions with zero conditional weight are skipped before
  /// the inner query is evaluated.
  double do_query_evidence(const std::string& x, const std::string& x_value,
                           const PartialAssignment& evidence,
                           const PartialAssignment& target) const;

  /// Checks acyclicity, CPT totality, entry ranges and row sums
  /// (kCptRowSumTolerance). Collects every violation instead of throwing.
  ValidationReport validate() const;

  // Row-level access, used by the sampler, the serializer and audits.
  std::size_t row_count(std::size_t variable_index) const;
  bool has_row(std::size_t variable_index, std::size_t row) const;
  std::span<const double> row_distribution(std::size_t variable_index,
                                           std::size_t row) const;
  /// Row selected by the parent values inside a (possibly partial) indexed
  /// assignment; every parent of the variable must be assigned.
  std::size_t row_index(std::size_t variable_index,
                        std::span<const int> values) const;
  std::vector<int> row_parent_values(std::size_t variable_index,
                                     std::size_t row) const;

  /// Translate a name/label assignment into per-variable value indices,
  /// -1 where unset. Throws UnknownVariableError / UnknownValueError.
  std::vector<int> to_value_indices(const PartialAssignment& a) const;
  /// Same, but requires every variable to be assigned (ValidationError).
  std::vector<int> to_value_indices(const FullAssignment& a) const;

 private:
  friend class NetBuilder;

  struct Table {
    std::vector<std::size_t> strides;  // one per parent, first parent slowest
    std::size_t rows = 1;
    std::vector<double> probs;  // rows x domain size, row-major
    std::vector<bool> present;
  };

  CausalBayesNet(Dag dag, std::vector<Table> tables);

  int value_index(std::size_t variable_index, const std::string& value) const;
  double joint_indexed(std::span<const int> values) const;
  double event_indexed(std::span<const int> constraint) const;
  double do_complete_indexed(std::size_t x, int x_value,
                             std::span<const int> v,
                             std::span<const int> target) const;

  Dag dag_;
  std::vector<Table> tables_;
};

/// Collects CPT rows against a DAG; build() freezes them into an immutable
/// net. Totality and numeric validity are left to CausalBayesNet::validate(),
/// so partially specified or deliberately broken nets can be constructed and
/// audited.
class NetBuilder {
 public:
  explicit NetBuilder(Dag dag);

  /// Sets the distribution over `variable`'s domain for one combination of
  /// parent values (given in declared parent order). Re-setting a row
  /// replaces it.
  NetBuilder& row(const std::string& variable,
                  const std::vector<std::string>& parent_values,
                  const std::vector<double>& distribution);

  CausalBayesNet build() const;

 private:
  Dag dag_;
  std::vector<CausalBayesNet::Table> tables_;
};

/// JSON: variables with domains, parent lists, and CPT rows keyed by the
/// comma-joined parent values in declared parent order ("" for roots).
std::string net_to_json(const CausalBayesNet& net, int indent = 2);

}  // namespace dateiv
