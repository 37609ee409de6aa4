#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "efc/data.hpp"
#include "efc/feature.hpp"
#include "efc/groups.hpp"

namespace efc {

/// How logical and threshold operands are formed from attributes.
enum class OperandMode {
  /// Every attribute value (nominal) or discretisation cell (numeric).
  Conditions,
  /// Binary nominal attributes contribute only (A=<second value>); others as above.
  RawBinary,
};

struct ConstructConfig {
  bool logical = true;
  bool relational = true;
  bool cartesian = true;
  bool numerical = false;
  bool rules = true;
  bool thresholds = true;

  std::vector<LogicalOp> logical_ops{LogicalOp::And, LogicalOp::Or, LogicalOp::Equiv, LogicalOp::Xor,
                                     LogicalOp::Implies};
  std::vector<RelationalOp> relational_ops{RelationalOp::LessThan, RelationalOp::NotEqual};
  std::vector<NumericalOp> numerical_ops{NumericalOp::Add, NumericalOp::Subtract, NumericalOp::Divide};
  /// Threshold constructs spawned from multi-conjunct rules. X-of-N and
  /// M-of-N use N-1 as their parameter.
  std::vector<ThresholdVariant> threshold_variants{ThresholdVariant::NumOfN};

  int bins = 4;
  double cf = 0.6;
  std::optional<double> pci;
  OperandMode operands = OperandMode::Conditions;
  int max_rule_conditions = 0;

  /// Comma list over {log, rel, cart, num, rule, thr}; "all" enables the
  /// default set (numerical stays off).
  void set_kinds(const std::string& list);
  std::string kinds() const;
  void validate() const;
};

/// Monotonic wall-clock budget; default-constructed budgets never expire.
struct Budget {
  std::optional<std::chrono::steady_clock::time_point> deadline;

  static Budget after(std::chrono::duration<double> d);
  bool expired() const { return deadline && std::chrono::steady_clock::now() >= *deadline; }
};

struct ConstructResult {
  std::vector<Feature> features;
  int logical_candidates = 0;
  int operator_candidates = 0;
  bool timed_out = false;
  /// Explained-class rows covered by accepted rules.
  int covered = 0;
};

/// Operand conditions of one attribute.
std::vector<Condition> atomic_conditions(const Dataset& ds, int attr, int bins,
                                         OperandMode mode = OperandMode::Conditions);
std::vector<Condition> atomic_conditions(const Dataset& ds, const std::vector<int>& group, int bins,
                                         OperandMode mode = OperandMode::Conditions);

/// Operator-based features of every group, deduplicated by key.
ConstructResult construct_operator_features(const Dataset& ds, const std::vector<CandidateGroup>& groups,
                                            const ConstructConfig& cfg, const Budget& budget = {});

/// Operator features followed by rule and threshold features, group by
/// group, until accepted rules cover pci * n_c explained-class rows.
ConstructResult generate_features(const Dataset& ds, const std::vector<CandidateGroup>& groups, int class_index,
                                  const ConstructConfig& cfg, const Budget& budget = {});

/// Appends one materialised column per feature. Boolean features become
/// nominal {false,true}, counts and reals numeric, Cartesian features
/// nominal over the value cross product.
Dataset augment(const Dataset& ds, const std::vector<Feature>& features, Execution exec = Execution::Parallel);

/// Materialised values of one feature on every row.
std::vector<double> feature_column(const Feature& f, const Dataset& ds);

}  // namespace efc
