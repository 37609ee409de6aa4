#pragma once

#include <span>
#include <string>
#include <vector>

#include "efc/data.hpp"
#include "efc/rules.hpp"

namespace efc {

enum class FeatureKind { Logical, Relational, Cartesian, Numerical, Rule, Threshold };
enum class LogicalOp { And, Or, Equiv, Xor, Implies };
enum class RelationalOp { LessThan, NotEqual };
enum class NumericalOp { Add, Subtract, Divide };
enum class ThresholdVariant { NumOfN, XofN, AllOfN, MofN };

/// What a feature column holds once materialised.
enum class ValueType { Boolean, Count, Nominal, Real };

/// A constructed feature over original attributes.
struct Feature {
  FeatureKind kind = FeatureKind::Logical;
  LogicalOp logical = LogicalOp::And;
  RelationalOp relational = RelationalOp::LessThan;
  NumericalOp numerical = NumericalOp::Add;
  ThresholdVariant threshold = ThresholdVariant::NumOfN;

  /// Logical operands, rule conjuncts or threshold conditions.
  std::vector<Condition> conditions;
  /// Relational, Cartesian and numerical operands.
  std::vector<int> attrs;
  /// X for X-of-N, M for M-of-N.
  int param = 0;
  /// Cartesian: value count of the second operand.
  int cartesian_width = 0;
  /// Rule features: the learned rule's statistics.
  Rule rule;
  std::vector<int> source_group;

  static Feature make_logical(LogicalOp op, std::vector<Condition> operands);
  static Feature make_relational(RelationalOp op, int a, int b);
  static Feature make_cartesian(int a, int b, int width_b);
  static Feature make_numerical(NumericalOp op, int a, int b);
  static Feature make_rule(const Rule& rule);
  static Feature make_threshold(ThresholdVariant variant, std::vector<Condition> conditions, int param = 0);

  ValueType value_type() const;
  /// Boolean features yield 0/1, counts an integer, Cartesian the code
  /// va * |Vb| + vb, numerical a real. Throws DataError on division by zero.
  double evaluate(std::span<const double> row) const;

  /// Human-readable form, e.g. "num-of-N((A2=1), (A3=1), (A1=0))".
  std::string render(const Dataset& ds) const;
  /// Identity used for deduplication: operator plus operand keys, sorted
  /// for commutative operators.
  std::string key() const;
  std::string kind_name() const;
  /// Attributes the feature reads, ascending.
  std::vector<int> operand_attributes() const;

  /// Throws ConfigError when an operand does not fit `ds`'s schema.
  void check(const Dataset& ds) const;
};

std::string logical_op_name(LogicalOp op);
std::string relational_op_name(RelationalOp op);
std::string numerical_op_name(NumericalOp op);
std::string threshold_name(ThresholdVariant v);

}  // namespace efc
