#include "efc/feature.hpp"

#include <algorithm>
#include <set>

#include "efc/errors.hpp"

namespace efc {

std::string logical_op_name(LogicalOp op) {
  switch (op) {
    case LogicalOp::And: return "and";
    case LogicalOp::Or: return "or";
    case LogicalOp::Equiv: return "equiv";
    case LogicalOp::Xor: return "xor";
    case LogicalOp::Implies: return "implies";
  }
  return "?";
}

std::string relational_op_name(RelationalOp op) { return op == RelationalOp::LessThan ? "lessThan" : "notEqual"; }

std::string numerical_op_name(NumericalOp op) {
  switch (op) {
    case NumericalOp::Add: return "add";
    case NumericalOp::Subtract: return "subtract";
    case NumericalOp::Divide: return "divide";
  }
  return "?";
}

std::string threshold_name(ThresholdVariant v) {
  switch (v) {
    case ThresholdVariant::NumOfN: return "num-of-N";
    case ThresholdVariant::XofN: return "X-of-N";
    case ThresholdVariant::AllOfN: return "all-of-N";
    case ThresholdVariant::MofN: return "M-of-N";
  }
  return "?";
}

Feature Feature::make_logical(LogicalOp op, std::vector<Condition> operands) {
  const bool binary_only = op == LogicalOp::Equiv || op == LogicalOp::Xor || op == LogicalOp::Implies;
  if (operands.size() < 2 || (binary_only && operands.size() != 2))
    throw ConfigError("feature: wrong operand count for " + logical_op_name(op));
  Feature f;
  f.kind = FeatureKind::Logical;
  f.logical = op;
  f.conditions = std::move(operands);
  return f;
}

Feature Feature::make_relational(RelationalOp op, int a, int b) {
  Feature f;
  f.kind = FeatureKind::Relational;
  f.relational = op;
  f.attrs = {a, b};
  return f;
}

Feature Feature::make_cartesian(int a, int b, int width_b) {
  Feature f;
  f.kind = FeatureKind::Cartesian;
  f.attrs = {a, b};
  f.cartesian_width = width_b;
  return f;
}

Feature Feature::make_numerical(NumericalOp op, int a, int b) {
  Feature f;
  f.kind = FeatureKind::Numerical;
  f.numerical = op;
  f.attrs = {a, b};
  return f;
}

Feature Feature::make_rule(const Rule& rule) {
  if (rule.conditions.empty()) throw ConfigError("feature: rule without conditions");
  Feature f;
  f.kind = FeatureKind::Rule;
  f.conditions = rule.conditions;
  f.rule = rule;
  return f;
}

Feature Feature::make_threshold(ThresholdVariant variant, std::vector<Condition> conditions, int param) {
  if (conditions.empty()) throw ConfigError("feature: threshold feature without conditions");
  const int N = static_cast<int>(conditions.size());
  if ((variant == ThresholdVariant::XofN || variant == ThresholdVariant::MofN) && (param < 0 || param > N))
    throw ConfigError("feature: threshold parameter outside [0, N]");
  Feature f;
  f.kind = FeatureKind::Threshold;
  f.threshold = variant;
  f.conditions = std::move(conditions);
  f.param = param;
  return f;
}

ValueType Feature::value_type() const {
  switch (kind) {
    case FeatureKind::Logical:
    case FeatureKind::Relational:
    case FeatureKind::Rule: return ValueType::Boolean;
    case FeatureKind::Cartesian: return ValueType::Nominal;
    case FeatureKind::Numerical: return ValueType::Real;
    case FeatureKind::Threshold: return threshold == ThresholdVariant::NumOfN ? ValueType::Count : ValueType::Boolean;
  }
  return ValueType::Real;
}

double Feature::evaluate(std::span<const double> row) const {
  switch (kind) {
    case FeatureKind::Logical: {
      const bool a = conditions[0].holds(row), b = conditions[1].holds(row);
      switch (logical) {
        case LogicalOp::And:
          return std::all_of(conditions.begin(), conditions.end(), [&](const Condition& c) { return c.holds(row); });
        case LogicalOp::Or:
          return std::any_of(conditions.begin(), conditions.end(), [&](const Condition& c) { return c.holds(row); });
        case LogicalOp::Equiv: return a == b;
        case LogicalOp::Xor: return a != b;
        case LogicalOp::Implies: return !a || b;
      }
      return 0;
    }
    case FeatureKind::Relational: {
      double a = row[attrs[0]], b = row[attrs[1]];
      return relational == RelationalOp::LessThan ? a < b : a != b;
    }
    case FeatureKind::Cartesian: return row[attrs[0]] * cartesian_width + row[attrs[1]];
    case FeatureKind::Numerical: {
      double a = row[attrs[0]], b = row[attrs[1]];
      switch (numerical) {
        case NumericalOp::Add: return a + b;
        case NumericalOp::Subtract: return a - b;
        case NumericalOp::Divide:
          if (b == 0) throw DataError("feature: division by zero");
          return a / b;
      }
      return 0;
    }
    case FeatureKind::Rule:
      return std::all_of(conditions.begin(), conditions.end(), [&](const Condition& c) { return c.holds(row); });
    case FeatureKind::Threshold: {
      int count = 0;
      for (const auto& c : conditions) count += c.holds(row);
      const int N = static_cast<int>(conditions.size());
      switch (threshold) {
        case ThresholdVariant::NumOfN: return count;
        case ThresholdVariant::XofN: return count == param;
        case ThresholdVariant::AllOfN: return count == N;
        case ThresholdVariant::MofN: return count >= param;
      }
      return 0;
    }
  }
  return 0;
}

std::string Feature::render(const Dataset& ds) const {
  auto name = [&](int a) { return ds.attribute(a).name; };
  auto join = [&](const std::string& sep) {
    std::string s;
    for (std::size_t k = 0; k < conditions.size(); ++k) s += (k ? sep : "") + conditions[k].render(ds);
    return s;
  };
  switch (kind) {
    case FeatureKind::Logical:
      switch (logical) {
        case LogicalOp::And: return join(" & ");
        case LogicalOp::Or: return join(" | ");
        case LogicalOp::Equiv: return join(" <=> ");
        case LogicalOp::Xor: return join(" xor ");
        case LogicalOp::Implies: return join(" => ");
      }
      break;
    case FeatureKind::Relational:
      return name(attrs[0]) + (relational == RelationalOp::LessThan ? " < " : " != ") + name(attrs[1]);
    case FeatureKind::Cartesian: return name(attrs[0]) + " x " + name(attrs[1]);
    case FeatureKind::Numerical: {
      const char* sym = numerical == NumericalOp::Add ? " + " : numerical == NumericalOp::Subtract ? " - " : " / ";
      return name(attrs[0]) + sym + name(attrs[1]);
    }
    case FeatureKind::Rule: return join(" and ");
    case FeatureKind::Threshold: {
      std::string head = threshold_name(threshold);
      if (threshold == ThresholdVariant::XofN || threshold == ThresholdVariant::MofN)
        head += "[" + std::to_string(param) + "]";
      return head + "(" + join(", ") + ")";
    }
  }
  return "?";
}

std::string Feature::kind_name() const {
  switch (kind) {
    case FeatureKind::Logical: return "logical";
    case FeatureKind::Relational: return "relational";
    case FeatureKind::Cartesian: return "cartesian";
    case FeatureKind::Numerical: return "numerical";
    case FeatureKind::Rule: return "rule";
    case FeatureKind::Threshold: return "threshold";
  }
  return "?";
}

std::string Feature::key() const {
  auto cond_keys = [&](bool sorted) {
    std::vector<std::string> keys;
    for (const auto& c : conditions) keys.push_back(c.key());
    if (sorted) std::sort(keys.begin(), keys.end());
    std::string s;
    for (const auto& k : keys) s += k + ";";
    return s;
  };
  auto attr_keys = [&](bool sorted) {
    std::vector<int> a = attrs;
    if (sorted) std::sort(a.begin(), a.end());
    std::string s;
    for (int x : a) s += "a" + std::to_string(x) + ";";
    return s;
  };
  switch (kind) {
    case FeatureKind::Logical:
      return "log:" + logical_op_name(logical) + ":" + cond_keys(logical != LogicalOp::Implies);
    case FeatureKind::Relational:
      return "rel:" + relational_op_name(relational) + ":" + attr_keys(relational == RelationalOp::NotEqual);
    case FeatureKind::Cartesian: return "cart:" + attr_keys(true);
    case FeatureKind::Numerical:
      return "num:" + numerical_op_name(numerical) + ":" + attr_keys(numerical == NumericalOp::Add);
    case FeatureKind::Rule: return "rule:" + cond_keys(true);
    case FeatureKind::Threshold:
      return "thr:" + threshold_name(threshold) + ":" + std::to_string(param) + ":" + cond_keys(true);
  }
  return "?";
}

std::vector<int> Feature::operand_attributes() const {
  std::set<int> s(attrs.begin(), attrs.end());
  for (const auto& c : conditions) s.insert(c.attr);
  return {s.begin(), s.end()};
}

void Feature::check(const Dataset& ds) const {
  for (const auto& c : conditions) c.check(ds);
  for (int a : attrs)
    if (a < 0 || a >= ds.cols()) throw ConfigError("feature: unknown attribute index " + std::to_string(a));
  switch (kind) {
    case FeatureKind::Relational:
    case FeatureKind::Numerical:
      if (attrs.size() != 2 || !ds.attribute(attrs[0]).numeric() || !ds.attribute(attrs[1]).numeric())
        throw ConfigError("feature: " + kind_name() + " operands must be two numeric attributes");
      break;
    case FeatureKind::Cartesian:
      if (attrs.size() != 2 || !ds.attribute(attrs[0]).nominal() || !ds.attribute(attrs[1]).nominal())
        throw ConfigError("feature: cartesian operands must be two nominal attributes");
      if (cartesian_width != ds.attribute(attrs[1]).value_count())
        throw ConfigError("feature: cartesian feature built for a different schema");
      break;
    default: break;
  }
}

}  // namespace efc
