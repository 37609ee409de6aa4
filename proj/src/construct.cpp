#include "efc/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "efc/errors.hpp"
#include "efc/rules.hpp"

namespace efc {

void ConstructConfig::set_kinds(const std::string& list) {
  logical = relational = cartesian = numerical = rules = thresholds = false;
  std::stringstream ss(list);
  std::string item;
  bool any = false;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    any = true;
    if (item == "log") logical = true;
    else if (item == "rel") relational = true;
    else if (item == "cart") cartesian = true;
    else if (item == "num") numerical = true;
    else if (item == "rule") rules = true;
    else if (item == "thr") thresholds = true;
    else if (item == "all") logical = relational = cartesian = rules = thresholds = true;
    else throw ConfigError("construct: unknown feature kind '" + item + "'");
  }
  if (!any) throw ConfigError("construct: empty feature kind list");
}

std::string ConstructConfig::kinds() const {
  std::vector<std::string> out;
  if (logical) out.push_back("log");
  if (relational) out.push_back("rel");
  if (cartesian) out.push_back("cart");
  if (numerical) out.push_back("num");
  if (rules) out.push_back("rule");
  if (thresholds) out.push_back("thr");
  std::string s;
  for (std::size_t k = 0; k < out.size(); ++k) s += (k ? "," : "") + out[k];
  return s;
}

void ConstructConfig::validate() const {
  if (bins < 2) throw ConfigError("construct: bins must be >= 2");
  if (!(cf >= 0 && cf <= 1)) throw ConfigError("construct: cf must lie in [0, 1]");
  if (pci && !(*pci > 0 && *pci <= 1)) throw ConfigError("construct: pci must lie in (0, 1]");
}

Budget Budget::after(std::chrono::duration<double> d) {
  Budget b;
  b.deadline = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(d);
  return b;
}

std::vector<Condition> atomic_conditions(const Dataset& ds, int attr, int bins, OperandMode mode) {
  const auto& a = ds.attribute(attr);
  std::vector<Condition> out;
  if (a.nominal()) {
    if (mode == OperandMode::RawBinary && a.value_count() == 2) return {Condition::equals(attr, 1)};
    for (int v = 0; v < a.value_count(); ++v) out.push_back(Condition::equals(attr, v));
    return out;
  }
  const double inf = std::numeric_limits<double>::infinity();
  auto cuts = discretize(ds, attr, bins);
  double lo = -inf;
  for (double c : cuts) {
    out.push_back(Condition::interval(attr, lo, c));
    lo = c;
  }
  out.push_back(Condition::interval(attr, lo, inf));
  return out;
}

std::vector<Condition> atomic_conditions(const Dataset& ds, const std::vector<int>& group, int bins,
                                         OperandMode mode) {
  if (group.empty()) throw ConfigError("construct: empty group");
  std::vector<Condition> out;
  for (int a : group) {
    auto c = atomic_conditions(ds, a, bins, mode);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

namespace {

class Collector {
 public:
  explicit Collector(ConstructResult& out) : out_(out) {}

  bool add(Feature f, const std::vector<int>& group) {
    if (!seen_.insert(f.key()).second) return false;
    f.source_group = group;
    out_.features.push_back(std::move(f));
    return true;
  }
  bool contains(const std::string& key) const { return seen_.count(key) > 0; }

 private:
  ConstructResult& out_;
  std::unordered_set<std::string> seen_;
};

bool divides_by_zero(const Dataset& ds, int b) {
  for (int i = 0; i < ds.rows(); ++i)
    if (ds.at(i, b) == 0) return true;
  return false;
}

// Returns false when the budget ran out.
bool operator_features(const Dataset& ds, const std::vector<CandidateGroup>& groups, const ConstructConfig& cfg,
                       const Budget& budget, Collector& sink, ConstructResult& out) {
  auto has = [](const auto& ops, auto op) { return std::find(ops.begin(), ops.end(), op) != ops.end(); };
  long long steps = 0;
  auto out_of_time = [&]() { return (++steps & 0xFF) == 0 && budget.expired(); };

  for (const auto& g : groups) {
    if (budget.expired()) return false;
    const auto& attrs = g.attrs;
    for (int a : attrs)
      if (a < 0 || a >= ds.cols()) throw ConfigError("construct: group references an unknown attribute");

    if (cfg.logical && !cfg.logical_ops.empty()) {
      auto conds = atomic_conditions(ds, attrs, cfg.bins, cfg.operands);
      const int K = static_cast<int>(conds.size());
      for (int i = 0; i < K; ++i) {
        for (int j = i + 1; j < K; ++j) {
          if (conds[i].attr == conds[j].attr) continue;
          for (LogicalOp op : cfg.logical_ops) {
            if (out_of_time()) return false;
            out.logical_candidates += sink.add(Feature::make_logical(op, {conds[i], conds[j]}), attrs);
          }
          for (int k = j + 1; k < K; ++k) {
            if (conds[k].attr == conds[i].attr || conds[k].attr == conds[j].attr) continue;
            for (LogicalOp op : {LogicalOp::And, LogicalOp::Or}) {
              if (!has(cfg.logical_ops, op)) continue;
              if (out_of_time()) return false;
              out.logical_candidates += sink.add(Feature::make_logical(op, {conds[i], conds[j], conds[k]}), attrs);
            }
          }
        }
      }
    }

    for (std::size_t x = 0; x < attrs.size(); ++x) {
      for (std::size_t y = x + 1; y < attrs.size(); ++y) {
        if (out_of_time()) return false;
        const int a = attrs[x], b = attrs[y];
        const bool numeric = ds.attribute(a).numeric() && ds.attribute(b).numeric();
        const bool nominal = ds.attribute(a).nominal() && ds.attribute(b).nominal();
        if (cfg.relational && numeric) {
          for (RelationalOp op : cfg.relational_ops) {
            sink.add(Feature::make_relational(op, a, b), attrs);
            if (op == RelationalOp::LessThan) sink.add(Feature::make_relational(op, b, a), attrs);
          }
        }
        if (cfg.cartesian && nominal) sink.add(Feature::make_cartesian(a, b, ds.attribute(b).value_count()), attrs);
        if (cfg.numerical && numeric) {
          for (NumericalOp op : cfg.numerical_ops) {
            if (op == NumericalOp::Add) {
              sink.add(Feature::make_numerical(op, a, b), attrs);
              continue;
            }
            if (op == NumericalOp::Subtract || !divides_by_zero(ds, b))
              sink.add(Feature::make_numerical(op, a, b), attrs);
            if (op == NumericalOp::Subtract || !divides_by_zero(ds, a))
              sink.add(Feature::make_numerical(op, b, a), attrs);
          }
        }
      }
    }
  }
  return true;
}

}  // namespace

ConstructResult construct_operator_features(const Dataset& ds, const std::vector<CandidateGroup>& groups,
                                            const ConstructConfig& cfg, const Budget& budget) {
  cfg.validate();
  ConstructResult out;
  Collector sink(out);
  out.timed_out = !operator_features(ds, groups, cfg, budget, sink, out);
  out.operator_candidates = static_cast<int>(out.features.size());
  return out;
}

ConstructResult generate_features(const Dataset& ds, const std::vector<CandidateGroup>& groups, int class_index,
                                  const ConstructConfig& cfg, const Budget& budget) {
  cfg.validate();
  if (class_index < 0 || class_index >= ds.class_count()) throw ConfigError("construct: class index out of range");
  ConstructResult out;
  Collector sink(out);
  if (!operator_features(ds, groups, cfg, budget, sink, out)) {
    out.timed_out = true;
    out.operator_candidates = static_cast<int>(out.features.size());
    return out;
  }
  out.operator_candidates = static_cast<int>(out.features.size());
  if (!cfg.rules) return out;

  std::vector<char> uncovered(ds.rows(), 0);
  int n_c = 0;
  for (int i = 0; i < ds.rows(); ++i) {
    uncovered[i] = ds.label(i) == class_index;
    n_c += uncovered[i];
  }
  RuleParams rp;
  rp.cf_threshold = cfg.cf;
  rp.bins = cfg.bins;
  rp.max_conditions = cfg.max_rule_conditions;

  for (const auto& g : groups) {
    if (budget.expired()) {
      out.timed_out = true;
      break;
    }
    for (const Rule& r : learn_rules(ds, g.attrs, class_index, rp, &uncovered)) {
      out.covered += r.new_positives;
      sink.add(Feature::make_rule(r), g.attrs);
      if (cfg.thresholds && r.conditions.size() >= 2) {
        const int N = static_cast<int>(r.conditions.size());
        for (ThresholdVariant v : cfg.threshold_variants) {
          int param = v == ThresholdVariant::XofN || v == ThresholdVariant::MofN ? N - 1 : 0;
          sink.add(Feature::make_threshold(v, r.conditions, param), g.attrs);
        }
      }
    }
    if (cfg.pci && out.covered >= *cfg.pci * n_c) break;
  }
  return out;
}

std::vector<double> feature_column(const Feature& f, const Dataset& ds) {
  std::vector<double> col(ds.rows());
  for (int i = 0; i < ds.rows(); ++i) col[i] = f.evaluate(ds.row(i));
  return col;
}

Dataset augment(const Dataset& ds, const std::vector<Feature>& features, Execution exec) {
  for (const auto& f : features) f.check(ds);
  const int m = ds.cols(), k = static_cast<int>(features.size()), n = ds.rows();
  std::vector<AttributeDescriptor> attrs = ds.attributes();
  std::unordered_set<std::string> names;
  for (const auto& a : attrs) names.insert(a.name);
  for (const auto& f : features) {
    std::string name = f.render(ds);
    for (int suffix = 2; names.count(name); ++suffix) name = f.render(ds) + " #" + std::to_string(suffix);
    names.insert(name);
    switch (f.value_type()) {
      case ValueType::Boolean: attrs.push_back(AttributeDescriptor::make_nominal(name, {"false", "true"})); break;
      case ValueType::Count:
      case ValueType::Real: attrs.push_back(AttributeDescriptor::make_numeric(name)); break;
      case ValueType::Nominal: {
        std::vector<std::string> values;
        for (const auto& va : ds.attribute(f.attrs[0]).values)
          for (const auto& vb : ds.attribute(f.attrs[1]).values) values.push_back(va + "|" + vb);
        attrs.push_back(AttributeDescriptor::make_nominal(name, values));
        break;
      }
    }
  }
  std::vector<std::vector<double>> cols(k);
  if (exec == Execution::Parallel) {
    bool failed = false;
#pragma omp parallel for schedule(dynamic) reduction(|| : failed)
    for (int f = 0; f < k; ++f) {
      try {
        cols[f] = feature_column(features[f], ds);
      } catch (const DataError&) {
        failed = true;
      }
    }
    if (failed) throw DataError("augment: a feature is undefined on some row (division by zero)");
  } else {
    for (int f = 0; f < k; ++f) cols[f] = feature_column(features[f], ds);
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * (m + k));
  for (int i = 0; i < n; ++i) {
    auto r = ds.row(i);
    values.insert(values.end(), r.begin(), r.end());
    for (int f = 0; f < k; ++f) values.push_back(cols[f][i]);
  }
  return Dataset(std::move(attrs), ds.class_attr(), std::move(values), ds.labels());
}

}  // namespace efc
