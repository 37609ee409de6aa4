#include "efc/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "efc/errors.hpp"

namespace efc {

bool Rule::holds(std::span<const double> row) const {
  return std::all_of(conditions.begin(), conditions.end(), [&](const Condition& c) { return c.holds(row); });
}

std::string Rule::render(const Dataset& ds) const {
  std::string s;
  for (std::size_t k = 0; k < conditions.size(); ++k) s += (k ? " and " : "") + conditions[k].render(ds);
  return s;
}

double laplace_cf(int correct, int covered) { return (correct + 1.0) / (covered + 2.0); }

std::vector<Condition> rule_conditions(const Dataset& ds, int attr, int bins) {
  const auto& a = ds.attribute(attr);
  std::vector<Condition> out;
  if (a.nominal()) {
    for (int v = 0; v < a.value_count(); ++v) out.push_back(Condition::equals(attr, v));
    return out;
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> b{-inf};
  for (double c : discretize(ds, attr, bins)) b.push_back(c);
  b.push_back(inf);
  const int last = static_cast<int>(b.size()) - 1;
  for (int i = 0; i < last; ++i)
    for (int j = i + 1; j <= last; ++j)
      if (!(i == 0 && j == last)) out.push_back(Condition::interval(attr, b[i], b[j]));
  return out;
}

namespace {

double foil_gain(int p0, int n0, int p1, int n1) {
  if (p1 == 0) return -std::numeric_limits<double>::infinity();
  return p1 * (std::log2(static_cast<double>(p1) / (p1 + n1)) - std::log2(static_cast<double>(p0) / (p0 + n0)));
}

}  // namespace

std::vector<Rule> learn_rules(const Dataset& ds, std::span<const int> attrs, int target, const RuleParams& params,
                              std::vector<char>* uncovered) {
  if (attrs.empty()) throw ConfigError("rules: empty attribute subset");
  if (target < 0 || target >= ds.class_count()) throw ConfigError("rules: target class out of range");
  for (int a : attrs)
    if (a < 0 || a >= ds.cols()) throw ConfigError("rules: attribute index out of range");
  const int n = ds.rows();
  std::vector<char> local;
  if (!uncovered) {
    local.assign(n, 0);
    for (int i = 0; i < n; ++i) local[i] = ds.label(i) == target;
    uncovered = &local;
  }
  if (static_cast<int>(uncovered->size()) != n) throw ConfigError("rules: coverage mask has the wrong length");
  auto& avail = *uncovered;

  std::vector<std::vector<Condition>> cands(attrs.size());
  for (std::size_t k = 0; k < attrs.size(); ++k) cands[k] = rule_conditions(ds, attrs[k], params.bins);
  const int max_conds = params.max_conditions > 0 ? params.max_conditions : static_cast<int>(attrs.size());

  // rows in play: every non-target row plus the still-uncovered target rows
  std::vector<int> pool;
  for (int i = 0; i < n; ++i)
    if (ds.label(i) != target || avail[i]) pool.push_back(i);

  std::vector<Rule> rules;
  for (;;) {
    int positives = 0;
    for (int i : pool) positives += ds.label(i) == target;
    if (positives == 0) break;

    Rule rule;
    rule.target = target;
    std::vector<int> cover = pool;
    std::vector<char> used(attrs.size(), 0);
    int p0 = positives, n0 = static_cast<int>(cover.size()) - positives;
    while (n0 > 0 && static_cast<int>(rule.conditions.size()) < max_conds) {
      double best_gain = 0;
      int best_k = -1, best_c = -1, best_p = 0, best_n = 0;
      for (std::size_t k = 0; k < attrs.size(); ++k) {
        if (used[k]) continue;
        for (std::size_t c = 0; c < cands[k].size(); ++c) {
          int p1 = 0, n1 = 0;
          for (int i : cover) {
            if (!cands[k][c].holds(ds.row(i))) continue;
            (ds.label(i) == target ? p1 : n1) += 1;
          }
          double g = foil_gain(p0, n0, p1, n1);
          if (g > best_gain + 1e-9) {
            best_gain = g;
            best_k = static_cast<int>(k);
            best_c = static_cast<int>(c);
            best_p = p1;
            best_n = n1;
          }
        }
      }
      if (best_k < 0) break;
      const Condition& chosen = cands[best_k][best_c];
      rule.conditions.push_back(chosen);
      used[best_k] = 1;
      std::erase_if(cover, [&](int i) { return !chosen.holds(ds.row(i)); });
      p0 = best_p;
      n0 = best_n;
    }
    if (rule.conditions.empty() || laplace_cf(p0, p0 + n0) < params.cf_threshold) break;

    for (int i = 0; i < n; ++i) {
      if (!rule.holds(ds.row(i))) continue;
      ++rule.covered;
      if (ds.label(i) == target) ++rule.correct;
    }
    rule.cf = laplace_cf(rule.correct, rule.covered);
    rule.new_positives = p0;
    for (int i : cover)
      if (ds.label(i) == target) avail[i] = 0;
    std::erase_if(pool, [&](int i) { return ds.label(i) == target && !avail[i]; });
    rules.push_back(std::move(rule));
  }
  return rules;
}

}  // namespace efc
