#pragma once

#include <span>
#include <string>
#include <vector>

#include "efc/data.hpp"

namespace efc {

/// Conjunctive rule predicting `target`.
struct Rule {
  std::vector<Condition> conditions;  // learned order
  int target = 0;
  int covered = 0;  // training rows satisfying the antecedent
  int correct = 0;  // of which belong to target
  double cf = 0;    // (correct + 1) / (covered + 2)
  int new_positives = 0;  // target rows first covered by this rule

  bool holds(std::span<const double> row) const;
  /// "(A2=1) and (A3=1) and (A1=0)"
  std::string render(const Dataset& ds) const;
};

struct RuleParams {
  double cf_threshold = 0.6;
  int max_conditions = 0;  // 0 = size of the attribute subset
  int bins = 4;
};

double laplace_cf(int correct, int covered);

/// Sequential covering restricted to `attrs`. Each rule is grown by FOIL
/// gain over the rows still in play and kept while its certainty factor on
/// those rows reaches the threshold. `uncovered`, when given, marks the
/// target rows still available (shared across calls) and is updated.
std::vector<Rule> learn_rules(const Dataset& ds, std::span<const int> attrs, int target, const RuleParams& params,
                              std::vector<char>* uncovered = nullptr);

/// Candidate conditions on one attribute: one equality per nominal value, or
/// every interval between two discretisation boundaries except the full range.
std::vector<Condition> rule_conditions(const Dataset& ds, int attr, int bins);

}  // namespace efc
