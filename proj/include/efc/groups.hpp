#pragma once

#include <string>
#include <vector>

#include "efc/explain.hpp"

namespace efc {

/// e x m binary marks of the attributes carrying the largest share of each
/// explanation row.
struct WeightMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<unsigned char> marks;  // row-major
  double threshold = 0;

  bool at(int i, int j) const { return marks[static_cast<std::size_t>(i) * cols + j] != 0; }
  /// Marked attribute indices of row i, ascending.
  std::vector<int> marked(int i) const;
};

struct CandidateGroup {
  std::vector<int> attrs;  // ascending, size >= 2
  int support = 0;
  int first_seen = 0;      // rank in the output list
  double threshold = 0;    // threshold at which it was first found

  friend bool operator==(const CandidateGroup& a, const CandidateGroup& b) { return a.attrs == b.attrs; }
};

/// Per row: |E| normalised to sum 1, sorted descending (ties by index),
/// marked until the running sum reaches q.
WeightMatrix set_weights(const ExplanationMatrix& e, double q, Execution exec = Execution::Parallel);

/// Exact marked-set frequencies; drops singletons and sets below
/// max(1, ceil(noise_thr * e)); descending support, ties by first appearance.
std::vector<CandidateGroup> most_frequent_subsets(const WeightMatrix& w, double noise_thr);

/// Thresholds thr_l, thr_l+step, ... <= thr_u.
std::vector<double> threshold_grid(double thr_l, double thr_u, double step);

/// Union over the threshold grid, first occurrence wins.
std::vector<CandidateGroup> collect_groups(const ExplanationMatrix& e, double thr_l, double thr_u, double step,
                                           double noise_thr, Execution exec = Execution::Parallel);

/// [{"attrs": [names], "support": k}, ...]
std::string groups_to_json(const std::vector<CandidateGroup>& groups, const std::vector<std::string>& names);

std::string render_group(const CandidateGroup& g, const std::vector<std::string>& names);

}  // namespace efc
