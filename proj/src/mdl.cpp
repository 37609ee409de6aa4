#include "efc/mdl.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "efc/errors.hpp"

namespace efc {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double log2_factorial(double n) { return std::lgamma(n + 1) / kLn2; }

double coding_length(std::span<const int> counts) {
  int n = 0;
  for (int c : counts) n += c;
  const int C = static_cast<int>(counts.size());
  return log2_multinomial(counts) + log2_binomial(n + C - 1, C - 1);
}

}  // namespace

double log2_multinomial(std::span<const int> counts) {
  double n = 0, s = 0;
  for (int c : counts) {
    n += c;
    s += log2_factorial(c);
  }
  return log2_factorial(n) - s;
}

double log2_binomial(double n, double k) { return log2_factorial(n) - log2_factorial(k) - log2_factorial(n - k); }

double mdl_score(std::span<const int> values, std::span<const int> labels, int classes) {
  if (values.size() != labels.size()) throw ConfigError("mdl: feature and label lengths differ");
  if (values.empty()) throw ConfigError("mdl: empty column");
  if (classes < 1) throw ConfigError("mdl: need at least one class");
  std::vector<int> prior(classes, 0);
  std::map<int, std::vector<int>> cells;
  for (std::size_t i = 0; i < values.size(); ++i) {
    int y = labels[i];
    if (y < 0 || y >= classes) throw ConfigError("mdl: label out of range");
    ++prior[y];
    auto& cell = cells[values[i]];
    if (cell.empty()) cell.assign(classes, 0);
    ++cell[y];
  }
  double post = 0;
  for (const auto& [v, counts] : cells) post += coding_length(counts);
  return (coding_length(prior) - post) / static_cast<double>(values.size());
}

double mdl_score(std::span<const double> values, std::span<const int> labels, int classes) {
  std::vector<int> codes(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = values[i];
    if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 1e9)
      throw DataError("mdl: continuous feature column must be discretised first");
    codes[i] = static_cast<int>(v);
  }
  return mdl_score(codes, labels, classes);
}

std::vector<int> discrete_column(const Feature& f, const Dataset& ds, int bins) {
  auto col = feature_column(f, ds);
  std::vector<int> codes(col.size());
  if (f.value_type() != ValueType::Real) {
    for (std::size_t i = 0; i < col.size(); ++i) codes[i] = static_cast<int>(col[i]);
    return codes;
  }
  auto [lo, hi] = std::minmax_element(col.begin(), col.end());
  auto cuts = equal_width_cuts(*lo, *hi, bins);
  for (std::size_t i = 0; i < col.size(); ++i) codes[i] = bin_of(cuts, col[i]);
  return codes;
}

std::vector<ScoredFeature> score_and_filter(const std::vector<Feature>& features, const Dataset& ds,
                                            double min_score, int bins, Execution exec) {
  const int k = static_cast<int>(features.size());
  std::vector<double> scores(k);
  std::vector<std::string> keys(k);
  auto one = [&](int f) {
    scores[f] = mdl_score(std::span<const int>(discrete_column(features[f], ds, bins)), ds.labels(),
                          ds.class_count());
    keys[f] = features[f].key();
  };
  if (exec == Execution::Parallel) {
    bool failed = false;
#pragma omp parallel for schedule(dynamic) reduction(|| : failed)
    for (int f = 0; f < k; ++f) {
      try {
        one(f);
      } catch (const std::exception&) {
        failed = true;
      }
    }
    if (failed) throw DataError("mdl: a feature could not be evaluated on the training data");
  } else {
    for (int f = 0; f < k; ++f) one(f);
  }
  std::vector<int> order;
  for (int f = 0; f < k; ++f)
    if (scores[f] >= min_score) order.push_back(f);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return keys[a] < keys[b];
  });
  std::vector<ScoredFeature> out;
  for (int f : order) out.push_back({features[f], scores[f]});
  return out;
}

}  // namespace efc
