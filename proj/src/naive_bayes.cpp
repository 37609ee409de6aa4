#include <algorithm>
#include <cmath>
#include <numeric>

#include "efc/errors.hpp"
#include "efc/model.hpp"

namespace efc {

namespace {

constexpr double kDefaultPrecision = 0.01;

// Sum of sorted values, so the result does not depend on row order.
double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

NaiveBayes train_naive_bayes(const Dataset& ds) {
  NaiveBayes nb;
  nb.bind_schema(ds);
  const int C = ds.class_count(), m = ds.cols(), n = ds.rows();
  auto counts = ds.class_counts();
  for (int c = 0; c < C; ++c) nb.log_prior_.push_back(std::log((counts[c] + 1.0) / (n + C)));
  nb.nominal_.resize(m);
  nb.tables_.resize(m);
  nb.mean_.resize(m);
  nb.stddev_.resize(m);
  nb.precision_.assign(m, kDefaultPrecision);

  for (int j = 0; j < m; ++j) {
    const auto& a = ds.attribute(j);
    nb.nominal_[j] = a.nominal();
    if (a.nominal()) {
      const int V = a.value_count();
      std::vector<std::vector<double>> freq(C, std::vector<double>(V, 0.0));
      for (int i = 0; i < n; ++i) freq[ds.label(i)][static_cast<int>(ds.at(i, j))] += 1;
      nb.tables_[j].assign(C, std::vector<double>(V));
      for (int c = 0; c < C; ++c)
        for (int v = 0; v < V; ++v) nb.tables_[j][c][v] = std::log((freq[c][v] + 1.0) / (counts[c] + V));
      continue;
    }
    std::vector<double> all(n);
    for (int i = 0; i < n; ++i) all[i] = ds.at(i, j);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    if (all.size() > 1) nb.precision_[j] = (all.back() - all.front()) / (all.size() - 1);
    const double min_std = nb.precision_[j] / 6.0;

    std::vector<std::vector<double>> per_class(C);
    for (int i = 0; i < n; ++i) per_class[ds.label(i)].push_back(ds.at(i, j));
    nb.mean_[j].assign(C, 0.0);
    nb.stddev_[j].assign(C, min_std);
    for (int c = 0; c < C; ++c) {
      const auto& xs = per_class[c];
      if (xs.empty()) continue;
      double mean = sorted_sum(xs) / xs.size();
      std::vector<double> sq;
      sq.reserve(xs.size());
      for (double x : xs) sq.push_back((x - mean) * (x - mean));
      double var = xs.size() > 1 ? sorted_sum(std::move(sq)) / (xs.size() - 1) : 0.0;
      nb.mean_[j][c] = mean;
      nb.stddev_[j][c] = std::max(std::sqrt(var), min_std);
    }
  }
  return nb;
}

double NaiveBayes::log_likelihood(int attr, int cls, double value) const {
  if (nominal_[attr]) return tables_[attr][cls][static_cast<int>(value)];
  double s = stddev_[attr][cls];
  double z = (value - mean_[attr][cls]) / s;
  // density times precision approximates the probability of the value's cell
  return -0.5 * z * z - std::log(s * std::sqrt(2 * M_PI)) + std::log(precision_[attr]);
}

std::vector<double> NaiveBayes::predict_proba(std::span<const double> x) const {
  std::vector<double> logp(log_prior_);
  for (int c = 0; c < classes_; ++c)
    for (int j = 0; j < attributes_; ++j) logp[c] += log_likelihood(j, c, x[j]);
  double top = *std::max_element(logp.begin(), logp.end());
  double total = 0;
  for (double& v : logp) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : logp) v /= total;
  return logp;
}

}  // namespace efc
