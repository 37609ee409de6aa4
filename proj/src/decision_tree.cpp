#include <algorithm>
#include <cmath>
#include <numeric>

#include "efc/errors.hpp"
#include "efc/model.hpp"

namespace efc {

namespace {

double entropy(const std::vector<double>& counts, double total) {
  if (total <= 0) return 0.0;
  double h = 0;
  for (double c : counts)
    if (c > 0) h -= c / total * std::log2(c / total);
  return h;
}

double errors_of(const std::vector<double>& counts) {
  double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  return total - *std::max_element(counts.begin(), counts.end());
}

// Upper-confidence-limit extra errors for e observed errors in n cases.
double add_errors(double n, double e, double cf, double z) {
  if (n <= 0) return 0.0;
  if (e < 1) {
    double base = n * (1 - std::pow(cf, 1.0 / n));
    if (e == 0) return base;
    return base + e * (add_errors(n, 1.0, cf, z) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  double f = (e + 0.5) / n;
  double r = (f + z * z / (2 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n);
  return r * n - e;
}

// Inverse standard normal CDF (Acklam's rational approximation refined by
// one Halley step).
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01, -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - 0.02425) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

struct Candidate {
  int attr = -1;
  bool nominal = false;
  double split = 0;
  double gain = 0;
  double ratio = 0;
};

class Builder {
 public:
  Builder(const Dataset& ds, const TreeParams& p) : ds_(ds), p_(p), C_(ds.class_count()) {
    z_ = normal_quantile(1 - p.confidence);
  }

  std::vector<DecisionTree::Node> run() {
    std::vector<int> rows(ds_.rows());
    std::iota(rows.begin(), rows.end(), 0);
    grow(rows, counts_of(rows));
    return std::move(nodes_);
  }

 private:
  std::vector<double> counts_of(const std::vector<int>& rows) const {
    std::vector<double> counts(C_, 0.0);
    for (int r : rows) counts[ds_.label(r)] += 1;
    return counts;
  }

  Candidate evaluate_nominal(int attr, const std::vector<int>& rows, double base) const {
    const int V = ds_.attribute(attr).value_count();
    std::vector<std::vector<double>> counts(V, std::vector<double>(C_, 0.0));
    std::vector<double> sizes(V, 0.0);
    for (int r : rows) {
      int v = static_cast<int>(ds_.at(r, attr));
      counts[v][ds_.label(r)] += 1;
      sizes[v] += 1;
    }
    int big = 0;
    for (double s : sizes) big += s >= p_.min_leaf;
    Candidate out;
    if (big < 2) return out;
    const double n = static_cast<double>(rows.size());
    double rest = 0, split_info = 0;
    for (int v = 0; v < V; ++v) {
      if (sizes[v] == 0) continue;
      rest += sizes[v] / n * entropy(counts[v], sizes[v]);
      split_info -= sizes[v] / n * std::log2(sizes[v] / n);
    }
    out.attr = attr;
    out.nominal = true;
    out.gain = base - rest;
    out.ratio = split_info > 0 ? out.gain / split_info : 0;
    return out;
  }

  Candidate evaluate_numeric(int attr, const std::vector<int>& rows, double base) const {
    Candidate out;
    std::vector<std::pair<double, int>> vals;
    for (int r : rows) vals.emplace_back(ds_.at(r, attr), ds_.label(r));
    std::sort(vals.begin(), vals.end());
    const int n = static_cast<int>(vals.size());
    const double min_split = std::clamp(0.1 * n / C_, static_cast<double>(p_.min_leaf), 25.0);
    std::vector<double> left(C_, 0.0), right(C_, 0.0);
    for (const auto& [v, y] : vals) right[y] += 1;
    int thresholds = 0;
    double best_gain = -1, best_split = 0, best_left = 0;
    for (int k = 0; k + 1 < n; ++k) {
      left[vals[k].second] += 1;
      right[vals[k].second] -= 1;
      if (vals[k].first == vals[k + 1].first) continue;
      const double nl = k + 1, nr = n - nl;
      if (nl < min_split || nr < min_split) continue;
      ++thresholds;
      double g = base - (nl * entropy(left, nl) + nr * entropy(right, nr)) / n;
      if (g > best_gain + 1e-12) {
        best_gain = g;
        best_split = vals[k].first;
        best_left = nl;
      }
    }
    if (thresholds == 0) return out;
    out.attr = attr;
    out.split = best_split;
    out.gain = best_gain - std::log2(static_cast<double>(thresholds)) / n;
    double fl = best_left / n, fr = 1 - fl;
    double split_info = -fl * std::log2(fl) - fr * std::log2(fr);
    out.ratio = split_info > 0 ? out.gain / split_info : 0;
    return out;
  }

  int leaf(const std::vector<double>& counts) {
    DecisionTree::Node node;
    node.counts = counts;
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
  }

  // Estimated errors of the subtree rooted at k (sum over leaves).
  double subtree_errors(int k) const {
    const auto& node = nodes_[k];
    if (node.attr < 0) {
      double n = std::accumulate(node.counts.begin(), node.counts.end(), 0.0);
      double e = errors_of(node.counts);
      return e + add_errors(n, e, p_.confidence, z_);
    }
    double s = 0;
    for (int c : node.children) s += subtree_errors(c);
    return s;
  }

  int grow(const std::vector<int>& rows, const std::vector<double>& counts) {
    const double n = static_cast<double>(rows.size());
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
    if (pure || n < 2 * p_.min_leaf) return leaf(counts);

    const double base = entropy(counts, n);
    std::vector<Candidate> cands;
    for (int j = 0; j < ds_.cols(); ++j) {
      Candidate c = ds_.attribute(j).nominal() ? evaluate_nominal(j, rows, base) : evaluate_numeric(j, rows, base);
      if (c.attr >= 0) cands.push_back(c);
    }
    if (cands.empty()) return leaf(counts);
    double avg = 0;
    for (const auto& c : cands) avg += c.gain;
    avg /= cands.size();
    const Candidate* best = nullptr;
    for (const auto& c : cands) {
      if (c.gain < avg - 1e-9 || c.gain <= 1e-12) continue;
      if (!best || c.ratio > best->ratio + 1e-12) best = &c;
    }
    if (!best) return leaf(counts);
    const Candidate chosen = *best;

    std::vector<std::vector<int>> parts;
    if (chosen.nominal) {
      parts.resize(ds_.attribute(chosen.attr).value_count());
      for (int r : rows) parts[static_cast<int>(ds_.at(r, chosen.attr))].push_back(r);
    } else {
      parts.resize(2);
      for (int r : rows) parts[ds_.at(r, chosen.attr) <= chosen.split ? 0 : 1].push_back(r);
    }

    const int self = static_cast<int>(nodes_.size());
    {
      DecisionTree::Node node;
      node.attr = chosen.attr;
      node.nominal = chosen.nominal;
      node.split = chosen.split;
      node.counts = counts;
      nodes_.push_back(std::move(node));
    }
    std::vector<int> children;
    for (const auto& part : parts) {
      // empty branches predict the parent's distribution
      children.push_back(part.empty() ? leaf(counts) : grow(part, counts_of(part)));
    }
    nodes_[self].children = children;

    if (p_.prune) {
      double as_leaf = errors_of(counts) + add_errors(n, errors_of(counts), p_.confidence, z_);
      if (as_leaf <= subtree_errors(self) + 0.1) {
        nodes_.resize(self + 1);
        nodes_[self].attr = -1;
        nodes_[self].children.clear();
      }
    }
    return self;
  }

  const Dataset& ds_;
  const TreeParams& p_;
  int C_;
  double z_ = 0;
  std::vector<DecisionTree::Node> nodes_;
};

}  // namespace

DecisionTree train_decision_tree(const Dataset& ds, const TreeParams& params) {
  if (params.min_leaf < 1) throw ConfigError("tree: min leaf must be >= 1");
  if (!(params.confidence > 0 && params.confidence < 0.5)) throw ConfigError("tree: confidence must lie in (0, 0.5)");
  DecisionTree tree;
  tree.bind_schema(ds);
  tree.nodes_ = Builder(ds, params).run();
  return tree;
}

std::vector<double> DecisionTree::predict_proba(std::span<const double> x) const {
  int k = 0;
  while (nodes_[k].attr >= 0) {
    const Node& n = nodes_[k];
    double v = x[n.attr];
    k = n.nominal ? n.children[static_cast<int>(v)] : n.children[v <= n.split ? 0 : 1];
  }
  const auto& counts = nodes_[k].counts;
  double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<double> p(classes_);
  for (int c = 0; c < classes_; ++c) p[c] = total > 0 ? counts[c] / total : 1.0 / classes_;
  return p;
}

int DecisionTree::leaf_count() const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.attr < 0; }));
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  // children always follow their parent in storage
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    best = std::max(best, d[k]);
    for (int c : nodes_[k].children) d[c] = d[k] + 1;
  }
  return best;
}

}  // namespace efc
