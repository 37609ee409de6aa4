#include <algorithm>
#include <cmath>
#include <numeric>

#include "efc/errors.hpp"
#include "efc/model.hpp"
#include "efc/rng.hpp"

namespace efc {

const double* ForestTree::leaf(std::span<const double> x) const {
  int k = 0;
  while (nodes[k].attr >= 0) {
    const Node& n = nodes[k];
    double v = x[n.attr];
    bool holds = n.nominal ? v == n.split : v <= n.split;
    k = holds ? n.left : n.right;
  }
  return dists.data() + nodes[k].dist;
}

std::vector<double> RandomForest::predict_proba(std::span<const double> x) const {
  std::vector<double> p(classes_, 0.0);
  for (const auto& t : trees_) {
    const double* d = t.leaf(x);
    for (int c = 0; c < classes_; ++c) p[c] += d[c];
  }
  for (double& v : p) v /= static_cast<double>(trees_.size());
  return p;
}

double RandomForest::class_probability(std::span<const double> x, int c) const {
  double p = 0;
  for (const auto& t : trees_) p += t.leaf(x)[c];
  return p / static_cast<double>(trees_.size());
}

namespace {

double gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double s = 0;
  for (int c : counts) {
    double f = static_cast<double>(c) / total;
    s += f * f;
  }
  return 1.0 - s;
}

struct Split {
  int attr = -1;
  bool nominal = false;
  double value = 0.0;
  double gain = 0.0;
};

class ForestTreeBuilder {
 public:
  ForestTreeBuilder(const Dataset& ds, const ForestParams& p, int per_split, Rng& rng)
      : ds_(ds), params_(p), per_split_(per_split), rng_(rng), C_(ds.class_count()) {}

  ForestTree build(std::vector<int> rows) {
    rows_ = std::move(rows);
    grow(0, static_cast<int>(rows_.size()), 0);
    return std::move(tree_);
  }

 private:
  int make_leaf(int lo, int hi) {
    std::vector<double> dist(C_, 0.0);
    for (int k = lo; k < hi; ++k) dist[ds_.label(rows_[k])] += 1.0;
    for (double& v : dist) v /= (hi - lo);
    ForestTree::Node n;
    n.dist = static_cast<int>(tree_.dists.size());
    tree_.dists.insert(tree_.dists.end(), dist.begin(), dist.end());
    tree_.nodes.push_back(n);
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  Split best_for(int attr, int lo, int hi, double parent) {
    Split best;
    const int n = hi - lo;
    const auto& a = ds_.attribute(attr);
    if (a.nominal()) {
      const int V = a.value_count();
      std::vector<std::vector<int>> counts(V, std::vector<int>(C_, 0));
      std::vector<int> sizes(V, 0);
      std::vector<int> total(C_, 0);
      for (int k = lo; k < hi; ++k) {
        int v = static_cast<int>(ds_.at(rows_[k], attr));
        int y = ds_.label(rows_[k]);
        ++counts[v][y];
        ++sizes[v];
        ++total[y];
      }
      for (int v = 0; v < V; ++v) {
        int left = sizes[v], right = n - sizes[v];
        if (left < params_.min_leaf || right < params_.min_leaf) continue;
        std::vector<int> rest(C_);
        for (int c = 0; c < C_; ++c) rest[c] = total[c] - counts[v][c];
        double g = parent - (left * gini(counts[v], left) + right * gini(rest, right)) / n;
        if (g > best.gain + 1e-12) best = {attr, true, static_cast<double>(v), g};
      }
      return best;
    }
    std::vector<std::pair<double, int>> vals;
    vals.reserve(n);
    for (int k = lo; k < hi; ++k) vals.emplace_back(ds_.at(rows_[k], attr), ds_.label(rows_[k]));
    std::sort(vals.begin(), vals.end());
    std::vector<int> left(C_, 0), right(C_, 0);
    for (const auto& [v, y] : vals) ++right[y];
    for (int k = 0; k + 1 < n; ++k) {
      int y = vals[k].second;
      ++left[y];
      --right[y];
      if (vals[k].first == vals[k + 1].first) continue;
      int nl = k + 1, nr = n - nl;
      if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
      double g = parent - (nl * gini(left, nl) + nr * gini(right, nr)) / n;
      if (g > best.gain + 1e-12) best = {attr, false, 0.5 * (vals[k].first + vals[k + 1].first), g};
    }
    return best;
  }

  int grow(int lo, int hi, int depth) {
    const int n = hi - lo;
    std::vector<int> counts(C_, 0);
    for (int k = lo; k < hi; ++k) ++counts[ds_.label(rows_[k])];
    const bool pure = std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }) <= 1;
    if (pure || n < 2 * params_.min_leaf || (params_.max_depth > 0 && depth >= params_.max_depth))
      return make_leaf(lo, hi);

    const double parent = gini(counts, n);
    std::vector<int> order(ds_.cols());
    std::iota(order.begin(), order.end(), 0);
    rng_.shuffle(std::span<int>(order));
    Split best;
    for (int k = 0; k < ds_.cols(); ++k) {
      // after the sampled subset, keep scanning only while nothing useful was found
      if (k >= per_split_ && best.attr >= 0) break;
      Split s = best_for(order[k], lo, hi, parent);
      if (s.attr >= 0 && (best.attr < 0 || s.gain > best.gain + 1e-12)) best = s;
    }
    if (best.attr < 0) return make_leaf(lo, hi);

    auto mid = std::partition(rows_.begin() + lo, rows_.begin() + hi, [&](int r) {
      double v = ds_.at(r, best.attr);
      return best.nominal ? v == best.value : v <= best.value;
    });
    const int split_at = static_cast<int>(mid - rows_.begin());

    const int self = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({best.attr, best.nominal, best.value, -1, -1, -1});
    int l = grow(lo, split_at, depth + 1);
    int r = grow(split_at, hi, depth + 1);
    tree_.nodes[self].left = l;
    tree_.nodes[self].right = r;
    return self;
  }

  const Dataset& ds_;
  const ForestParams& params_;
  int per_split_;
  Rng& rng_;
  int C_;
  std::vector<int> rows_;
  ForestTree tree_;
};

}  // namespace

RandomForest train_random_forest(const Dataset& ds, const ForestParams& params, Execution exec) {
  if (params.tree_count < 1) throw ConfigError("forest: tree count must be >= 1");
  if (params.min_leaf < 1) throw ConfigError("forest: min leaf must be >= 1");
  if (ds.rows() < 2) throw DataError("forest: need at least 2 instances");
  auto counts = ds.class_counts();
  if (std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }) < 2)
    throw DataError("forest: training data contains a single class");

  const int m = ds.cols();
  const int per_split = params.features_per_split > 0
                            ? std::min(params.features_per_split, m)
                            : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m))));
  const int n = ds.rows();
  const int T = params.tree_count;

  RandomForest forest;
  forest.bind_schema(ds);
  forest.trees_.resize(T);
  std::vector<std::vector<char>> in_bag(T, std::vector<char>(n, 0));

  auto train_one = [&](int t) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
    std::vector<int> rows(n);
    for (int k = 0; k < n; ++k) {
      rows[k] = static_cast<int>(rng.below(n));
      in_bag[t][rows[k]] = 1;
    }
    ForestTreeBuilder builder(ds, params, per_split, rng);
    forest.trees_[t] = builder.build(std::move(rows));
  };

  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < T; ++t) train_one(t);
  } else {
    for (int t = 0; t < T; ++t) train_one(t);
  }

  const int C = ds.class_count();
  int oob_rows = 0, oob_hits = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> p(C, 0.0);
    bool any = false;
    for (int t = 0; t < T; ++t) {
      if (in_bag[t][i]) continue;
      any = true;
      const double* d = forest.trees_[t].leaf(ds.row(i));
      for (int c = 0; c < C; ++c) p[c] += d[c];
    }
    if (!any) continue;
    ++oob_rows;
    oob_hits += static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()) == ds.label(i);
  }
  if (oob_rows > 0) forest.oob_accuracy_ = static_cast<double>(oob_hits) / oob_rows;
  return forest;
}

}  // namespace efc
