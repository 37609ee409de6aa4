#include "efc/groups.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <json.hpp>

#include "efc/errors.hpp"

namespace efc {

std::vector<int> WeightMatrix::marked(int i) const {
  std::vector<int> out;
  for (int j = 0; j < cols; ++j)
    if (at(i, j)) out.push_back(j);
  return out;
}

WeightMatrix set_weights(const ExplanationMatrix& e, double q, Execution exec) {
  if (!(q > 0 && q <= 1)) throw ConfigError("groups: weight threshold must lie in (0, 1]");
  WeightMatrix w;
  w.rows = e.rows;
  w.cols = e.cols;
  w.threshold = q;
  w.marks.assign(static_cast<std::size_t>(e.rows) * e.cols, 0);

  auto one = [&](int i) {
    auto r = e.row(i);
    std::vector<double> a(e.cols);
    double total = 0;
    for (int j = 0; j < e.cols; ++j) {
      if (!std::isfinite(r[j])) throw DataError("groups: non-finite explanation value");
      a[j] = std::abs(r[j]);
      total += a[j];
    }
    if (total == 0) return;
    std::vector<int> order(e.cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a[x] > a[y]; });
    double sum = 0;
    for (int j : order) {
      if (sum >= q || a[j] == 0) break;
      w.marks[static_cast<std::size_t>(i) * e.cols + j] = 1;
      sum += a[j] / total;
    }
  };
  if (exec == Execution::Parallel) {
    bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
    for (int i = 0; i < e.rows; ++i) {
      try {
        one(i);
      } catch (const DataError&) {
        bad = true;
      }
    }
    if (bad) throw DataError("groups: non-finite explanation value");
  } else {
    for (int i = 0; i < e.rows; ++i) one(i);
  }
  return w;
}

std::vector<CandidateGroup> most_frequent_subsets(const WeightMatrix& w, double noise_thr) {
  if (!(noise_thr >= 0 && noise_thr < 1)) throw ConfigError("groups: noiseThr must lie in [0, 1)");
  std::map<std::vector<int>, std::pair<int, int>> freq;  // set -> (count, first row)
  for (int i = 0; i < w.rows; ++i) {
    auto set = w.marked(i);
    auto [it, fresh] = freq.try_emplace(set, 0, i);
    ++it->second.first;
  }
  const int floor = std::max(1, static_cast<int>(std::ceil(noise_thr * w.rows - 1e-9)));
  std::vector<std::tuple<int, int, std::vector<int>>> kept;
  for (const auto& [set, cf] : freq) {
    if (set.size() < 2 || cf.first < floor) continue;
    kept.emplace_back(cf.first, cf.second, set);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  std::vector<CandidateGroup> out;
  for (auto& [count, first, set] : kept) {
    CandidateGroup g;
    g.attrs = set;
    g.support = count;
    g.first_seen = static_cast<int>(out.size());
    g.threshold = w.threshold;
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<double> threshold_grid(double thr_l, double thr_u, double step) {
  if (!(thr_l > 0 && thr_l <= thr_u && thr_u <= 1)) throw ConfigError("groups: need 0 < thr_l <= thr_u <= 1");
  if (!(step > 0)) throw ConfigError("groups: step must be > 0");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    double q = std::round((thr_l + k * step) * 1e12) / 1e12;
    if (q > thr_u + 1e-9) break;
    out.push_back(std::min(q, 1.0));
  }
  return out;
}

std::vector<CandidateGroup> collect_groups(const ExplanationMatrix& e, double thr_l, double thr_u, double step,
                                           double noise_thr, Execution exec) {
  auto grid = threshold_grid(thr_l, thr_u, step);
  std::vector<CandidateGroup> out;
  if (e.rows == 0) return out;
  for (double q : grid) {
    for (auto& g : most_frequent_subsets(set_weights(e, q, exec), noise_thr)) {
      if (std::find(out.begin(), out.end(), g) != out.end()) continue;
      g.first_seen = static_cast<int>(out.size());
      out.push_back(std::move(g));
    }
  }
  return out;
}

std::string render_group(const CandidateGroup& g, const std::vector<std::string>& names) {
  std::string s = "{";
  for (std::size_t k = 0; k < g.attrs.size(); ++k) s += (k ? "," : "") + names.at(g.attrs[k]);
  return s + "}";
}

std::string groups_to_json(const std::vector<CandidateGroup>& groups, const std::vector<std::string>& names) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& g : groups) {
    nlohmann::json attrs = nlohmann::json::array();
    for (int a : g.attrs) attrs.push_back(names.at(a));
    out.push_back({{"attrs", attrs}, {"support", g.support}, {"threshold", g.threshold}});
  }
  return out.dump(2);
}

}  // namespace efc
