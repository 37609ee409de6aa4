#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "efc/errors.hpp"
#include "efc/mdl.hpp"
#include "efc/rng.hpp"
#include "efc/synth.hpp"
#include "support/oracles.hpp"

using namespace efc;

namespace {

// exact log2 of n choose k by summing logs of the factors
double log2_choose(int n, int k) {
  double s = 0;
  for (int i = 1; i <= k; ++i) s += std::log2(static_cast<double>(n - k + i) / i);
  return s;
}

std::vector<int> balanced_labels(int n) {
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = i % 2;
  return y;
}

}  // namespace

TEST_CASE("class-identical feature on balanced n=100") {
  auto y = balanced_labels(100);
  double direct = (log2_choose(100, 50) + std::log2(101.0) - 2 * std::log2(51.0)) / 100;
  CHECK(direct == doctest::Approx(0.9166207796168814).epsilon(1e-12));
  CHECK(std::abs(mdl_score(std::span<const int>(y), y, 2) - direct) < 1e-6);
  std::vector<double> real(y.begin(), y.end());
  CHECK(std::abs(mdl_score(std::span<const double>(real), y, 2) - direct) < 1e-6);
}

TEST_CASE("log-gamma helpers") {
  CHECK(log2_binomial(100, 50) == doctest::Approx(log2_choose(100, 50)).epsilon(1e-12));
  std::vector<int> counts{3, 4, 5};
  double direct = log2_choose(12, 3) + log2_choose(9, 4);
  CHECK(log2_multinomial(counts) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(std::isfinite(log2_binomial(1e7, 5e6)));
}

TEST_CASE("constant feature never scores above zero") {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    int n = 1 + static_cast<int>(rng.below(300));
    int classes = 2 + static_cast<int>(rng.below(3));
    std::vector<int> y(n), v(n, 7);
    for (int& l : y) l = static_cast<int>(rng.below(classes));
    CHECK(mdl_score(std::span<const int>(v), y, classes) <= 1e-12);
  }
}

TEST_CASE("permutation and label-swap invariance; informative beats random") {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    int n = 20 + static_cast<int>(rng.below(400));
    std::vector<int> y(n), v(n), noise(n);
    for (int i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      v[i] = rng.uniform() < 0.8 ? y[i] : 1 - y[i];
      noise[i] = static_cast<int>(rng.below(3));
    }
    double s = mdl_score(std::span<const int>(v), y, 2);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<int>(order));
    std::vector<int> pv(n), py(n), swapped(n);
    for (int i = 0; i < n; ++i) {
      pv[i] = v[order[i]];
      py[i] = y[order[i]];
      swapped[i] = 1 - y[i];
    }
    CHECK(mdl_score(std::span<const int>(pv), py, 2) == doctest::Approx(s).epsilon(1e-12));
    CHECK(mdl_score(std::span<const int>(v), swapped, 2) == doctest::Approx(s).epsilon(1e-12));
    CHECK(mdl_score(std::span<const int>(y), y, 2) > mdl_score(std::span<const int>(noise), y, 2));
  }
}

TEST_CASE("mdl errors") {
  std::vector<int> y{0, 1, 0};
  std::vector<int> short_v{1, 2};
  CHECK_THROWS_AS(mdl_score(std::span<const int>(short_v), y, 2), ConfigError);
  std::vector<double> cont{0.5, 1, 2};
  CHECK_THROWS_AS(mdl_score(std::span<const double>(cont), y, 2), DataError);
  std::vector<int> empty;
  std::vector<int> no_labels;
  CHECK_THROWS_AS(mdl_score(std::span<const int>(empty), no_labels, 2), ConfigError);
}

TEST_CASE("Toy: num-of-N scores near the worked-example value") {
  auto ds = efc::testing::toy();
  auto f = Feature::make_threshold(ThresholdVariant::NumOfN,
                                   {Condition::equals(1, 1), Condition::equals(2, 1), Condition::equals(0, 0)});
  auto codes = discrete_column(f, ds, 4);
  std::set<int> seen(codes.begin(), codes.end());
  CHECK(seen == std::set<int>{0, 1, 2, 3});
  double s = mdl_score(std::span<const int>(codes), ds.labels(), 2);
  CHECK(std::abs(s - 0.32) < 0.05);
}

TEST_CASE("score_and_filter ordering, threshold and execution paths") {
  auto ds = efc::testing::toy();
  std::vector<Feature> fs;
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b)
      for (auto op : {LogicalOp::And, LogicalOp::Xor})
        fs.push_back(Feature::make_logical(op, {Condition::equals(a, 1), Condition::equals(b, 1)}));
  fs.push_back(Feature::make_threshold(ThresholdVariant::NumOfN,
                                       {Condition::equals(1, 1), Condition::equals(2, 1), Condition::equals(0, 0)}));
  auto all = score_and_filter(fs, ds, -1e300);
  CHECK(all.size() == fs.size());
  for (std::size_t k = 1; k < all.size(); ++k) CHECK(all[k - 1].mdl >= all[k].mdl);
  CHECK(all[0].feature.kind == FeatureKind::Threshold);
  auto serial = score_and_filter(fs, ds, -1e300, 4, Execution::Serial);
  for (std::size_t k = 0; k < all.size(); ++k) {
    CHECK(serial[k].feature.key() == all[k].feature.key());
    CHECK(serial[k].mdl == all[k].mdl);
  }
  auto kept = score_and_filter(fs, ds, 0.0);
  for (const auto& s : kept) CHECK(s.mdl >= 0);
  CHECK(score_and_filter(fs, ds, 0.5).size() <= 1);
  CHECK(score_and_filter({}, ds).empty());

  auto unit = generate({"DisjunctN", 500, 1, std::nullopt});
  auto sum = Feature::make_numerical(NumericalOp::Add, 0, 1);
  auto codes = discrete_column(sum, unit, 4);
  CHECK(*std::max_element(codes.begin(), codes.end()) == 3);
  CHECK(std::isfinite(score_and_filter({sum}, unit, -1e300)[0].mdl));
}
