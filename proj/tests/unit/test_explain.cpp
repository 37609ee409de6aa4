#include <cmath>
#include <functional>
#include <numeric>

#include "doctest.h"
#include "efc/errors.hpp"
#include "efc/explain.hpp"
#include "efc/synth.hpp"
#include "support/oracles.hpp"

using namespace efc;
using efc::testing::FunctionModel;
using efc::testing::compress;
using efc::testing::exact_shapley;

namespace {

double toy_concept(std::span<const double> x) { return concept_truth("Toy", x); }

}  // namespace

TEST_CASE("instance selection") {
  auto ds = efc::testing::toy();
  auto sel = select_explanation_instances(ds, {});
  CHECK(sel.class_index == 1);
  CHECK(static_cast<int>(sel.instances.size()) == ds.class_counts()[1]);
  CHECK(std::is_sorted(sel.instances.begin(), sel.instances.end()));

  ExplainConfig cap;
  cap.max_to_explain = 300;
  auto capped = select_explanation_instances(ds, cap);
  CHECK(capped.instances.size() == 300);
  for (int i : capped.instances) CHECK(ds.label(i) == 1);
  CHECK(select_explanation_instances(ds, cap).instances == capped.instances);

  ExplainConfig high;
  high.inst_thr = 0.3;
  CHECK(select_explanation_instances(ds, high).class_index == 0);
  high.inst_thr = 0.9;
  CHECK_THROWS_AS(select_explanation_instances(ds, high), DataError);

  ExplainConfig bad;
  bad.max_to_explain = 0;
  CHECK_THROWS_AS(select_explanation_instances(ds, bad), ConfigError);
}

TEST_CASE("attribute the model never reads gets exactly zero") {
  auto ds = efc::testing::toy(2, 500);
  FunctionModel model(ds, toy_concept);
  for (int i = 0; i < 40; ++i) {
    auto phi = ime_explain(model, ds, i, 1, 50, 7);
    CHECK(phi[5] == 0.0);
  }
}

TEST_CASE("additive model converges to x1 minus its background mean") {
  auto ds = efc::testing::toy(3, 1000);
  FunctionModel model(ds, [](std::span<const double> x) { return x[0]; });
  double mean = 0;
  for (int i = 0; i < ds.rows(); ++i) mean += ds.at(i, 0);
  mean /= ds.rows();
  auto bg = compress(ds);
  for (int i = 0; i < 10; ++i) {
    auto phi = ime_explain(model, ds, i, 1, 2000, 1);
    auto exact = exact_shapley(model, bg, ds.row(i), 1);
    CHECK(exact[0] == doctest::Approx(ds.at(i, 0) - mean).epsilon(1e-9));
    CHECK(std::abs(phi[0] - exact[0]) < 0.03);
    for (int j = 1; j < 6; ++j) CHECK(phi[j] == 0.0);
  }
}

TEST_CASE("efficiency against the subset-enumeration oracle") {
  auto ds = efc::testing::toy(4, 1000);
  FunctionModel model(ds, [](std::span<const double> x) {
    return 0.2 + 0.5 * concept_truth("Toy", x) + 0.1 * x[5] * x[1];
  });
  auto bg = compress(ds);
  double base = 0;
  for (int i = 0; i < ds.rows(); ++i) base += model.class_probability(ds.row(i), 1);
  base /= ds.rows();
  for (int i = 0; i < 20; ++i) {
    auto phi = ime_explain(model, ds, i, 1, 2000, 3);
    auto exact = exact_shapley(model, bg, ds.row(i), 1);
    double sum = std::accumulate(phi.begin(), phi.end(), 0.0);
    double exact_sum = std::accumulate(exact.begin(), exact.end(), 0.0);
    CHECK(exact_sum == doctest::Approx(model.class_probability(ds.row(i), 1) - base).epsilon(1e-9));
    CHECK(std::abs(sum - exact_sum) < 0.02);
    for (int j = 0; j < 6; ++j) CHECK(std::abs(phi[j] - exact[j]) < 0.05);
  }
}

TEST_CASE("Toy instance 53") {
  auto ds = efc::testing::toy();
  auto rf = train_random_forest(ds, {.seed = 2});
  std::vector<double> x{0, 1, 1, 1, 0, 1};
  Rng rng(5);
  auto phi = ime_explain(rf, ds, x, 1, 2000, rng);
  for (int j = 0; j < 3; ++j) CHECK(phi[j] > 0.15);
  CHECK(std::abs(phi[5]) < 0.03);
  CHECK(std::abs(phi[3]) < 0.1);
}

TEST_CASE("explanation matrix on Toy follows the active subspace") {
  auto ds = efc::testing::toy();
  auto rf = train_random_forest(ds, {.seed = 5});
  ExplainConfig cfg;
  auto sel = select_explanation_instances(ds, cfg);
  auto e = get_explanations(ds, rf, sel, cfg);
  CHECK(e.rows == static_cast<int>(sel.instances.size()));
  CHECK(e.cols == 6);
  auto bg = compress(ds);
  int agree = 0, oracle_agree = 0, with_oracle = 0, single = 0, single_agree = 0;
  auto top3 = [](std::span<const double> r) {
    std::vector<int> idx(r.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(r[a]) > std::abs(r[b]); });
    idx.resize(3);
    std::sort(idx.begin(), idx.end());
    return idx;
  };
  for (int i = 0; i < e.rows; ++i) {
    int row = sel.instances[i];
    std::vector<int> active = ds.at(row, 0) == 0 ? std::vector<int>{0, 1, 2} : std::vector<int>{0, 3, 4};
    for (double v : e.row(i)) CHECK(std::isfinite(v));
    agree += top3(e.row(i)) == active;
    auto exact = exact_shapley(rf, bg, ds.row(row), 1);
    oracle_agree += top3(exact) == active;
    double worst = 0;
    for (int j = 0; j < 6; ++j) worst = std::max(worst, std::abs(exact[j] - e.at(i, j)));
    with_oracle += worst < 0.05;
    // rows where only one branch of the concept holds
    bool other = ds.at(row, 0) == 0 ? ds.at(row, 3) == 1 && ds.at(row, 4) == 1 : ds.at(row, 1) == 1 && ds.at(row, 2) == 1;
    if (!other) {
      ++single;
      single_agree += top3(e.row(i)) == active;
    }
  }
  CHECK(with_oracle >= 0.95 * e.rows);
  CHECK(std::abs(agree - oracle_agree) <= 0.03 * e.rows);
  CHECK(single_agree >= 0.85 * single);
}

TEST_CASE("explanations are independent of evaluation order and thread count") {
  auto ds = generate({"Concept", 400, 2, std::nullopt});
  auto rf = train_random_forest(ds, {.tree_count = 20});
  ExplainConfig cfg;
  cfg.samples = 60;
  auto sel = select_explanation_instances(ds, cfg);
  auto a = get_explanations(ds, rf, sel, cfg, Execution::Parallel);
  auto b = get_explanations(ds, rf, sel, cfg, Execution::Serial);
  CHECK(a.values == b.values);
  ExplanationSelection one{sel.class_index, {sel.instances[7]}};
  auto c = get_explanations(ds, rf, one, cfg);
  CHECK(c.rows == 1);
  CHECK(std::equal(c.values.begin(), c.values.end(), a.row(7).begin()));
}

TEST_CASE("numeric data is explained without the value cache") {
  auto ds = generate({"DisjunctN", 300, 1, std::nullopt});
  FunctionModel model(ds, [](std::span<const double> x) { return x[0] > 0.5 ? 0.9 : 0.1; });
  auto phi = ime_explain(model, ds, 0, 1, 200, 1);
  for (int j = 1; j < 5; ++j) CHECK(phi[j] == 0.0);
  CHECK(phi[0] != 0.0);
}

TEST_CASE("explanation CSV round trip and errors") {
  ExplanationMatrix e;
  e.rows = 2;
  e.cols = 3;
  e.attribute_names = {"a", "b", "c"};
  e.values = {0.1, -0.25, 1e-17, 3, 0, 0.3333333333333333};
  auto back = parse_explanations_csv(format_explanations_csv(e));
  CHECK(back.rows == 2);
  CHECK(back.attribute_names == e.attribute_names);
  CHECK(back.values == e.values);
  CHECK_THROWS_AS(parse_explanations_csv("a,b\n1\n"), DataError);
  CHECK_THROWS_AS(parse_explanations_csv("a,b\n1,x\n"), DataError);
  CHECK_THROWS_AS(parse_explanations_csv(""), DataError);
}

TEST_CASE("explain: argument errors") {
  auto ds = efc::testing::toy(1, 100);
  FunctionModel model(ds, toy_concept);
  CHECK_THROWS_AS(ime_explain(model, ds, 0, 1, 0, 1), ConfigError);
  CHECK_THROWS_AS(ime_explain(model, ds, 0, 2, 10, 1), ConfigError);
  auto other = generate({"Concept", 50, 1, std::nullopt});
  CHECK_THROWS_AS(ime_explain(model, other, 0, 1, 10, 1), DataError);
}
