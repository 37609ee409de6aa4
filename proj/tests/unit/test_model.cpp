#include <cmath>
#include <numeric>

#include "doctest.h"
#include "efc/errors.hpp"
#include "efc/model.hpp"
#include "efc/rng.hpp"
#include "efc/synth.hpp"
#include "support/oracles.hpp"

using namespace efc;
using efc::testing::nominal_dataset;

namespace {

void check_distribution(const Model& m, const Dataset& ds) {
  for (int i = 0; i < ds.rows(); i += 7) {
    auto p = m.predict_proba(ds, i);
    REQUIRE(p.size() == static_cast<std::size_t>(ds.class_count()));
    double sum = 0;
    for (double v : p) {
      CHECK(v >= 0);
      sum += v;
    }
    CHECK(std::abs(sum - 1) < 1e-9);
  }
}

std::vector<std::vector<double>> all_toy_inputs() {
  std::vector<std::vector<double>> out;
  for (int bits = 0; bits < 64; ++bits) {
    std::vector<double> x(6);
    for (int j = 0; j < 6; ++j) x[j] = bits >> j & 1;
    out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("forest on Toy: out-of-bag accuracy and the concept") {
  auto ds = efc::testing::toy();
  auto rf = train_random_forest(ds, {.seed = 3});
  CHECK(rf.trees().size() == 100);
  CHECK(rf.oob_accuracy() >= 0.95);
  for (const auto& x : all_toy_inputs()) CHECK(rf.predict_class(x) == concept_truth("Toy", x));
  check_distribution(rf, ds);
  for (int i = 0; i < 50; ++i) CHECK(rf.class_probability(ds.row(i), 1) == rf.predict_proba(ds.row(i))[1]);
}

TEST_CASE("forest: parallel and serial training give the same forest") {
  auto ds = generate({"DisjunctN", 600, 2, std::nullopt});
  ForestParams p{.tree_count = 20, .seed = 9};
  auto a = train_random_forest(ds, p, Execution::Parallel);
  auto b = train_random_forest(ds, p, Execution::Serial);
  CHECK(a.save() == b.save());
  p.seed = 10;
  CHECK(train_random_forest(ds, p).save() != a.save());
}

TEST_CASE("forest: errors") {
  auto one = nominal_dataset({{0}, {1}, {0}}, {1, 1, 1}, {2});
  CHECK_THROWS_AS(train_random_forest(one), DataError);
  auto ds = efc::testing::toy(1, 100);
  CHECK_THROWS_AS(train_random_forest(ds, {.tree_count = 0}), ConfigError);
}

TEST_CASE("forest: every tree voting the same class") {
  std::vector<std::vector<int>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    rows.push_back({i % 2});
    labels.push_back(i % 2);
  }
  auto rf = train_random_forest(nominal_dataset(rows, labels, {2}), {.tree_count = 15});
  auto p = rf.predict_proba(std::vector<double>{1});
  CHECK(p == std::vector<double>{0, 1});
}

TEST_CASE("decision tree on Toy") {
  auto ds = efc::testing::toy();
  auto dt = train_decision_tree(ds);
  CHECK(dt.accuracy(ds) == 1.0);
  for (const auto& x : all_toy_inputs()) CHECK(dt.predict_class(x) == concept_truth("Toy", x));
  check_distribution(dt, ds);
}

TEST_CASE("decision tree: numeric data predicts at least the majority") {
  auto ds = generate({"ModGroups", 600, 4, std::nullopt});
  auto dt = train_decision_tree(ds);
  auto counts = ds.class_counts();
  double majority = *std::max_element(counts.begin(), counts.end()) / static_cast<double>(ds.rows());
  CHECK(dt.accuracy(ds) >= majority);
}

TEST_CASE("naive Bayes: attribute identical to the class") {
  std::vector<std::vector<int>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    rows.push_back({i % 2, (i / 2) % 3});
    labels.push_back(i % 2);
  }
  auto ds = nominal_dataset(rows, labels, {2, 3});
  auto nb = train_naive_bayes(ds);
  CHECK(nb.accuracy(ds) == 1.0);
  check_distribution(nb, ds);
}

TEST_CASE("naive Bayes: uniform tables give a uniform distribution") {
  auto ds = nominal_dataset({{0}, {1}, {0}, {1}}, {0, 0, 1, 1}, {2});
  auto nb = train_naive_bayes(ds);
  auto p = nb.predict_proba(std::vector<double>{0});
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("naive Bayes: class-independent attribute has vanishing log-likelihood difference") {
  const int n = 100000;
  Rng rng(5);
  std::vector<std::vector<int>> rows;
  std::vector<int> labels;
  for (int i = 0; i < n; ++i) {
    rows.push_back({static_cast<int>(rng.below(3))});
    labels.push_back(static_cast<int>(rng.below(2)));
  }
  auto nb = train_naive_bayes(nominal_dataset(rows, labels, {3}));
  for (int v = 0; v < 3; ++v) CHECK(std::abs(nb.log_likelihood(0, 0, v) - nb.log_likelihood(0, 1, v)) < 0.03);

  auto unit = generate({"DisjunctN", n, 6, std::nullopt});
  auto gauss = train_naive_bayes(unit);
  for (double x : {0.1, 0.5, 0.9}) CHECK(std::abs(gauss.log_likelihood(4, 0, x) - gauss.log_likelihood(4, 1, x)) < 0.03);
}

TEST_CASE("decision tree and naive Bayes ignore training-row order") {
  for (const std::string name : {"Concept", "BinClassNumDisAttr"}) {
    auto ds = generate({name, 500, 2, std::nullopt});
    std::vector<int> order(ds.rows());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(1);
    rng.shuffle(std::span<int>(order));
    auto shuffled = ds.subset(order);
    auto dt_a = train_decision_tree(ds), dt_b = train_decision_tree(shuffled);
    auto nb_a = train_naive_bayes(ds), nb_b = train_naive_bayes(shuffled);
    for (int i = 0; i < ds.rows(); ++i) {
      CHECK(dt_a.predict_class(ds.row(i)) == dt_b.predict_class(ds.row(i)));
      CHECK(nb_a.predict_class(ds.row(i)) == nb_b.predict_class(ds.row(i)));
    }
  }
}

TEST_CASE("models round-trip through their saved form") {
  auto ds = generate({"BinClassNumBinAttr", 400, 3, std::nullopt});
  for (auto kind : {ClassifierKind::DecisionTree, ClassifierKind::NaiveBayes, ClassifierKind::RandomForest}) {
    auto model = train_classifier(kind, ds, 4, 10);
    auto back = load_model(model->save());
    CHECK(back->kind() == model->kind());
    for (int i = 0; i < ds.rows(); ++i) CHECK(back->predict_proba(ds, i) == model->predict_proba(ds, i));
  }
  CHECK_THROWS_AS(load_model("{\"format\":\"other\"}"), DataError);
  CHECK_THROWS_AS(load_model("not json"), DataError);
}

TEST_CASE("schema mismatch and classifier names") {
  auto ds = efc::testing::toy(1, 200);
  auto nb = train_naive_bayes(ds);
  auto other = generate({"Concept", 50, 1, std::nullopt});
  CHECK_THROWS_AS(nb.predict_proba(other, 0), DataError);
  CHECK(parse_classifier("dt") == ClassifierKind::DecisionTree);
  CHECK(classifier_name(ClassifierKind::NaiveBayes) == "nb");
  CHECK_THROWS_AS(parse_classifier("svm"), ConfigError);
}
