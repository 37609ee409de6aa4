#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "efc/data.hpp"
#include "efc/parallel.hpp"

namespace efc {

/// Trained predictor. Implementations are immutable after training and may
/// be shared across threads.
class Model {
 public:
  virtual ~Model() = default;

  /// Length-C class distribution for one row of the training schema.
  virtual std::vector<double> predict_proba(std::span<const double> x) const = 0;
  /// Probability of one class; overridden where it avoids the full vector.
  virtual double class_probability(std::span<const double> x, int c) const { return predict_proba(x)[c]; }
  /// Arg-max of predict_proba; ties go to the lower class index.
  int predict_class(std::span<const double> x) const;

  /// Checked entry points: the dataset's schema must match training.
  std::vector<double> predict_proba(const Dataset& ds, int row) const;
  int predict_class(const Dataset& ds, int row) const;
  double accuracy(const Dataset& ds) const;

  int class_count() const { return classes_; }
  int attribute_count() const { return attributes_; }
  std::uint64_t schema_fingerprint() const { return fingerprint_; }
  /// Throws DataError when `ds` does not have the training schema.
  void check_schema(const Dataset& ds) const;

  virtual std::string kind() const = 0;
  /// Versioned JSON text; restore with load_model.
  virtual std::string save() const = 0;

 protected:
  void bind_schema(const Dataset& ds);

  int classes_ = 0;
  int attributes_ = 0;
  std::uint64_t fingerprint_ = 0;
};

std::unique_ptr<Model> load_model(const std::string& text);

// ---- random forest ----

struct ForestParams {
  int tree_count = 100;
  int max_depth = 0;           // 0 = unlimited
  int features_per_split = 0;  // 0 = ceil(sqrt(m))
  int min_leaf = 1;
  std::uint64_t seed = 1;
};

/// One CART-style tree over flat node storage. Nominal splits test one value
/// against the rest; numeric splits test x <= threshold.
struct ForestTree {
  struct Node {
    int attr = -1;  // -1 marks a leaf
    bool nominal = false;
    double split = 0.0;
    int left = -1;   // taken when the test holds
    int right = -1;
    int dist = -1;   // offset of the leaf distribution
  };
  std::vector<Node> nodes;
  std::vector<double> dists;

  const double* leaf(std::span<const double> x) const;
};

class RandomForest final : public Model {
 public:
  using Model::predict_proba;
  std::vector<double> predict_proba(std::span<const double> x) const override;
  double class_probability(std::span<const double> x, int c) const override;
  std::string kind() const override { return "random_forest"; }
  std::string save() const override;

  const std::vector<ForestTree>& trees() const { return trees_; }
  /// Out-of-bag accuracy measured at training time (NaN if no row was ever out of bag).
  double oob_accuracy() const { return oob_accuracy_; }

 private:
  friend RandomForest train_random_forest(const Dataset&, const ForestParams&, Execution);
  friend std::unique_ptr<Model> load_model(const std::string&);

  std::vector<ForestTree> trees_;
  double oob_accuracy_ = std::numeric_limits<double>::quiet_NaN();
};

/// Bagged Gini trees. Tree t draws from stream derive_seed(seed, t), so the
/// parallel and serial paths produce identical forests.
RandomForest train_random_forest(const Dataset& ds, const ForestParams& params = {},
                                 Execution exec = Execution::Parallel);

// ---- decision tree ----

struct TreeParams {
  int min_leaf = 2;
  bool prune = true;
  double confidence = 0.25;
};

class DecisionTree final : public Model {
 public:
  struct Node {
    int attr = -1;  // -1 marks a leaf
    bool nominal = false;
    double split = 0.0;         // numeric: x <= split goes to children[0]
    std::vector<int> children;  // nominal: one per domain value
    std::vector<double> counts; // class counts (parent's when the branch is empty)
  };

  using Model::predict_proba;
  std::vector<double> predict_proba(std::span<const double> x) const override;
  std::string kind() const override { return "decision_tree"; }
  std::string save() const override;

  const std::vector<Node>& nodes() const { return nodes_; }
  int leaf_count() const;
  int depth() const;

 private:
  friend DecisionTree train_decision_tree(const Dataset&, const TreeParams&);
  friend std::unique_ptr<Model> load_model(const std::string&);

  std::vector<Node> nodes_;
};

/// C4.5-style tree: gain ratio, multiway nominal and binary numeric splits,
/// optional pessimistic subtree replacement.
DecisionTree train_decision_tree(const Dataset& ds, const TreeParams& params = {});

// ---- naive Bayes ----

class NaiveBayes final : public Model {
 public:
  using Model::predict_proba;
  std::vector<double> predict_proba(std::span<const double> x) const override;
  std::string kind() const override { return "naive_bayes"; }
  std::string save() const override;

  /// Per-class log-likelihood contribution of one attribute value.
  double log_likelihood(int attr, int cls, double value) const;

 private:
  friend NaiveBayes train_naive_bayes(const Dataset&);
  friend std::unique_ptr<Model> load_model(const std::string&);

  std::vector<double> log_prior_;
  std::vector<bool> nominal_;
  // nominal: [attr][cls][value] log probabilities
  std::vector<std::vector<std::vector<double>>> tables_;
  // numeric: [attr][cls] Gaussian
  std::vector<std::vector<double>> mean_, stddev_;
  std::vector<double> precision_;
};

/// Laplace-smoothed frequency tables for nominal attributes, per-class
/// Gaussians for numeric ones.
NaiveBayes train_naive_bayes(const Dataset& ds);

enum class ClassifierKind { DecisionTree, NaiveBayes, RandomForest };

ClassifierKind parse_classifier(const std::string& name);
std::string classifier_name(ClassifierKind kind);
std::unique_ptr<Model> train_classifier(ClassifierKind kind, const Dataset& ds, std::uint64_t seed,
                                        int forest_trees = 100);

}  // namespace efc
