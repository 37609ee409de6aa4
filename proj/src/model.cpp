#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "efc/errors.hpp"
#include "efc/model.hpp"

namespace efc {

using nlohmann::json;

int Model::predict_class(std::span<const double> x) const {
  auto p = predict_proba(x);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

void Model::bind_schema(const Dataset& ds) {
  classes_ = ds.class_count();
  attributes_ = ds.cols();
  fingerprint_ = ds.schema_fingerprint();
}

void Model::check_schema(const Dataset& ds) const {
  if (ds.schema_fingerprint() != fingerprint_ || ds.cols() != attributes_)
    throw DataError("model: dataset schema does not match the training schema");
}

std::vector<double> Model::predict_proba(const Dataset& ds, int row) const {
  check_schema(ds);
  return predict_proba(ds.row(row));
}

int Model::predict_class(const Dataset& ds, int row) const {
  check_schema(ds);
  return predict_class(ds.row(row));
}

double Model::accuracy(const Dataset& ds) const {
  check_schema(ds);
  int hits = 0;
  for (int i = 0; i < ds.rows(); ++i) hits += predict_class(ds.row(i)) == ds.label(i);
  return static_cast<double>(hits) / ds.rows();
}

ClassifierKind parse_classifier(const std::string& name) {
  if (name == "dt") return ClassifierKind::DecisionTree;
  if (name == "nb") return ClassifierKind::NaiveBayes;
  if (name == "rf") return ClassifierKind::RandomForest;
  throw ConfigError("unknown classifier '" + name + "' (expected dt, nb or rf)");
}

std::string classifier_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::DecisionTree: return "dt";
    case ClassifierKind::NaiveBayes: return "nb";
    case ClassifierKind::RandomForest: return "rf";
  }
  return "?";
}

std::unique_ptr<Model> train_classifier(ClassifierKind kind, const Dataset& ds, std::uint64_t seed,
                                        int forest_trees) {
  switch (kind) {
    case ClassifierKind::DecisionTree: return std::make_unique<DecisionTree>(train_decision_tree(ds));
    case ClassifierKind::NaiveBayes: return std::make_unique<NaiveBayes>(train_naive_bayes(ds));
    case ClassifierKind::RandomForest: {
      ForestParams p;
      p.tree_count = forest_trees;
      p.seed = seed;
      return std::make_unique<RandomForest>(train_random_forest(ds, p));
    }
  }
  throw ConfigError("unknown classifier kind");
}

// ---- serialisation ----

namespace {

constexpr int kFormatVersion = 1;

json header(const Model& m) {
  return {{"format", "efc-model"},
          {"version", kFormatVersion},
          {"kind", m.kind()},
          {"classes", m.class_count()},
          {"attributes", m.attribute_count()},
          {"fingerprint", m.schema_fingerprint()}};
}

}  // namespace

std::string RandomForest::save() const {
  json j = header(*this);
  json trees = json::array();
  for (const auto& t : trees_) {
    json nodes = json::array();
    for (const auto& n : t.nodes) nodes.push_back({n.attr, n.nominal, n.split, n.left, n.right, n.dist});
    trees.push_back({{"nodes", nodes}, {"dists", t.dists}});
  }
  j["trees"] = trees;
  j["oob"] = std::isnan(oob_accuracy_) ? json(nullptr) : json(oob_accuracy_);
  return j.dump();
}

std::string DecisionTree::save() const {
  json j = header(*this);
  json nodes = json::array();
  for (const auto& n : nodes_)
    nodes.push_back({{"attr", n.attr}, {"nominal", n.nominal}, {"split", n.split}, {"children", n.children},
                     {"counts", n.counts}});
  j["nodes"] = nodes;
  return j.dump();
}

std::string NaiveBayes::save() const {
  json j = header(*this);
  j["log_prior"] = log_prior_;
  j["nominal"] = nominal_;
  j["tables"] = tables_;
  j["mean"] = mean_;
  j["stddev"] = stddev_;
  j["precision"] = precision_;
  return j.dump();
}

std::unique_ptr<Model> load_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model: malformed artifact: ") + e.what());
  }
  if (j.value("format", "") != "efc-model") throw DataError("model: not a model artifact");
  if (j.value("version", 0) != kFormatVersion) throw DataError("model: unsupported artifact version");
  auto bind = [&](Model& m, auto& classes, auto& attrs, auto& fp) {
    (void)m;
    classes = j.at("classes").get<int>();
    attrs = j.at("attributes").get<int>();
    fp = j.at("fingerprint").get<std::uint64_t>();
  };
  try {
    const std::string kind = j.at("kind");
    if (kind == "random_forest") {
      auto m = std::make_unique<RandomForest>();
      bind(*m, m->classes_, m->attributes_, m->fingerprint_);
      for (const auto& jt : j.at("trees")) {
        ForestTree t;
        for (const auto& jn : jt.at("nodes")) {
          ForestTree::Node n;
          n.attr = jn[0];
          n.nominal = jn[1];
          n.split = jn[2];
          n.left = jn[3];
          n.right = jn[4];
          n.dist = jn[5];
          t.nodes.push_back(n);
        }
        t.dists = jt.at("dists").get<std::vector<double>>();
        m->trees_.push_back(std::move(t));
      }
      if (!j.at("oob").is_null()) m->oob_accuracy_ = j.at("oob");
      return m;
    }
    if (kind == "decision_tree") {
      auto m = std::make_unique<DecisionTree>();
      bind(*m, m->classes_, m->attributes_, m->fingerprint_);
      for (const auto& jn : j.at("nodes")) {
        DecisionTree::Node n;
        n.attr = jn.at("attr");
        n.nominal = jn.at("nominal");
        n.split = jn.at("split");
        n.children = jn.at("children").get<std::vector<int>>();
        n.counts = jn.at("counts").get<std::vector<double>>();
        m->nodes_.push_back(std::move(n));
      }
      return m;
    }
    if (kind == "naive_bayes") {
      auto m = std::make_unique<NaiveBayes>();
      bind(*m, m->classes_, m->attributes_, m->fingerprint_);
      m->log_prior_ = j.at("log_prior").get<std::vector<double>>();
      m->nominal_ = j.at("nominal").get<std::vector<bool>>();
      m->tables_ = j.at("tables").get<std::vector<std::vector<std::vector<double>>>>();
      m->mean_ = j.at("mean").get<std::vector<std::vector<double>>>();
      m->stddev_ = j.at("stddev").get<std::vector<std::vector<double>>>();
      m->precision_ = j.at("precision").get<std::vector<double>>();
      return m;
    }
    throw DataError("model: unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw DataError(std::string("model: malformed artifact: ") + e.what());
  }
}

}  // namespace efc
