#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "efc/errors.hpp"
#include "efc/pipeline.hpp"
#include "efc/rng.hpp"

namespace efc {

ConstructMode parse_construct_mode(const std::string& name) {
  static const std::pair<const char*, ConstructMode> table[] = {
      {"base", ConstructMode::Base}, {"log", ConstructMode::Log},     {"rel", ConstructMode::Rel},
      {"cart", ConstructMode::Cart}, {"drthr", ConstructMode::DrThr}, {"num", ConstructMode::Num},
      {"all", ConstructMode::All},   {"fs", ConstructMode::FS}};
  for (const auto& [n, m] : table)
    if (name == n) return m;
  throw ConfigError("unknown construction mode '" + name + "'");
}

std::string construct_mode_name(ConstructMode mode) {
  switch (mode) {
    case ConstructMode::Base: return "base";
    case ConstructMode::Log: return "log";
    case ConstructMode::Rel: return "rel";
    case ConstructMode::Cart: return "cart";
    case ConstructMode::DrThr: return "drthr";
    case ConstructMode::Num: return "num";
    case ConstructMode::All: return "all";
    case ConstructMode::FS: return "fs";
  }
  return "?";
}

EfcConfig config_for_mode(ConstructMode mode, const EfcConfig& base) {
  EfcConfig c = base;
  switch (mode) {
    case ConstructMode::Base:
    case ConstructMode::All:
    case ConstructMode::FS: c.construct.set_kinds("all"); break;
    case ConstructMode::Log: c.construct.set_kinds("log"); break;
    case ConstructMode::Rel: c.construct.set_kinds("rel"); break;
    case ConstructMode::Cart: c.construct.set_kinds("cart"); break;
    case ConstructMode::DrThr: c.construct.set_kinds("rule,thr"); break;
    case ConstructMode::Num: c.construct.set_kinds("num"); break;
  }
  return c;
}

std::vector<int> assign_folds(const Dataset& ds, int folds, std::uint64_t seed, bool* stratified) {
  if (folds < 2) throw ConfigError("cv: folds must be >= 2");
  if (folds > ds.rows()) throw ConfigError("cv: more folds than instances");
  Rng rng(seed);
  std::vector<int> order(ds.rows());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<int>(order));
  auto counts = ds.class_counts();
  bool strat = std::all_of(counts.begin(), counts.end(), [&](int c) { return c == 0 || c >= folds; });
  if (stratified) *stratified = strat;
  std::vector<int> fold(ds.rows());
  if (!strat) {
    for (int k = 0; k < ds.rows(); ++k) fold[order[k]] = k % folds;
    return fold;
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ds.label(a) < ds.label(b); });
  for (int k = 0; k < ds.rows(); ++k) fold[order[k]] = k % folds;
  return fold;
}

namespace {

std::uint64_t features_hash(const std::vector<ScoredFeature>& features) {
  std::uint64_t h = 0xfeed;
  for (const auto& s : features)
    for (unsigned char c : s.feature.key()) h = mix64(h ^ (c + 0x9E3779B97F4A7C15ULL));
  return h;
}

std::vector<Feature> kept_features(const EfcResult& r, double min_mdl = -1e300) {
  std::vector<Feature> out;
  for (const auto& s : r.features)
    if (s.mdl >= min_mdl) out.push_back(s.feature);
  return out;
}

double evaluate(ClassifierKind kind, const Dataset& train, const Dataset& test, std::uint64_t seed, int trees) {
  auto model = train_classifier(kind, train, seed, trees);
  return model->accuracy(test);
}

std::vector<int> rows_where(const std::vector<int>& fold, auto pred) {
  std::vector<int> rows;
  for (int i = 0; i < static_cast<int>(fold.size()); ++i)
    if (pred(fold[i])) rows.push_back(i);
  return rows;
}

struct FoldOutcome {
  double accuracy = 0;
  std::uint64_t hash = 0;
  int features = 0;
  double fs_threshold = std::nan("");
};

FoldOutcome run_fold(const Dataset& train, const Dataset& test, ClassifierKind classifier, const CvConfig& cfg,
                     std::uint64_t fold_seed) {
  FoldOutcome out;
  const std::uint64_t model_seed = derive_seed(fold_seed, 1);
  if (cfg.mode == ConstructMode::Base) {
    out.accuracy = evaluate(classifier, train, test, model_seed, cfg.forest_trees);
    out.hash = features_hash({});
    return out;
  }
  EfcConfig ec = config_for_mode(cfg.mode, cfg.efc);
  ec.seed = derive_seed(fold_seed, 2);

  if (cfg.mode == ConstructMode::FS) {
    // internal 75:25 split of the training fold picks the MDL threshold
    bool strat = true;
    auto inner = assign_folds(train, 4, derive_seed(fold_seed, 3), &strat);
    auto fit_rows = rows_where(inner, [](int f) { return f != 0; });
    auto val_rows = rows_where(inner, [](int f) { return f == 0; });
    Dataset fit = train.subset(fit_rows), val = train.subset(val_rows);
    EfcConfig probe = ec;
    probe.min_mdl = -1e300;
    EfcResult r = run_efc(fit, probe);
    double best_acc = -1;
    for (double thr : {0.0, 0.25, 0.5}) {
      auto fs = kept_features(r, thr);
      double acc = evaluate(classifier, augment(fit, fs, ec.exec), augment(val, fs, ec.exec), model_seed,
                            cfg.forest_trees);
      if (acc > best_acc) {
        best_acc = acc;
        out.fs_threshold = thr;
      }
    }
    ec.min_mdl = out.fs_threshold;
  }

  EfcResult r = run_efc(train, ec);
  auto fs = kept_features(r);
  out.features = static_cast<int>(fs.size());
  out.hash = features_hash(r.features);
  out.accuracy = evaluate(classifier, r.enriched, augment(test, fs, ec.exec), model_seed, cfg.forest_trees);
  return out;
}

}  // namespace

CvResult cross_validate(const Dataset& ds, ClassifierKind classifier, const CvConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  CvResult res;
  auto fold = assign_folds(ds, cfg.folds, cfg.seed, &res.stratified);
  if (!res.stratified)
    res.warnings.push_back("a class has fewer instances than folds; using non-stratified folds");
  if (cfg.only_fold && (*cfg.only_fold < 0 || *cfg.only_fold >= cfg.folds))
    throw ConfigError("cv: fold index out of range");

  res.fold_accuracy.assign(cfg.folds, std::nan(""));
  res.fold_feature_hash.assign(cfg.folds, 0);
  res.fold_feature_count.assign(cfg.folds, 0);
  res.fold_fs_threshold.assign(cfg.folds, std::nan(""));
  double sum = 0, sq = 0;
  int done = 0;
  for (int k = 0; k < cfg.folds; ++k) {
    if (cfg.only_fold && *cfg.only_fold != k) continue;
    Dataset train = ds.subset(rows_where(fold, [k](int f) { return f != k; }));
    Dataset test = ds.subset(rows_where(fold, [k](int f) { return f == k; }));
    FoldOutcome o = run_fold(train, test, classifier, cfg, derive_seed(cfg.seed, 100 + k));
    res.fold_accuracy[k] = 100.0 * o.accuracy;
    res.fold_feature_hash[k] = o.hash;
    res.fold_feature_count[k] = o.features;
    res.fold_fs_threshold[k] = o.fs_threshold;
    sum += res.fold_accuracy[k];
    sq += res.fold_accuracy[k] * res.fold_accuracy[k];
    ++done;
  }
  res.mean = sum / done;
  res.stddev = done > 1 ? std::sqrt(std::max(0.0, (sq - sum * sum / done) / (done - 1))) : 0.0;
  res.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace efc
