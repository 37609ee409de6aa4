#include <algorithm>
#include <chrono>
#include <cstring>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "efc/errors.hpp"
#include "efc/pipeline.hpp"
#include "efc/rng.hpp"

namespace efc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

enum SeedStream : std::uint64_t { kForestStream = 1, kExplainStream = 2 };

EfcResult finish(const Dataset& ds, const EfcConfig& cfg, const std::vector<CandidateGroup>& groups,
                 int class_index, const Budget& budget, EfcResult r) {
  r.groups = groups;
  r.class_index = class_index;
  if (groups.empty()) {
    r.note = "no candidate groups survived; dataset passed through unchanged";
    r.enriched = ds;
    r.timings["construct"] = r.timings["evaluate"] = r.timings["augment"] = 0;
    return r;
  }
  auto t0 = Clock::now();
  ConstructResult built = generate_features(ds, groups, class_index, cfg.construct, budget);
  r.timings["construct"] = ms_since(t0);
  r.candidates = static_cast<int>(built.features.size());
  r.logical_candidates = built.logical_candidates;
  r.covered = built.covered;
  r.timed_out = built.timed_out;

  t0 = Clock::now();
  r.features = score_and_filter(built.features, ds, cfg.min_mdl, cfg.construct.bins, cfg.exec);
  r.timings["evaluate"] = ms_since(t0);

  t0 = Clock::now();
  std::vector<Feature> kept;
  for (const auto& s : r.features) kept.push_back(s.feature);
  r.enriched = augment(ds, kept, cfg.exec);
  r.timings["augment"] = ms_since(t0);
  return r;
}

void require_two_classes(const Dataset& ds) {
  auto counts = ds.class_counts();
  if (std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }) < 2)
    throw DataError("efc: the dataset needs at least two classes present");
}

}  // namespace

void EfcConfig::validate() const {
  if (!(thr_l > 0 && thr_l <= thr_u && thr_u <= 1)) throw ConfigError("efc: need 0 < thr_l <= thr_u <= 1");
  if (!(step > 0)) throw ConfigError("efc: step must be > 0");
  if (!(noise_thr >= 0 && noise_thr < 1)) throw ConfigError("efc: noiseThr must lie in [0, 1)");
  construct.validate();
  explain.validate();
  if (forest.tree_count < 1) throw ConfigError("efc: tree count must be >= 1");
}

double EfcResult::construction_ms() const {
  double total = 0;
  for (const char* phase : {"construct", "evaluate"}) {
    auto it = timings.find(phase);
    if (it != timings.end()) total += it->second;
  }
  return total;
}

std::uint64_t EfcResult::fingerprint() const {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(class_index) + 17);
  auto add = [&](std::uint64_t v) { h = mix64(h ^ (v + 0x9E3779B97F4A7C15ULL)); };
  for (const auto& g : groups) {
    for (int a : g.attrs) add(static_cast<std::uint64_t>(a));
    add(static_cast<std::uint64_t>(g.support) << 20);
  }
  for (const auto& s : features) {
    for (unsigned char c : s.feature.key()) add(c);
    std::uint64_t bits;
    std::memcpy(&bits, &s.mdl, sizeof bits);
    add(bits);
  }
  add(enriched.checksum());
  return h;
}

EfcResult run_efc(const Dataset& ds, const EfcConfig& cfg, const Budget& budget) {
  cfg.validate();
  require_two_classes(ds);
  EfcResult r;

  if (cfg.groups) {
    ExplainConfig ec = cfg.explain;
    int cls = ec.class_index.value_or(-1);
    if (cls < 0) cls = select_explanation_instances(ds, ec).class_index;
    r.timings["train"] = r.timings["explain"] = r.timings["groups"] = 0;
    return finish(ds, cfg, *cfg.groups, cls, budget, std::move(r));
  }

  auto t0 = Clock::now();
  ForestParams fp = cfg.forest;
  fp.seed = derive_seed(cfg.seed, kForestStream);
  RandomForest forest = train_random_forest(ds, fp, cfg.exec);
  r.timings["train"] = ms_since(t0);

  t0 = Clock::now();
  ExplainConfig ec = cfg.explain;
  ec.seed = derive_seed(cfg.seed, kExplainStream);
  ExplanationSelection sel = select_explanation_instances(ds, ec);
  ExplanationMatrix e = get_explanations(ds, forest, sel, ec, cfg.exec);
  r.explained = e.rows;
  r.timings["explain"] = ms_since(t0);

  t0 = Clock::now();
  auto groups = collect_groups(e, cfg.thr_l, cfg.thr_u, cfg.step, cfg.noise_thr, cfg.exec);
  r.timings["groups"] = ms_since(t0);
  return finish(ds, cfg, groups, sel.class_index, budget, std::move(r));
}

EfcResult run_exhaustive(const Dataset& ds, const EfcConfig& cfg, const Budget& budget) {
  EfcConfig c = cfg;
  CandidateGroup all;
  all.attrs.resize(ds.cols());
  std::iota(all.attrs.begin(), all.attrs.end(), 0);
  all.support = ds.rows();
  if (ds.cols() < 2) {
    c.groups = std::vector<CandidateGroup>{};
  } else {
    c.groups = std::vector<CandidateGroup>{all};
  }
  return run_efc(ds, c, budget);
}

std::string features_to_json(const std::vector<ScoredFeature>& features, const Dataset& ds) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : features) {
    nlohmann::json group = nlohmann::json::array();
    for (int a : s.feature.source_group) group.push_back(ds.attribute(a).name);
    nlohmann::json item{{"kind", s.feature.kind_name()},
                        {"rendering", s.feature.render(ds)},
                        {"key", s.feature.key()},
                        {"sourceGroup", group},
                        {"mdl", s.mdl}};
    if (s.feature.kind == FeatureKind::Rule) {
      item["covered"] = s.feature.rule.covered;
      item["correct"] = s.feature.rule.correct;
      item["cf"] = s.feature.rule.cf;
    }
    out.push_back(std::move(item));
  }
  return out.dump(2);
}

std::string format_feature_table(const std::vector<ScoredFeature>& features, const Dataset& ds) {
  std::vector<std::string> names;
  std::size_t width = 10;
  for (const auto& s : features) {
    names.push_back(s.feature.render(ds));
    width = std::max(width, names.back().size());
  }
  std::ostringstream out;
  out << "Constructs" << std::string(width - 10 + 2, ' ') << "MDL score\n";
  out << std::string(width + 11, '-') << '\n';
  char buf[32];
  for (std::size_t k = 0; k < features.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%9.4f", features[k].mdl);
    out << names[k] << std::string(width - names[k].size() + 2, ' ') << buf << '\n';
  }
  return out.str();
}

}  // namespace efc
