#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "efc/construct.hpp"
#include "efc/data.hpp"
#include "efc/explain.hpp"
#include "efc/groups.hpp"
#include "efc/mdl.hpp"
#include "efc/model.hpp"

namespace efc {

struct EfcConfig {
  double thr_l = 0.1;
  double thr_u = 0.8;
  double step = 0.1;
  double noise_thr = 0.01;
  /// Features scoring below this MDL value are dropped.
  double min_mdl = 0.0;
  ConstructConfig construct;
  ExplainConfig explain;
  ForestParams forest;
  /// Master seed; forest and explainer seeds are derived from it.
  std::uint64_t seed = 1;
  /// Skips model training and explanation when set.
  std::optional<std::vector<CandidateGroup>> groups;
  Execution exec = Execution::Parallel;

  void validate() const;
};

struct EfcResult {
  int class_index = 0;
  int explained = 0;
  std::vector<CandidateGroup> groups;
  /// Kept features, best first.
  std::vector<ScoredFeature> features;
  int candidates = 0;
  int logical_candidates = 0;
  int covered = 0;
  Dataset enriched;
  /// Milliseconds per phase: train, explain, groups, construct, evaluate, augment.
  std::map<std::string, double> timings;
  bool timed_out = false;
  /// Set when no group survived and the input passes through unchanged.
  std::string note;

  double construction_ms() const;
  /// Hash of the kept features' keys and scores, timing-independent.
  std::uint64_t fingerprint() const;
};

EfcResult run_efc(const Dataset& ds, const EfcConfig& cfg, const Budget& budget = {});

/// Same enumerator over a single group of all attributes.
EfcResult run_exhaustive(const Dataset& ds, const EfcConfig& cfg, const Budget& budget = {});

/// Construction modes of the evaluation harness.
enum class ConstructMode { Base, Log, Rel, Cart, DrThr, Num, All, FS };

ConstructMode parse_construct_mode(const std::string& name);
std::string construct_mode_name(ConstructMode mode);
/// EFC configuration restricted to the feature kinds of `mode`.
EfcConfig config_for_mode(ConstructMode mode, const EfcConfig& base);

struct CvConfig {
  int folds = 10;
  std::uint64_t seed = 1;
  ConstructMode mode = ConstructMode::Base;
  EfcConfig efc;
  int forest_trees = 100;
  /// Evaluate only this fold (others report NaN).
  std::optional<int> only_fold;
};

struct CvResult {
  double mean = 0;  // percent
  double stddev = 0;
  std::vector<double> fold_accuracy;  // percent
  std::vector<std::uint64_t> fold_feature_hash;
  std::vector<int> fold_feature_count;
  std::vector<double> fold_fs_threshold;
  bool stratified = true;
  std::vector<std::string> warnings;
  double elapsed_ms = 0;
};

/// Fold index per row; stratified round-robin over a seeded shuffle, or
/// plain when some class has fewer rows than folds.
std::vector<int> assign_folds(const Dataset& ds, int folds, std::uint64_t seed, bool* stratified = nullptr);

CvResult cross_validate(const Dataset& ds, ClassifierKind classifier, const CvConfig& cfg);

struct BenchmarkSpec {
  std::string dataset;
  Dataset data;
  std::vector<ClassifierKind> classifiers;
  std::vector<ConstructMode> modes;
};

struct BenchmarkRow {
  std::string dataset;
  std::string classifier;
  std::string mode;
  double accuracy = 0;
  double stddev = 0;
  double elapsed_ms = 0;
  double features = 0;
};

/// Runs every (dataset x classifier x mode) cell; writes `path` as CSV and
/// `path` + ".txt" as an aligned table when path is non-empty.
std::vector<BenchmarkRow> benchmark_report(const std::vector<BenchmarkSpec>& specs, const CvConfig& base,
                                           const std::filesystem::path& path);

std::string format_benchmark_table(const std::vector<BenchmarkRow>& rows);

/// [{kind, rendering, key, sourceGroup, mdl}, ...]
std::string features_to_json(const std::vector<ScoredFeature>& features, const Dataset& ds);
/// Ranked two-column text table of renderings and scores.
std::string format_feature_table(const std::vector<ScoredFeature>& features, const Dataset& ds);

}  // namespace efc
