#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "efc/data.hpp"
#include "efc/model.hpp"
#include "efc/parallel.hpp"
#include "efc/rng.hpp"

namespace efc {

struct ExplainConfig {
  /// Unset explains the minority class.
  std::optional<int> class_index;
  int max_to_explain = 500;
  /// Minimum support of the explained class as a fraction of n.
  double inst_thr = 0.10;
  /// Sampled permutations per explained instance (each yields one
  /// marginal contribution per attribute).
  int samples = 1000;
  std::uint64_t seed = 1;

  void validate() const;
};

/// e x m attribute contributions toward one class.
struct ExplanationMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major
  std::vector<std::string> attribute_names;
  std::vector<int> instances;  // dataset row of each matrix row (may be empty for imports)
  int class_index = 0;
  int samples = 0;
  std::uint64_t seed = 0;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * cols + j]; }
  std::span<const double> row(int i) const {
    return {values.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
  }
};

struct ExplanationSelection {
  int class_index = 0;
  std::vector<int> instances;  // ascending
};

/// Class to explain and which of its instances. Falls back from the
/// requested (or minority) class to the next-smallest class whose support
/// reaches inst_thr * n; caps the instance list at max_to_explain by a
/// seeded uniform subsample.
ExplanationSelection select_explanation_instances(const Dataset& ds, const ExplainConfig& cfg);

/// Sampled Shapley contributions of each attribute of `x` to f_c(x), with
/// `background` rows supplying the values of absent attributes.
std::vector<double> ime_explain(const Model& model, const Dataset& background, std::span<const double> x,
                                int class_index, int samples, Rng& rng);
/// Explains row `instance` of `ds`, using ds as background and the
/// per-instance stream derive_seed(seed, instance).
std::vector<double> ime_explain(const Model& model, const Dataset& ds, int instance, int class_index, int samples,
                                std::uint64_t seed);

ExplanationMatrix get_explanations(const Dataset& ds, const Model& model, const ExplanationSelection& selection,
                                   const ExplainConfig& cfg, Execution exec = Execution::Parallel);

/// CSV with one column per attribute (header = attribute names).
void write_explanations_csv(const ExplanationMatrix& e, const std::filesystem::path& path);
std::string format_explanations_csv(const ExplanationMatrix& e);
ExplanationMatrix parse_explanations_csv(const std::string& text);
ExplanationMatrix read_explanations_csv(const std::filesystem::path& path);

}  // namespace efc
