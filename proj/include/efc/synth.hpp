#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "efc/data.hpp"

namespace efc {

struct SyntheticSpec {
  std::string name;
  int n = 2000;
  std::uint64_t seed = 1;
  /// Percent of labels flipped; unset uses the dataset's fixed level.
  std::optional<double> noise_percent;
};

/// The ten benchmark generators, "Toy", and the "TicTacToe" endgame table.
const std::vector<std::string>& synthetic_names();

/// Fixed class-noise level of a named dataset (0, 5 or 10).
double default_noise_percent(const std::string& name);

/// Indices of attributes the concept never reads.
std::vector<int> unrelated_attributes(const std::string& name);

Dataset generate(const SyntheticSpec& spec);

/// Noise-free class of one attribute vector. For CondInd, whose class is
/// drawn before its attributes, this is the Bayes-optimal decision.
int concept_truth(const std::string& name, std::span<const double> x);

/// All 958 legal final tic-tac-toe boards; class "positive" when x wins.
/// Fixed content: `generate` ignores n and seed for this name.
Dataset tic_tac_toe_endgames();

}  // namespace efc
