#pragma once

#include <span>
#include <vector>

#include "efc/construct.hpp"
#include "efc/data.hpp"
#include "efc/feature.hpp"
#include "efc/parallel.hpp"

namespace efc {

struct ScoredFeature {
  Feature feature;
  double mdl = 0;
};

/// log2 of n! / prod(k_i!) via lgamma.
double log2_multinomial(std::span<const int> counts);
/// log2 C(n, k) via lgamma.
double log2_binomial(double n, double k);

/// Compression gain in bits per instance of coding the labels given the
/// partition induced by `values` (one cell per distinct value).
double mdl_score(std::span<const int> values, std::span<const int> labels, int classes);
/// Same for a real-valued column; throws DataError unless every value is
/// integral (discretise continuous columns first).
double mdl_score(std::span<const double> values, std::span<const int> labels, int classes);

/// Discrete codes of a feature on ds: boolean, count and Cartesian values
/// as is, reals by equal-width binning with `bins` cells.
std::vector<int> discrete_column(const Feature& f, const Dataset& ds, int bins);

/// Scores on ds, drops features below min_score, sorts by descending score
/// then key.
std::vector<ScoredFeature> score_and_filter(const std::vector<Feature>& features, const Dataset& ds,
                                            double min_score = 0.0, int bins = 4,
                                            Execution exec = Execution::Parallel);

}  // namespace efc
