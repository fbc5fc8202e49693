#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "core/forest.hpp"

namespace kardashev::shap {

// Subset enumeration visits 2^p coalitions; beyond this it is refused.
inline constexpr std::size_t kMaxExactFeatures = 20;

struct Attribution {
  double base_value = 0.0;  // v(empty set)
  std::vector<double> phi;  // one per model feature
  double prediction = 0.0;
};

struct RankedFeature {
  std::string name;
  double mean_abs = 0.0;
  int rank = 0;  // 1-based
};

using SummaryRanking = std::vector<RankedFeature>;

// Expected tree output when the features in `known` (bit i set = feature i
// known) take x's values and the rest are averaged over the training covers.
double tree_expectation(const forest::Tree& tree, std::span<const double> x,
                        std::uint64_t known);

// v(S): mean of tree_expectation over the forest.
double coalition_value(const forest::ForestModel& model, std::span<const double> x,
                       std::uint64_t known);

// Shapley values by explicit enumeration of every coalition. Throws
// CapabilityError when the model has more than kMaxExactFeatures features.
Attribution shapley_exact(const forest::ForestModel& model, std::span<const double> x);

// The same values computed by the polynomial-time path algorithm over each
// tree's decision paths. Used for dataset-wide summaries.
Attribution shapley_tree_path(const forest::ForestModel& model, std::span<const double> x);

// Mean |phi| per feature over the rows of `data`, ordered by decreasing value
// then by name. `exact` selects subset enumeration (CapabilityError beyond
// kMaxExactFeatures) instead of the path algorithm.
SummaryRanking summarize(const forest::ForestModel& model, const forest::FeatureMatrix& data,
                         int n_threads = 0, bool exact = false);

// CSV with header `feature,mean_abs_shap,rank`. Values are in the target's
// units (EJ per country-year for the energy model). A non-empty
// `header_comment` is written first as a "# ..." line.
void write_summary_csv(std::ostream& out, const SummaryRanking& ranking,
                       const std::string& header_comment = "");

}  // namespace kardashev::shap
