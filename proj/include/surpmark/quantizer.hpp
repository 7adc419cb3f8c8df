#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "surpmark/types.hpp"

namespace surpmark {

/// Shared 1-D partition of the surprisal axis into k states.
///
/// Bin i covers [boundaries[i-1], boundaries[i]) with open outer ends, so a
/// value exactly on a boundary falls into the upper bin and values outside the
/// training range clamp to the extreme states. Each boundary is the midpoint
/// of its neighbouring centroids, which makes the rule equivalent to
/// nearest-centroid assignment.
struct Quantizer {
  std::vector<double> boundaries;  // k-1, strictly ascending
  std::vector<double> centroids;   // k, strictly ascending
  std::uint64_t fitted_on = 0;

  int k() const noexcept { return static_cast<int>(centroids.size()); }
  State state_of(double value) const noexcept;

  /// Throws Corrupt when the ordering or midpoint invariants do not hold.
  void validate() const;

  bool operator==(const Quantizer&) const = default;
};

/// Globally optimal 1-D k-means (minimum within-cluster SSE), solved exactly by
/// dynamic programming over the sorted distinct values with
/// divide-and-conquer row minimisation. Deterministic; no initialisation.
///
/// Throws EmptyInput, NonFiniteValue (with index) or TooFewDistinctValues.
Quantizer fit_quantizer(std::span<const double> values, int k);

/// Maps each value to its state; length preserved. Throws NonFiniteValue.
StateSequence quantize(const Quantizer& q, std::span<const double> values);

/// Within-cluster sum of squares of `values` under q's assignment.
double quantization_sse(const Quantizer& q, std::span<const double> values);

/// Default bin count clamp(round(scale * N^(1/5)), k_min, k_max) from the
/// bias/variance balance k* = Theta(N^(1/5)).
int default_bins(std::uint64_t total_reference_transitions, double scale = 0.75, int k_min = 2,
                 int k_max = 12);

}  // namespace surpmark
