#include "surpmark/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "surpmark/error.hpp"

namespace surpmark {

namespace {

void require_finite(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(Errc::NonFiniteValue, "value at index " + std::to_string(i) + " is not finite");
    }
  }
}

// Weighted prefix sums over the distinct sorted values, shifted by the mean
// to limit cancellation in the SSE formula.
struct ClusterCost {
  std::vector<double> w, s1, s2;
  double shift = 0.0;

  double operator()(std::size_t first, std::size_t last) const noexcept {
    const double weight = w[last + 1] - w[first];
    const double sum = s1[last + 1] - s1[first];
    const double sq = s2[last + 1] - s2[first];
    return std::max(0.0, sq - sum * sum / weight);
  }

  double mean(std::size_t first, std::size_t last) const noexcept {
    return (s1[last + 1] - s1[first]) / (w[last + 1] - w[first]) + shift;
  }
};

// One DP layer: cur[j] = min_{lo_i <= i <= j} prev[i-1] + cost(i, j), where i
// is the first index of the last cluster. Split points are monotone in j, so
// each layer is solved by divide and conquer in O(m log m).
void solve_layer(const ClusterCost& cost, const std::vector<double>& prev, std::vector<double>& cur,
                 std::vector<std::int32_t>& split, std::size_t layer, std::size_t lo, std::size_t hi,
                 std::size_t opt_lo, std::size_t opt_hi) {
  if (lo > hi) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  const std::size_t first = std::max(opt_lo, layer);
  const std::size_t last = std::min(mid, opt_hi);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = first;
  for (std::size_t i = first; i <= last; ++i) {
    const double value = prev[i - 1] + cost(i, mid);
    if (value < best) {
      best = value;
      best_i = i;
    }
  }
  cur[mid] = best;
  split[mid] = static_cast<std::int32_t>(best_i);
  if (mid > lo) solve_layer(cost, prev, cur, split, layer, lo, mid - 1, opt_lo, best_i);
  solve_layer(cost, prev, cur, split, layer, mid + 1, hi, best_i, opt_hi);
}

}  // namespace

State Quantizer::state_of(double value) const noexcept {
  const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), value);
  return static_cast<State>(it - boundaries.begin());
}

void Quantizer::validate() const {
  if (centroids.empty()) throw Error(Errc::Corrupt, "quantizer has no centroids");
  if (boundaries.size() + 1 != centroids.size()) {
    throw Error(Errc::Corrupt, "quantizer needs k-1 boundaries for k centroids");
  }
  for (double c : centroids) {
    if (!std::isfinite(c)) throw Error(Errc::Corrupt, "non-finite centroid");
  }
  for (std::size_t i = 0; i + 1 < centroids.size(); ++i) {
    if (!(centroids[i] < centroids[i + 1])) {
      throw Error(Errc::Corrupt, "centroids not strictly ascending");
    }
    if (boundaries[i] != 0.5 * (centroids[i] + centroids[i + 1])) {
      throw Error(Errc::Corrupt, "boundary " + std::to_string(i) + " is not a centroid midpoint");
    }
  }
}

Quantizer fit_quantizer(std::span<const double> values, int k) {
  if (values.empty()) throw Error(Errc::EmptyInput, "cannot fit a quantizer on no values");
  if (k < 1) throw Error(Errc::InvalidSpec, "k must be at least 1");
  require_finite(values);

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct;
  std::vector<double> weight;
  for (double v : sorted) {
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      weight.push_back(1.0);
    } else {
      weight.back() += 1.0;
    }
  }
  const std::size_t m = distinct.size();
  const auto clusters = static_cast<std::size_t>(k);
  if (m < clusters) {
    throw Error(Errc::TooFewDistinctValues,
                "k=" + std::to_string(k) + " but only " + std::to_string(m) + " distinct values");
  }

  ClusterCost cost;
  cost.shift = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  cost.w.assign(m + 1, 0.0);
  cost.s1.assign(m + 1, 0.0);
  cost.s2.assign(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = distinct[i] - cost.shift;
    cost.w[i + 1] = cost.w[i] + weight[i];
    cost.s1[i + 1] = cost.s1[i] + weight[i] * x;
    cost.s2[i + 1] = cost.s2[i] + weight[i] * x * x;
  }

  std::vector<double> prev(m), cur(m);
  for (std::size_t j = 0; j < m; ++j) prev[j] = cost(0, j);
  std::vector<std::vector<std::int32_t>> split(clusters);
  for (std::size_t layer = 1; layer < clusters; ++layer) {
    split[layer].assign(m, 0);
    std::fill(cur.begin(), cur.end(), std::numeric_limits<double>::infinity());
    solve_layer(cost, prev, cur, split[layer], layer, layer, m - 1, layer, m - 1);
    std::swap(prev, cur);
  }

  // Backtrack cluster extents from the last distinct value.
  std::vector<std::pair<std::size_t, std::size_t>> extent(clusters);
  std::size_t last = m - 1;
  for (std::size_t layer = clusters - 1; layer >= 1; --layer) {
    const auto first = static_cast<std::size_t>(split[layer][last]);
    extent[layer] = {first, last};
    last = first - 1;
  }
  extent[0] = {0, last};

  Quantizer q;
  q.fitted_on = values.size();
  q.centroids.reserve(clusters);
  for (const auto& [first, end] : extent) q.centroids.push_back(cost.mean(first, end));
  for (std::size_t i = 0; i + 1 < clusters; ++i) {
    q.boundaries.push_back(0.5 * (q.centroids[i] + q.centroids[i + 1]));
  }
  return q;
}

StateSequence quantize(const Quantizer& q, std::span<const double> values) {
  require_finite(values);
  StateSequence states(values.size());
  std::transform(values.begin(), values.end(), states.begin(),
                 [&q](double v) { return q.state_of(v); });
  return states;
}

double quantization_sse(const Quantizer& q, std::span<const double> values) {
  double sse = 0.0;
  for (double v : values) {
    const double d = v - q.centroids[static_cast<std::size_t>(q.state_of(v))];
    sse += d * d;
  }
  return sse;
}

int default_bins(std::uint64_t total_reference_transitions, double scale, int k_min, int k_max) {
  const double raw = scale * std::pow(static_cast<double>(total_reference_transitions), 0.2);
  const auto k = static_cast<int>(std::lround(raw));
  return std::clamp(k, k_min, k_max);
}

}  // namespace surpmark
