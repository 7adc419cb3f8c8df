#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "surpmark/error.hpp"
#include "surpmark/types.hpp"

namespace surpmark {

/// Raw first-order transition counts over a k-state alphabet.
///
/// Counts accumulate per sequence and never span sequence boundaries; the
/// type is a commutative monoid under operator+ with the zero matrix as
/// identity, so per-document counts can be merged in any order.
class TransitionCounts {
 public:
  TransitionCounts() = default;
  explicit TransitionCounts(int k);

  /// Validates nonnegativity and squareness. Throws Corrupt.
  static TransitionCounts from_matrix(const CountMatrix& counts);

  int k() const noexcept { return static_cast<int>(counts_.rows()); }
  const CountMatrix& counts() const noexcept { return counts_; }
  const CountVector& source_visits() const noexcept { return visits_; }
  std::int64_t num_transitions() const noexcept { return total_; }
  std::int64_t operator()(int from, int to) const { return counts_(from, to); }

  void add_transition(State from, State to, std::int64_t times = 1);

  /// Adds the adjacent pairs of one sequence. Throws StateOutOfRange.
  void add_sequence(std::span<const State> states);

  TransitionCounts& operator+=(const TransitionCounts& other);
  bool operator==(const TransitionCounts& other) const {
    return k() == other.k() && counts_ == other.counts_;
  }

 private:
  CountMatrix counts_;
  CountVector visits_;
  std::int64_t total_ = 0;
};

TransitionCounts count_transitions(std::span<const State> states, int k);

/// Elementwise sum. Throws DimensionMismatch.
TransitionCounts merge_counts(const TransitionCounts& a, const TransitionCounts& b);

inline TransitionCounts operator+(TransitionCounts a, const TransitionCounts& b) {
  return merge_counts(a, b);
}

/// Row-normalised transition estimate with occupancy weights.
struct TransitionModel {
  Eigen::MatrixXd matrix;         // rows with zero visits are all-zero and flagged undefined
  Eigen::VectorXd occupancy;      // empirical source-state frequencies
  std::vector<bool> defined;      // defined[i] iff state i was ever a source
  std::optional<Eigen::VectorXd> stationary;

  int k() const noexcept { return static_cast<int>(matrix.rows()); }
};

/// Plug-in estimate M(j|i) = counts(i,j) / visits(i), no smoothing unless
/// `smoothing` > 0 (diagnostic only: adds the pseudo-count to every cell and
/// defines every row). Throws NoTransitions.
TransitionModel to_model(const TransitionCounts& counts, double smoothing = 0.0);

/// Attaches the stationary distribution when the estimated chain has a single
/// closed class; leaves it empty otherwise.
TransitionModel with_stationary(TransitionModel model);

/// Reachability-based class structure of a nonnegative matrix.
template <typename Derived>
int closed_class_count(const Eigen::MatrixBase<Derived>& m) {
  const Eigen::Index k = m.rows();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> reach(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) reach(i, j) = (i == j) || m(i, j) > 0;
  // Warshall closure; k is at most a few hundred here.
  for (Eigen::Index via = 0; via < k; ++via)
    for (Eigen::Index i = 0; i < k; ++i)
      if (reach(i, via))
        for (Eigen::Index j = 0; j < k; ++j) reach(i, j) = reach(i, j) || reach(via, j);

  // A state is recurrent iff everything it reaches reaches it back; closed
  // classes are the equivalence classes of recurrent states.
  std::vector<Eigen::Index> representatives;
  for (Eigen::Index i = 0; i < k; ++i) {
    bool closed = true;
    for (Eigen::Index j = 0; j < k && closed; ++j) closed = !reach(i, j) || reach(j, i);
    if (!closed) continue;
    bool seen = false;
    for (Eigen::Index r : representatives) seen = seen || reach(r, i);
    if (!seen) representatives.push_back(i);
  }
  return static_cast<int>(representatives.size());
}

template <typename Derived>
bool is_row_stochastic(const Eigen::MatrixBase<Derived>& m, double tolerance = 1e-9) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  using Scalar = typename Derived::Scalar;
  // Single-precision matrices cannot meet a double-precision tolerance.
  tolerance = std::max(tolerance, 64.0 * static_cast<double>(std::numeric_limits<Scalar>::epsilon()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = static_cast<double>(m(i, j));
      if (!(v >= 0.0) || !std::isfinite(v)) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance) return false;
  }
  return true;
}

/// Unique stationary distribution of a row-stochastic matrix, from the
/// nonsingular system (I - M + 11^T)^T pi = 1. Transient states receive zero
/// mass. Throws NotStochastic, or Reducible when several closed classes exist.
template <typename Derived>
VectorX<typename Derived::Scalar> stationary_distribution(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (!is_row_stochastic(m)) throw Error(Errc::NotStochastic, "matrix is not row-stochastic");
  if (closed_class_count(m) != 1) {
    throw Error(Errc::Reducible, "chain has more than one closed class");
  }
  const Eigen::Index k = m.rows();
  const MatrixX<Scalar> system =
      (MatrixX<Scalar>::Identity(k, k) - m + MatrixX<Scalar>::Ones(k, k)).transpose();
  VectorX<Scalar> pi = system.fullPivLu().solve(VectorX<Scalar>::Ones(k));
  pi = pi.cwiseMax(Scalar(0));
  return pi / pi.sum();
}

/// Markov chain on ordered pairs (s, a), pair index s*k + a. From (s, a) the
/// chain moves to (a, a') with probability M(a'|a); its stationary law is
/// pi(s) M(a|s).
template <typename Scalar>
struct BasicPairChain {
  int k = 0;
  MatrixX<Scalar> matrix;
  VectorX<Scalar> stationary_pairs;

  static constexpr Eigen::Index index(int s, int a, int k) noexcept {
    return static_cast<Eigen::Index>(s) * k + a;
  }
};
using PairChain = BasicPairChain<double>;

template <typename Derived, typename PiDerived>
BasicPairChain<typename Derived::Scalar> pair_chain(const Eigen::MatrixBase<Derived>& m,
                                                    const Eigen::MatrixBase<PiDerived>& pi) {
  using Scalar = typename Derived::Scalar;
  const int k = static_cast<int>(m.rows());
  if (m.cols() != k || pi.size() != k) {
    throw Error(Errc::DimensionMismatch, "pair chain needs a k x k matrix and length-k weights");
  }
  BasicPairChain<Scalar> chain;
  chain.k = k;
  const Eigen::Index kk = static_cast<Eigen::Index>(k) * k;
  chain.matrix = MatrixX<Scalar>::Zero(kk, kk);
  chain.stationary_pairs = VectorX<Scalar>::Zero(kk);
  for (int s = 0; s < k; ++s) {
    for (int a = 0; a < k; ++a) {
      const Eigen::Index row = BasicPairChain<Scalar>::index(s, a, k);
      chain.stationary_pairs(row) = pi(s) * m(s, a);
      for (int next = 0; next < k; ++next) {
        chain.matrix(row, BasicPairChain<Scalar>::index(a, next, k)) = m(a, next);
      }
    }
  }
  return chain;
}

/// Pair chain of a model whose stationary distribution is known (computed on
/// demand otherwise). Propagates stationary_distribution errors.
PairChain pair_chain(const TransitionModel& model);

}  // namespace surpmark
