#pragma once

#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "surpmark/markov.hpp"
#include "surpmark/types.hpp"

namespace surpmark {

/// How two Markov summaries are mixed inside GJS.
///  - Joint: mixture formed on the pair distributions occupancy(s)*M(a|s), so
///    each row is weighted by its own empirical occupancy. This is the form in
///    which the score equals the generalized log-likelihood ratio exactly.
///  - ConstantMix: rows mixed with the fixed weight alpha/(1+alpha) and the
///    per-row KL terms aggregated with one supplied weight vector.
enum class GjsMode { Joint, ConstantMix };

/// Reference-to-test weight: one alpha per reference side (N_side / n), or a
/// single alpha from the mean reference size.
enum class AlphaPolicy { PerSide, Single };

// "joint" | "constant-mix" and "per-side" | "single".
std::string_view to_string(GjsMode mode) noexcept;
std::string_view to_string(AlphaPolicy policy) noexcept;
std::optional<GjsMode> parse_gjs_mode(std::string_view text);
std::optional<AlphaPolicy> parse_alpha_policy(std::string_view text);

/// Joint law of (source state, next state); entries sum to one.
struct JointPairDistribution {
  Eigen::MatrixXd probs;

  int k() const noexcept { return static_cast<int>(probs.rows()); }

  static JointPairDistribution from_counts(const TransitionCounts& counts);
  /// weights(s) * M(a|s); rows with zero weight are ignored.
  static JointPairDistribution from_model(const Eigen::MatrixXd& matrix,
                                          const Eigen::VectorXd& weights);
};

struct GjsBreakdown {
  double total = 0.0;      // (alpha/(1+alpha)) kl_first + (1/(1+alpha)) kl_second, nats
  double kl_first = 0.0;   // first argument to the mixture
  double kl_second = 0.0;  // second argument to the mixture
  double alpha = 1.0;
  GjsMode mode = GjsMode::Joint;

  /// alpha*kl_first + kl_second = (1+alpha)*total: the per-test-transition
  /// log-likelihood-ratio scale on which scores are reported.
  double llr_scaled() const noexcept { return alpha * kl_first + kl_second; }
};

/// Binary entropy in nats; the upper bound of GJS with weight alpha is
/// binary_entropy(alpha/(1+alpha)).
double binary_entropy(double p) noexcept;

/// Throws DimensionMismatch, NonFiniteValue (alpha <= 0 or non-finite).
GjsBreakdown gjs_joint(const JointPairDistribution& first, const JointPairDistribution& second,
                       double alpha);

/// Rows whose weight is zero, or that are undefined in either model, are
/// skipped. Throws DimensionMismatch, InvalidSpec (weights not a simplex).
GjsBreakdown gjs_constant_mix(const TransitionModel& first, const TransitionModel& second,
                              const Eigen::VectorXd& weights, double alpha);

struct DeltaOptions {
  GjsMode mode = GjsMode::Joint;
  AlphaPolicy alpha = AlphaPolicy::PerSide;
};

struct DeltaBreakdown {
  GjsBreakdown to_machine;  // GJS(M_P, M_T, alpha_P)
  GjsBreakdown to_human;    // GJS(M_Q, M_T, alpha_Q)
  double score = 0.0;       // to_machine.llr_scaled() - to_human.llr_scaled()
};

/// Delta GJS = GJS(P, T, alpha_P) - GJS(Q, T, alpha_Q). Negative values favour
/// the machine reference P, positive values the human reference Q.
/// Throws NoTransitions, DimensionMismatch.
DeltaBreakdown delta_gjs_breakdown(const TransitionCounts& machine, const TransitionCounts& human,
                                   const TransitionCounts& test, const DeltaOptions& options = {});

inline double delta_gjs(const TransitionCounts& machine, const TransitionCounts& human,
                        const TransitionCounts& test, const DeltaOptions& options = {}) {
  return delta_gjs_breakdown(machine, human, test, options).score;
}

/// Empirical conditional entropy per transition, nats. Throws NoTransitions.
double conditional_entropy(const TransitionCounts& counts);

/// The score written through empirical conditional entropies of the pooled
/// (reference + test) sequences; pooling never adds a cross-boundary
/// transition. Throws SequenceTooShort.
double entropy_form_delta(std::span<const State> machine, std::span<const State> human,
                          std::span<const State> test, int k);

}  // namespace surpmark
