#include "surpmark/divergence.hpp"

#include <cmath>
#include <string>

#include "surpmark/error.hpp"

namespace surpmark {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(Errc::NonFiniteValue, "alpha must be positive and finite");
  }
}

// Sum over cells of p * log((p / p_row) / (mix / mix_row)); 0 log 0 = 0.
double conditional_kl(const Eigen::MatrixXd& p, const Eigen::VectorXd& p_row,
                      const Eigen::MatrixXd& mix, const Eigen::VectorXd& mix_row) {
  double kl = 0.0;
  for (Eigen::Index s = 0; s < p.rows(); ++s) {
    if (p_row(s) <= 0.0) continue;
    for (Eigen::Index a = 0; a < p.cols(); ++a) {
      const double v = p(s, a);
      if (v <= 0.0) continue;
      kl += v * std::log((v * mix_row(s)) / (p_row(s) * mix(s, a)));
    }
  }
  return kl;
}

// Rows of a model that ever saw a source visit; accept both modes' inputs.
bool row_defined(const TransitionModel& model, Eigen::Index s) {
  if (model.defined.empty()) return true;
  return model.defined[static_cast<std::size_t>(s)];
}

}  // namespace

std::string_view to_string(GjsMode mode) noexcept {
  return mode == GjsMode::Joint ? "joint" : "constant-mix";
}

std::string_view to_string(AlphaPolicy policy) noexcept {
  return policy == AlphaPolicy::PerSide ? "per-side" : "single";
}

std::optional<GjsMode> parse_gjs_mode(std::string_view text) {
  if (text == "joint") return GjsMode::Joint;
  if (text == "constant-mix") return GjsMode::ConstantMix;
  return std::nullopt;
}

std::optional<AlphaPolicy> parse_alpha_policy(std::string_view text) {
  if (text == "per-side") return AlphaPolicy::PerSide;
  if (text == "single") return AlphaPolicy::Single;
  return std::nullopt;
}

JointPairDistribution JointPairDistribution::from_counts(const TransitionCounts& counts) {
  if (counts.num_transitions() < 1) throw Error(Errc::NoTransitions, "empty transition counts");
  return {counts.counts().cast<double>() / static_cast<double>(counts.num_transitions())};
}

JointPairDistribution JointPairDistribution::from_model(const Eigen::MatrixXd& matrix,
                                                        const Eigen::VectorXd& weights) {
  if (matrix.rows() != matrix.cols() || weights.size() != matrix.rows()) {
    throw Error(Errc::DimensionMismatch, "model and weights disagree on k");
  }
  return {weights.asDiagonal() * matrix};
}

double binary_entropy(double p) noexcept {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

GjsBreakdown gjs_joint(const JointPairDistribution& first, const JointPairDistribution& second,
                       double alpha) {
  if (first.k() != second.k() || first.probs.cols() != second.probs.cols()) {
    throw Error(Errc::DimensionMismatch, "GJS arguments have " + std::to_string(first.k()) +
                                             " and " + std::to_string(second.k()) + " states");
  }
  require_alpha(alpha);
  const double w = alpha / (1.0 + alpha);
  const Eigen::MatrixXd mix = w * first.probs + (1.0 - w) * second.probs;
  const Eigen::VectorXd first_row = first.probs.rowwise().sum();
  const Eigen::VectorXd second_row = second.probs.rowwise().sum();
  const Eigen::VectorXd mix_row = mix.rowwise().sum();

  GjsBreakdown out;
  out.alpha = alpha;
  out.mode = GjsMode::Joint;
  out.kl_first = std::max(0.0, conditional_kl(first.probs, first_row, mix, mix_row));
  out.kl_second = std::max(0.0, conditional_kl(second.probs, second_row, mix, mix_row));
  out.total = w * out.kl_first + (1.0 - w) * out.kl_second;
  if (!std::isfinite(out.total)) throw Error(Errc::NonFiniteValue, "GJS evaluated to non-finite");
  return out;
}

GjsBreakdown gjs_constant_mix(const TransitionModel& first, const TransitionModel& second,
                              const Eigen::VectorXd& weights, double alpha) {
  const int k = first.k();
  if (second.k() != k || weights.size() != k) {
    throw Error(Errc::DimensionMismatch, "constant-mix GJS arguments disagree on k");
  }
  require_alpha(alpha);
  if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-9) {
    throw Error(Errc::InvalidSpec, "row weights must form a probability vector");
  }
  const double w = alpha / (1.0 + alpha);
  GjsBreakdown out;
  out.alpha = alpha;
  out.mode = GjsMode::ConstantMix;
  for (Eigen::Index s = 0; s < k; ++s) {
    if (weights(s) <= 0.0 || !row_defined(first, s) || !row_defined(second, s)) continue;
    double kl_a = 0.0;
    double kl_b = 0.0;
    for (Eigen::Index a = 0; a < k; ++a) {
      const double pa = first.matrix(s, a);
      const double pb = second.matrix(s, a);
      const double mix = w * pa + (1.0 - w) * pb;
      if (pa > 0.0) kl_a += pa * std::log(pa / mix);
      if (pb > 0.0) kl_b += pb * std::log(pb / mix);
    }
    out.kl_first += weights(s) * std::max(0.0, kl_a);
    out.kl_second += weights(s) * std::max(0.0, kl_b);
  }
  out.total = w * out.kl_first + (1.0 - w) * out.kl_second;
  return out;
}

DeltaBreakdown delta_gjs_breakdown(const TransitionCounts& machine, const TransitionCounts& human,
                                   const TransitionCounts& test, const DeltaOptions& options) {
  if (machine.k() != test.k() || human.k() != test.k()) {
    throw Error(Errc::DimensionMismatch, "references and test disagree on k");
  }
  if (test.num_transitions() < 1) throw Error(Errc::NoTransitions, "test has no transitions");
  if (machine.num_transitions() < 1) {
    throw Error(Errc::NoTransitions, "machine reference has no transitions");
  }
  if (human.num_transitions() < 1) throw Error(Errc::NoTransitions, "human reference has no transitions");

  const auto n = static_cast<double>(test.num_transitions());
  double alpha_machine = static_cast<double>(machine.num_transitions()) / n;
  double alpha_human = static_cast<double>(human.num_transitions()) / n;
  if (options.alpha == AlphaPolicy::Single) {
    alpha_machine = alpha_human = 0.5 * (alpha_machine + alpha_human);
  }

  DeltaBreakdown out;
  if (options.mode == GjsMode::Joint) {
    const auto t = JointPairDistribution::from_counts(test);
    out.to_machine = gjs_joint(JointPairDistribution::from_counts(machine), t, alpha_machine);
    out.to_human = gjs_joint(JointPairDistribution::from_counts(human), t, alpha_human);
  } else {
    const TransitionModel t = to_model(test);
    const auto side = [&](const TransitionCounts& ref, double alpha) {
      const Eigen::VectorXd weights = to_model(merge_counts(ref, test)).occupancy;
      return gjs_constant_mix(to_model(ref), t, weights, alpha);
    };
    out.to_machine = side(machine, alpha_machine);
    out.to_human = side(human, alpha_human);
  }
  out.score = out.to_machine.llr_scaled() - out.to_human.llr_scaled();
  return out;
}

double conditional_entropy(const TransitionCounts& counts) {
  if (counts.num_transitions() < 1) throw Error(Errc::NoTransitions, "no transitions");
  const auto total = static_cast<double>(counts.num_transitions());
  double h = 0.0;
  for (int s = 0; s < counts.k(); ++s) {
    const auto visits = static_cast<double>(counts.source_visits()(s));
    for (int a = 0; a < counts.k(); ++a) {
      const auto c = static_cast<double>(counts(s, a));
      if (c > 0.0) h -= (c / total) * std::log(c / visits);
    }
  }
  return h;
}

double entropy_form_delta(std::span<const State> machine, std::span<const State> human,
                          std::span<const State> test, int k) {
  if (machine.size() < 2 || human.size() < 2 || test.size() < 2) {
    throw Error(Errc::SequenceTooShort, "every sequence needs at least two states");
  }
  const TransitionCounts p = count_transitions(machine, k);
  const TransitionCounts q = count_transitions(human, k);
  const TransitionCounts t = count_transitions(test, k);
  const auto n = static_cast<double>(t.num_transitions());

  const auto side = [&](const TransitionCounts& ref) {
    const auto big_n = static_cast<double>(ref.num_transitions());
    const TransitionCounts pooled = merge_counts(ref, t);
    return (big_n + n) / n * conditional_entropy(pooled) - big_n / n * conditional_entropy(ref);
  };
  return side(p) - side(q);
}

}  // namespace surpmark
