#include "surpmark/markov.hpp"

#include <string>

namespace surpmark {

TransitionCounts::TransitionCounts(int k)
    : counts_(CountMatrix::Zero(k, k)), visits_(CountVector::Zero(k)) {
  if (k < 1) throw Error(Errc::InvalidSpec, "state count must be positive");
}

TransitionCounts TransitionCounts::from_matrix(const CountMatrix& counts) {
  if (counts.rows() != counts.cols() || counts.rows() == 0) {
    throw Error(Errc::Corrupt, "transition counts must be a non-empty square matrix");
  }
  if ((counts.array() < 0).any()) throw Error(Errc::Corrupt, "negative transition count");
  TransitionCounts out(static_cast<int>(counts.rows()));
  out.counts_ = counts;
  out.visits_ = counts.rowwise().sum();
  out.total_ = out.visits_.sum();
  return out;
}

void TransitionCounts::add_transition(State from, State to, std::int64_t times) {
  counts_(from, to) += times;
  visits_(from) += times;
  total_ += times;
}

void TransitionCounts::add_sequence(std::span<const State> states) {
  const int n_states = k();
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] < 0 || states[i] >= n_states) {
      throw Error(Errc::StateOutOfRange, "state " + std::to_string(states[i]) + " at index " +
                                             std::to_string(i) + " outside [0, " +
                                             std::to_string(n_states) + ")");
    }
  }
  for (std::size_t i = 1; i < states.size(); ++i) add_transition(states[i - 1], states[i]);
}

TransitionCounts& TransitionCounts::operator+=(const TransitionCounts& other) {
  if (other.k() != k()) {
    throw Error(Errc::DimensionMismatch, "cannot merge counts over " + std::to_string(k()) +
                                             " and " + std::to_string(other.k()) + " states");
  }
  counts_ += other.counts_;
  visits_ += other.visits_;
  total_ += other.total_;
  return *this;
}

TransitionCounts count_transitions(std::span<const State> states, int k) {
  TransitionCounts counts(k);
  counts.add_sequence(states);
  return counts;
}

TransitionCounts merge_counts(const TransitionCounts& a, const TransitionCounts& b) {
  TransitionCounts out = a;
  out += b;
  return out;
}

TransitionModel to_model(const TransitionCounts& counts, double smoothing) {
  if (counts.num_transitions() < 1) throw Error(Errc::NoTransitions, "no transitions to normalise");
  const int k = counts.k();
  TransitionModel model;
  model.matrix = Eigen::MatrixXd::Zero(k, k);
  model.defined.assign(static_cast<std::size_t>(k), false);
  const Eigen::MatrixXd raw = counts.counts().cast<double>();
  const Eigen::VectorXd visits = counts.source_visits().cast<double>();
  for (int i = 0; i < k; ++i) {
    if (smoothing > 0.0) {
      model.matrix.row(i) = (raw.row(i).array() + smoothing) / (visits(i) + smoothing * k);
      model.defined[static_cast<std::size_t>(i)] = true;
    } else if (visits(i) > 0) {
      model.matrix.row(i) = raw.row(i) / visits(i);
      model.defined[static_cast<std::size_t>(i)] = true;
    }
  }
  model.occupancy = visits / static_cast<double>(counts.num_transitions());
  return model;
}

TransitionModel with_stationary(TransitionModel model) {
  try {
    model.stationary = stationary_distribution(model.matrix);
  } catch (const Error&) {
    model.stationary.reset();
  }
  return model;
}

PairChain pair_chain(const TransitionModel& model) {
  if (model.stationary) return pair_chain(model.matrix, *model.stationary);
  const Eigen::VectorXd pi = stationary_distribution(model.matrix);
  return pair_chain(model.matrix, pi);
}

}  // namespace surpmark
