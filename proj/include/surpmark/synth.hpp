#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "surpmark/rng.hpp"
#include "surpmark/types.hpp"

namespace surpmark {

/// Discrete first-order Markov source. An empty `init` means "start from the
/// stationary distribution", which requires a single closed class.
struct ChainSpec {
  Eigen::MatrixXd matrix;
  std::optional<Eigen::VectorXd> init;

  int k() const noexcept { return static_cast<int>(matrix.rows()); }

  /// Throws InvalidSpec.
  void validate() const;
  /// The explicit init vector, or the stationary distribution.
  Eigen::VectorXd initial_distribution() const;
};

/// Hidden chain whose state h emits Normal(mean[h], stddev[h]) pseudo-surprisals.
/// A zero stddev emits the mean exactly.
struct EmissionSpec {
  ChainSpec chain;
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  void validate() const;
};

/// Precomputed inverse-CDF tables for repeated sampling from one chain.
class ChainSampler {
 public:
  /// Throws InvalidSpec.
  explicit ChainSampler(const ChainSpec& spec);

  int k() const noexcept { return k_; }
  State initial(Xoshiro256& rng) const noexcept;
  State next(State current, Xoshiro256& rng) const noexcept;
  StateSequence sample(std::size_t length, Xoshiro256& rng) const;

 private:
  int k_ = 0;
  std::vector<double> init_cdf_;
  std::vector<double> row_cdf_;  // row-major k x k
};

/// Draws `length` states: the first from the initial distribution, the rest
/// by inverse-CDF on the current row. Deterministic for a fixed generator.
StateSequence sample_chain(const ChainSpec& spec, std::size_t length, Xoshiro256& rng);
StateSequence sample_chain(const ChainSpec& spec, std::size_t length, std::uint64_t seed);

struct EmissionSample {
  StateSequence hidden;
  std::vector<double> values;
};

EmissionSample sample_emissions(const EmissionSpec& spec, std::size_t length, Xoshiro256& rng);
std::vector<double> sample_surprisals(const EmissionSpec& spec, std::size_t length,
                                      std::uint64_t seed);

// JSON config: {"matrix": [[...]], "init": "stationary" | [...],
//               "emission": {"mean": [...], "stddev": [...]}}
ChainSpec chain_from_json(const nlohmann::json& doc);
EmissionSpec emission_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ChainSpec& spec);
nlohmann::json to_json(const EmissionSpec& spec);

/// Dense matrix <-> nested JSON arrays.
Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows);
Eigen::VectorXd vector_from_json(const nlohmann::json& values);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);

}  // namespace surpmark
