#include "surpmark/synth.hpp"

#include <cmath>
#include <string>

#include "surpmark/error.hpp"
#include "surpmark/markov.hpp"

namespace surpmark {

using nlohmann::json;

namespace {

State draw(const double* cdf, int k, double u) noexcept {
  for (int i = 0; i + 1 < k; ++i) {
    if (u < cdf[i]) return i;
  }
  // Rounding in the cumulative sum must never select a zero-probability tail state.
  int last = k - 1;
  while (last > 0 && cdf[last] == cdf[last - 1]) --last;
  return last;
}

}  // namespace

void ChainSpec::validate() const {
  if (!is_row_stochastic(matrix)) throw Error(Errc::InvalidSpec, "chain matrix is not row-stochastic");
  if (init) {
    if (init->size() != matrix.rows() || (init->array() < 0.0).any() ||
        std::abs(init->sum() - 1.0) > 1e-9) {
      throw Error(Errc::InvalidSpec, "init must be a probability vector over the chain's states");
    }
  } else if (closed_class_count(matrix) != 1) {
    throw Error(Errc::InvalidSpec, "stationary init requires a single closed class");
  }
}

Eigen::VectorXd ChainSpec::initial_distribution() const {
  validate();
  return init ? *init : stationary_distribution(matrix);
}

void EmissionSpec::validate() const {
  chain.validate();
  if (mean.size() != chain.k() || stddev.size() != chain.k()) {
    throw Error(Errc::InvalidSpec, "emission mean/stddev must have one entry per hidden state");
  }
  if (!mean.allFinite() || !stddev.allFinite() || (stddev.array() < 0.0).any()) {
    throw Error(Errc::InvalidSpec, "emission parameters must be finite with stddev >= 0");
  }
}

ChainSampler::ChainSampler(const ChainSpec& spec) : k_(spec.k()) {
  const Eigen::VectorXd init = spec.initial_distribution();
  const auto k = static_cast<std::size_t>(k_);
  init_cdf_.resize(k);
  row_cdf_.resize(k * k);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) init_cdf_[i] = acc += init(static_cast<Eigen::Index>(i));
  for (std::size_t i = 0; i < k; ++i) {
    acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      row_cdf_[i * k + j] = acc += spec.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
}

State ChainSampler::initial(Xoshiro256& rng) const noexcept {
  return draw(init_cdf_.data(), k_, rng.uniform());
}

State ChainSampler::next(State current, Xoshiro256& rng) const noexcept {
  return draw(row_cdf_.data() + static_cast<std::size_t>(current) * static_cast<std::size_t>(k_), k_,
              rng.uniform());
}

StateSequence ChainSampler::sample(std::size_t length, Xoshiro256& rng) const {
  if (length < 1) throw Error(Errc::InvalidSpec, "chain length must be at least 1");
  StateSequence states(length);
  states[0] = initial(rng);
  for (std::size_t t = 1; t < length; ++t) states[t] = next(states[t - 1], rng);
  return states;
}

StateSequence sample_chain(const ChainSpec& spec, std::size_t length, Xoshiro256& rng) {
  return ChainSampler(spec).sample(length, rng);
}

StateSequence sample_chain(const ChainSpec& spec, std::size_t length, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  return sample_chain(spec, length, rng);
}

EmissionSample sample_emissions(const EmissionSpec& spec, std::size_t length, Xoshiro256& rng) {
  spec.validate();
  EmissionSample out;
  out.hidden = sample_chain(spec.chain, length, rng);
  out.values.resize(length);
  for (std::size_t t = 0; t < length; ++t) {
    const auto h = static_cast<Eigen::Index>(out.hidden[t]);
    out.values[t] = spec.stddev(h) > 0.0 ? spec.mean(h) + spec.stddev(h) * rng.normal() : spec.mean(h);
  }
  return out;
}

std::vector<double> sample_surprisals(const EmissionSpec& spec, std::size_t length,
                                      std::uint64_t seed) {
  Xoshiro256 rng(seed);
  return sample_emissions(spec, length, rng).values;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw Error(Errc::InvalidSpec, "matrix must be a non-empty array");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto cols = rows[0].is_array() ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(n, cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(Errc::InvalidSpec, "matrix rows must be equal-length arrays");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      const json& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw Error(Errc::InvalidSpec, "matrix entries must be numbers");
      m(i, j) = v.get<double>();
    }
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& values) {
  if (!values.is_array()) throw Error(Errc::InvalidSpec, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].is_number()) throw Error(Errc::InvalidSpec, "expected an array of numbers");
    v(static_cast<Eigen::Index>(i)) = values[i].get<double>();
  }
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ChainSpec chain_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("matrix")) {
    throw Error(Errc::InvalidSpec, "chain spec needs a 'matrix'");
  }
  ChainSpec spec;
  spec.matrix = matrix_from_json(doc.at("matrix"));
  if (const auto it = doc.find("init"); it != doc.end() && !it->is_null()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "stationary") {
        throw Error(Errc::InvalidSpec, "init must be \"stationary\" or a probability vector");
      }
    } else {
      spec.init = vector_from_json(*it);
    }
  }
  spec.validate();
  return spec;
}

EmissionSpec emission_from_json(const json& doc) {
  EmissionSpec spec;
  spec.chain = chain_from_json(doc);
  const auto it = doc.find("emission");
  if (it == doc.end() || !it->is_object() || !it->contains("mean") || !it->contains("stddev")) {
    throw Error(Errc::InvalidSpec, "emission spec needs 'emission': {'mean', 'stddev'}");
  }
  spec.mean = vector_from_json(it->at("mean"));
  spec.stddev = vector_from_json(it->at("stddev"));
  spec.validate();
  return spec;
}

json to_json(const ChainSpec& spec) {
  json out = {{"matrix", matrix_to_json(spec.matrix)}};
  out["init"] = spec.init ? vector_to_json(*spec.init) : json("stationary");
  return out;
}

json to_json(const EmissionSpec& spec) {
  json out = to_json(spec.chain);
  out["emission"] = {{"mean", vector_to_json(spec.mean)}, {"stddev", vector_to_json(spec.stddev)}};
  return out;
}

}  // namespace surpmark
