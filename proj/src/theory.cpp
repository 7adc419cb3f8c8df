#include "surpmark/theory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "surpmark/parallel.hpp"
#include "surpmark/quantizer.hpp"
#include "surpmark/rng.hpp"

namespace surpmark {

using nlohmann::json;

std::string_view to_string(Hypothesis h) noexcept { return h == Hypothesis::H0 ? "H0" : "H1"; }

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw Error(Errc::DimensionMismatch, "conditional matrices must both be k x k");
  }
}

void require_simplex(const Eigen::VectorXd& w, Eigen::Index k, const char* name) {
  if (w.size() != k) throw Error(Errc::DimensionMismatch, std::string(name) + " has the wrong length");
  if ((w.array() < 0.0).any() || std::abs(w.sum() - 1.0) > 1e-9) {
    throw Error(Errc::InvalidSpec, std::string(name) + " is not a probability vector");
  }
}

double log_ratio(double numerator, double denominator) {
  if (numerator <= 0.0) return kNegInf;
  return std::log(numerator / denominator);
}

// Per-pair-state function over the pair index s*k + a; zero-mass cells get 0.
Eigen::VectorXd pair_function(const Eigen::MatrixXd& iota) {
  const Eigen::Index k = iota.rows();
  Eigen::VectorXd f(k * k);
  for (Eigen::Index s = 0; s < k; ++s)
    for (Eigen::Index a = 0; a < k; ++a) {
      const double v = iota(s, a);
      f(s * k + a) = std::isfinite(v) ? v : 0.0;
    }
  return f;
}

double pair_variance(const Eigen::MatrixXd& m, const Eigen::VectorXd& pi, const Eigen::MatrixXd& iota) {
  const PairChain chain = pair_chain(m, pi);
  return asymptotic_variance(chain.matrix, chain.stationary_pairs, pair_function(iota));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool is_nonnegative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(Errc::Config, "config field '" + field + "': " + why);
}

template <typename T>
T number_field(const json& doc, const char* name, T fallback) {
  const auto it = doc.find(name);
  if (it == doc.end()) return fallback;
  if constexpr (std::is_floating_point_v<T>) {
    if (!it->is_number()) bad_field(name, "expected a number");
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!is_nonnegative_integer(*it)) bad_field(name, "expected a nonnegative integer");
  } else {
    if (!it->is_number_integer()) bad_field(name, "expected an integer");
  }
  return it->get<T>();
}

template <typename Parser>
auto spec_field(const json& doc, const char* name, Parser parse) {
  const auto it = doc.find(name);
  if (it == doc.end()) bad_field(name, "missing");
  try {
    return parse(*it);
  } catch (const Error& e) {
    bad_field(name, e.what());
  }
}

std::int64_t count_stream_transitions(const ChainSampler& sampler, std::int64_t transitions,
                                      Xoshiro256& rng, TransitionCounts& counts) {
  State prev = sampler.initial(rng);
  for (std::int64_t t = 0; t < transitions; ++t) {
    const State next = sampler.next(prev, rng);
    counts.add_transition(prev, next);
    prev = next;
  }
  return transitions;
}

}  // namespace

InfoDensities information_densities(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2,
                                    double alpha) {
  require_same_shape(m1, m2);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(Errc::InvalidSpec, "alpha must be positive");
  InfoDensities out{Eigen::MatrixXd::Zero(m1.rows(), m1.cols()),
                    Eigen::MatrixXd::Zero(m1.rows(), m1.cols()), alpha};
  for (Eigen::Index s = 0; s < m1.rows(); ++s)
    for (Eigen::Index a = 0; a < m1.cols(); ++a) {
      const double mix = (alpha * m1(s, a) + m2(s, a)) / (1.0 + alpha);
      if (mix <= 0.0) continue;
      out.iota1(s, a) = log_ratio(m1(s, a), mix);
      out.iota2(s, a) = log_ratio(m2(s, a), mix);
    }
  return out;
}

InfoDensities joint_information_densities(const Eigen::MatrixXd& m1, const Eigen::VectorXd& pi1,
                                          const Eigen::MatrixXd& m2, const Eigen::VectorXd& pi2,
                                          double alpha) {
  require_same_shape(m1, m2);
  if (pi1.size() != m1.rows() || pi2.size() != m1.rows()) {
    throw Error(Errc::DimensionMismatch, "weights must have one entry per state");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(Errc::InvalidSpec, "alpha must be positive");
  InfoDensities out{Eigen::MatrixXd::Zero(m1.rows(), m1.cols()),
                    Eigen::MatrixXd::Zero(m1.rows(), m1.cols()), alpha};
  for (Eigen::Index s = 0; s < m1.rows(); ++s) {
    const double w1 = alpha * pi1(s);
    const double w2 = pi2(s);
    if (w1 + w2 <= 0.0) continue;
    for (Eigen::Index a = 0; a < m1.cols(); ++a) {
      const double mix = (w1 * m1(s, a) + w2 * m2(s, a)) / (w1 + w2);
      if (mix <= 0.0) continue;
      out.iota1(s, a) = log_ratio(m1(s, a), mix);
      out.iota2(s, a) = log_ratio(m2(s, a), mix);
    }
  }
  return out;
}

double weighted_density_sum(const Eigen::MatrixXd& m, const Eigen::VectorXd& weights,
                            const Eigen::MatrixXd& iota) {
  double sum = 0.0;
  for (Eigen::Index s = 0; s < m.rows(); ++s)
    for (Eigen::Index a = 0; a < m.cols(); ++a) {
      const double w = weights(s) * m(s, a);
      if (w > 0.0) sum += w * iota(s, a);
    }
  return sum;
}

double population_gjs(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2, double alpha,
                      const Eigen::VectorXd& pi1, const Eigen::VectorXd& pi2) {
  require_same_shape(m1, m2);
  require_simplex(pi1, m1.rows(), "pi1");
  require_simplex(pi2, m1.rows(), "pi2");
  const InfoDensities d = information_densities(m1, m2, alpha);
  return std::max(0.0, alpha * weighted_density_sum(m1, pi1, d.iota1) +
                           weighted_density_sum(m2, pi2, d.iota2));
}

double population_gjs_joint(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2, double alpha,
                            const Eigen::VectorXd& pi1, const Eigen::VectorXd& pi2) {
  require_same_shape(m1, m2);
  require_simplex(pi1, m1.rows(), "pi1");
  require_simplex(pi2, m1.rows(), "pi2");
  const InfoDensities d = joint_information_densities(m1, pi1, m2, pi2, alpha);
  return std::max(0.0, alpha * weighted_density_sum(m1, pi1, d.iota1) +
                           weighted_density_sum(m2, pi2, d.iota2));
}

MomentsPrediction theoretical_moments(const Eigen::MatrixXd& machine, const Eigen::MatrixXd& human,
                                      std::int64_t N, std::int64_t n, Hypothesis hypothesis,
                                      MixtureForm form) {
  if (N < 1 || n < 1) throw Error(Errc::InvalidSpec, "N and n must be positive");
  require_same_shape(machine, human);
  const Eigen::VectorXd pi_p = stationary_distribution(machine);
  const Eigen::VectorXd pi_q = stationary_distribution(human);

  MomentsPrediction out;
  out.hypothesis = hypothesis;
  out.form = form;
  out.alpha = static_cast<double>(N) / static_cast<double>(n);

  // Reference side is the chain the test was NOT drawn from.
  const bool h0 = hypothesis == Hypothesis::H0;
  const Eigen::MatrixXd& ref = h0 ? human : machine;
  const Eigen::MatrixXd& src = h0 ? machine : human;
  const Eigen::VectorXd& pi_ref = h0 ? pi_q : pi_p;
  const Eigen::VectorXd& pi_src = h0 ? pi_p : pi_q;

  const InfoDensities d = form == MixtureForm::Joint
                              ? joint_information_densities(ref, pi_ref, src, pi_src, out.alpha)
                              : information_densities(ref, src, out.alpha);
  const double gjs = std::max(0.0, out.alpha * weighted_density_sum(ref, pi_ref, d.iota1) +
                                       weighted_density_sum(src, pi_src, d.iota2));
  out.mu = h0 ? -gjs : gjs;
  out.sigma1_sq = pair_variance(ref, pi_ref, d.iota1);
  out.sigma2_sq = pair_variance(src, pi_src, d.iota2);
  out.var = (out.alpha * out.sigma1_sq + out.sigma2_sq) / static_cast<double>(n);
  return out;
}

SampleSummary summarize(const std::vector<double>& values) {
  if (values.empty()) throw Error(Errc::EmptyInput, "no samples to summarize");
  SampleSummary out;
  out.count = values.size();
  const auto count = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / count;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : values) {
    const double d = v - out.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  out.variance = values.size() > 1 ? m2 / (count - 1.0) : 0.0;
  m2 /= count;
  m3 /= count;
  out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  return out;
}

MonteCarloResult mc_delta_gjs(const Eigen::MatrixXd& machine, const Eigen::MatrixXd& human,
                              std::int64_t N, std::int64_t n, std::size_t trials, std::uint64_t seed,
                              Hypothesis hypothesis, std::size_t threads) {
  if (N < 1 || n < 1 || trials < 1) throw Error(Errc::InvalidSpec, "N, n and trials must be positive");
  require_same_shape(machine, human);
  const ChainSampler p(ChainSpec{machine, std::nullopt});
  const ChainSampler q(ChainSpec{human, std::nullopt});
  const ChainSampler& source = hypothesis == Hypothesis::H0 ? p : q;
  const int k = static_cast<int>(machine.rows());

  MonteCarloResult out;
  out.samples.resize(trials);
  parallel_for(trials, thread_count(threads), [&](std::size_t t) {
    Xoshiro256 rng = Xoshiro256::stream(seed, t);
    TransitionCounts cp(k), cq(k), ct(k);
    count_stream_transitions(p, N, rng, cp);
    count_stream_transitions(q, N, rng, cq);
    count_stream_transitions(source, n, rng, ct);
    out.samples[t] = delta_gjs(cp, cq, ct);
  });
  out.summary = summarize(out.samples);
  return out;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

NormalityReport normality_report(const std::vector<double>& values, double skewness_limit) {
  const SampleSummary s = summarize(values);
  NormalityReport out;
  out.skewness = s.skewness;
  const auto n = static_cast<double>(values.size());
  out.ks_critical = 1.6276 / std::sqrt(n);
  const double sd = std::sqrt(s.variance);
  if (!(sd > 0.0)) {
    out.ks_statistic = 1.0;
    return out;
  }
  std::vector<double> z(values.size());
  std::transform(values.begin(), values.end(), z.begin(), [&](double v) { return (v - s.mean) / sd; });
  std::sort(z.begin(), z.end());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = normal_cdf(z[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  out.ks_statistic = d;
  out.passes = std::abs(out.skewness) < skewness_limit && out.ks_statistic < out.ks_critical;
  return out;
}

double gjs_estimation_error(const Eigen::MatrixXd& first, const Eigen::MatrixXd& second,
                            std::int64_t N, std::size_t replicates, std::uint64_t seed,
                            std::size_t threads) {
  if (N < 1 || replicates < 1) throw Error(Errc::InvalidSpec, "N and replicates must be positive");
  require_same_shape(first, second);
  const double truth = population_gjs_joint(first, second, 1.0, stationary_distribution(first),
                                            stationary_distribution(second));
  const ChainSampler a(ChainSpec{first, std::nullopt});
  const ChainSampler b(ChainSpec{second, std::nullopt});
  const int k = static_cast<int>(first.rows());
  std::vector<double> errors(replicates);
  parallel_for(replicates, thread_count(threads), [&](std::size_t r) {
    Xoshiro256 rng = Xoshiro256::stream(seed, r);
    TransitionCounts ca(k), cb(k);
    count_stream_transitions(a, N, rng, ca);
    count_stream_transitions(b, N, rng, cb);
    const double estimate = gjs_joint(JointPairDistribution::from_counts(ca),
                                      JointPairDistribution::from_counts(cb), 1.0)
                                .llr_scaled();
    errors[r] = std::abs(estimate - truth);
  });
  double sum = 0.0;
  for (double e : errors) sum += e;
  return sum / static_cast<double>(replicates);
}

// --- sweep -------------------------------------------------------------------

double binned_population_gjs(const EmissionSpec& first, const EmissionSpec& second,
                             const std::vector<double>& boundaries) {
  const int bins = static_cast<int>(boundaries.size()) + 1;
  const auto joint = [&](const EmissionSpec& spec) {
    spec.validate();
    if ((spec.stddev.array() <= 0.0).any()) {
      throw Error(Errc::InvalidSpec, "binned population GJS needs stddev > 0 in every state");
    }
    const Eigen::Index h = spec.chain.k();
    Eigen::MatrixXd emit(h, bins);
    for (Eigen::Index s = 0; s < h; ++s) {
      double lower = 0.0;
      for (int j = 0; j < bins; ++j) {
        const double upper =
            j + 1 < bins ? normal_cdf((boundaries[static_cast<std::size_t>(j)] - spec.mean(s)) / spec.stddev(s))
                         : 1.0;
        emit(s, j) = std::max(0.0, upper - lower);
        lower = upper;
      }
    }
    const Eigen::VectorXd pi = spec.chain.initial_distribution();
    return JointPairDistribution{emit.transpose() * pi.asDiagonal() * spec.chain.matrix * emit};
  };
  return gjs_joint(joint(first), joint(second), 1.0).llr_scaled();
}

std::vector<double> fine_grid_boundaries(const EmissionSpec& first, const EmissionSpec& second,
                                         int bins) {
  if (bins < 2) throw Error(Errc::InvalidSpec, "fine grid needs at least 2 bins");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const EmissionSpec* spec : {&first, &second}) {
    lo = std::min(lo, (spec->mean - 5.0 * spec->stddev).minCoeff());
    hi = std::max(hi, (spec->mean + 5.0 * spec->stddev).maxCoeff());
  }
  std::vector<double> out(static_cast<std::size_t>(bins - 1));
  const double width = (hi - lo) / bins;
  for (int j = 1; j < bins; ++j) out[static_cast<std::size_t>(j - 1)] = lo + width * j;
  return out;
}

SweepConfig sweep_config_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::Config, "sweep config must be a JSON object");
  SweepConfig c;
  c.machine = spec_field(doc, "machine", emission_from_json);
  c.human = spec_field(doc, "human", emission_from_json);
  const auto n_it = doc.find("n_values");
  if (n_it == doc.end() || !n_it->is_array() || n_it->empty()) bad_field("n_values", "expected a non-empty array");
  for (const auto& v : *n_it) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1) bad_field("n_values", "entries must be positive integers");
    c.n_values.push_back(v.get<std::int64_t>());
  }
  const auto k_it = doc.find("k_values");
  if (k_it == doc.end() || !k_it->is_array() || k_it->empty()) bad_field("k_values", "expected a non-empty array");
  for (const auto& v : *k_it) {
    if (!v.is_number_integer() || v.get<int>() < 2) bad_field("k_values", "entries must be integers >= 2");
    c.k_values.push_back(v.get<int>());
  }
  c.trials = number_field<std::size_t>(doc, "trials", c.trials);
  if (c.trials < 1) bad_field("trials", "must be positive");
  c.seed = number_field<std::uint64_t>(doc, "seed", c.seed);
  c.calibration_samples = number_field<std::size_t>(doc, "calibration_samples", c.calibration_samples);
  if (c.calibration_samples < 2) bad_field("calibration_samples", "must be at least 2");
  c.truth_bins = number_field<int>(doc, "truth_bins", c.truth_bins);
  if (c.truth_bins < 2) bad_field("truth_bins", "must be at least 2");
  c.threads = number_field<std::size_t>(doc, "threads", c.threads);
  for (const EmissionSpec* spec : {&c.machine, &c.human}) {
    if ((spec->stddev.array() <= 0.0).any()) bad_field("emission.stddev", "sweep sources need stddev > 0");
  }
  return c;
}

json to_json(const SweepConfig& c) {
  return {{"machine", to_json(c.machine)},
          {"human", to_json(c.human)},
          {"n_values", c.n_values},
          {"k_values", c.k_values},
          {"trials", c.trials},
          {"seed", c.seed},
          {"calibration_samples", c.calibration_samples},
          {"truth_bins", c.truth_bins}};
}

SweepResult k_tradeoff_sweep(const SweepConfig& config) {
  if (config.n_values.empty() || config.k_values.empty() || config.trials < 1) {
    throw Error(Errc::Config, "sweep needs n_values, k_values and trials");
  }
  SweepResult result;
  result.truth = binned_population_gjs(
      config.machine, config.human, fine_grid_boundaries(config.machine, config.human, config.truth_bins));

  // Quantizers are fitted once on a fixed calibration sample so only the
  // reference size varies across rows.
  std::vector<double> calibration;
  {
    Xoshiro256 rng = Xoshiro256::stream(config.seed, 0);
    calibration = sample_emissions(config.machine, config.calibration_samples, rng).values;
    const auto other = sample_emissions(config.human, config.calibration_samples, rng).values;
    calibration.insert(calibration.end(), other.begin(), other.end());
  }
  std::vector<Quantizer> quantizers;
  for (int k : config.k_values) {
    quantizers.push_back(fit_quantizer(calibration, k));
    result.population_by_k.push_back(
        binned_population_gjs(config.machine, config.human, quantizers.back().boundaries));
  }

  const std::size_t nk = config.k_values.size();
  const std::size_t cells = config.n_values.size() * config.trials;
  std::vector<double> estimates(cells * nk);
  parallel_for(cells, thread_count(config.threads), [&](std::size_t cell) {
    const std::size_t ni = cell / config.trials;
    const auto n = static_cast<std::size_t>(config.n_values[ni]);
    Xoshiro256 rng = Xoshiro256::stream(config.seed, 1 + cell);
    const auto a = sample_emissions(config.machine, n + 1, rng).values;
    const auto b = sample_emissions(config.human, n + 1, rng).values;
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const Quantizer& q = quantizers[ki];
      const auto ca = count_transitions(quantize(q, a), q.k());
      const auto cb = count_transitions(quantize(q, b), q.k());
      estimates[cell * nk + ki] =
          gjs_joint(JointPairDistribution::from_counts(ca), JointPairDistribution::from_counts(cb), 1.0)
              .llr_scaled();
    }
  });

  for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
    const std::size_t first_row = result.rows.size();
    for (std::size_t ki = 0; ki < nk; ++ki) {
      SweepRow row;
      row.n_reference = config.n_values[ni];
      row.k = config.k_values[ki];
      row.trial_count = config.trials;
      row.discretization_error = std::abs(result.population_by_k[ki] - result.truth);
      double total = 0.0;
      double stat = 0.0;
      for (std::size_t t = 0; t < config.trials; ++t) {
        const double e = estimates[(ni * config.trials + t) * nk + ki];
        total += std::abs(e - result.truth);
        stat += std::abs(e - result.population_by_k[ki]);
      }
      row.mean_abs_error = total / static_cast<double>(config.trials);
      row.statistical_error = stat / static_cast<double>(config.trials);
      result.rows.push_back(row);
    }
    std::size_t best = first_row;
    for (std::size_t r = first_row; r < result.rows.size(); ++r) {
      if (result.rows[r].mean_abs_error < result.rows[best].mean_abs_error) best = r;
    }
    result.rows[best].argmin = true;
    result.argmin_k.push_back(result.rows[best].k);
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "n_reference,k,trial_count,mean_abs_error,argmin_flag\n";
  for (const SweepRow& row : result.rows) {
    out += std::to_string(row.n_reference) + ',' + std::to_string(row.k) + ',' +
           std::to_string(row.trial_count) + ',' + format_double(row.mean_abs_error) + ',' +
           (row.argmin ? "1" : "0") + '\n';
  }
  return out;
}

json sweep_summary(const SweepConfig& config, const SweepResult& result) {
  json rows = json::array();
  for (const SweepRow& row : result.rows) {
    rows.push_back({{"n_reference", row.n_reference},
                    {"k", row.k},
                    {"trial_count", row.trial_count},
                    {"mean_abs_error", row.mean_abs_error},
                    {"discretization_error", row.discretization_error},
                    {"statistical_error", row.statistical_error},
                    {"argmin", row.argmin}});
  }
  json argmin = json::array();
  for (std::size_t i = 0; i < config.n_values.size(); ++i) {
    argmin.push_back({{"n_reference", config.n_values[i]}, {"k", result.argmin_k[i]}});
  }
  return {{"config", to_json(config)},
          {"truth", result.truth},
          {"population_by_k", result.population_by_k},
          {"argmin_k", std::move(argmin)},
          {"rows", std::move(rows)}};
}

// --- theory report -------------------------------------------------------------

TheoryConfig theory_config_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::Config, "theory config must be a JSON object");
  TheoryConfig c;
  c.machine = spec_field(doc, "machine", chain_from_json);
  c.human = spec_field(doc, "human", chain_from_json);
  if (c.machine.k() != c.human.k()) bad_field("human", "must have as many states as 'machine'");
  c.N = number_field<std::int64_t>(doc, "N", c.N);
  c.n = number_field<std::int64_t>(doc, "n", c.n);
  if (c.N < 1) bad_field("N", "must be positive");
  if (c.n < 1) bad_field("n", "must be positive");
  c.trials = number_field<std::size_t>(doc, "trials", c.trials);
  if (c.trials < 2) bad_field("trials", "must be at least 2");
  c.seed = number_field<std::uint64_t>(doc, "seed", c.seed);
  c.threads = number_field<std::size_t>(doc, "threads", c.threads);
  return c;
}

json simulate_theory(const TheoryConfig& c) {
  json report = {{"N", c.N}, {"n", c.n}, {"trials", c.trials}, {"seed", c.seed}};
  for (const Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
    const MomentsPrediction pred = theoretical_moments(c.machine.matrix, c.human.matrix, c.N, c.n, h);
    const MomentsPrediction row_mix =
        theoretical_moments(c.machine.matrix, c.human.matrix, c.N, c.n, h, MixtureForm::RowMixture);
    const std::uint64_t seed = c.seed + (h == Hypothesis::H0 ? 0 : 1);
    const MonteCarloResult mc = mc_delta_gjs(c.machine.matrix, c.human.matrix, c.N, c.n, c.trials,
                                             seed, h, c.threads);
    const NormalityReport norm = normality_report(mc.samples);
    const double se = mc.summary.standard_error();
    report[std::string(to_string(h))] = {
        {"prediction",
         {{"mu", pred.mu},
          {"var", pred.var},
          {"sigma1_sq", pred.sigma1_sq},
          {"sigma2_sq", pred.sigma2_sq},
          {"alpha", pred.alpha}}},
        {"row_mixture_prediction", {{"mu", row_mix.mu}, {"var", row_mix.var}}},
        {"monte_carlo",
         {{"mean", mc.summary.mean},
          {"variance", mc.summary.variance},
          {"skewness", mc.summary.skewness},
          {"standard_error", se}}},
        {"mean_z", se > 0.0 ? (mc.summary.mean - pred.mu) / se : 0.0},
        {"variance_ratio", pred.var > 0.0 ? mc.summary.variance / pred.var : 0.0},
        {"normality",
         {{"skewness", norm.skewness},
          {"ks_statistic", norm.ks_statistic},
          {"ks_critical_1pct", norm.ks_critical},
          {"passes", norm.passes}}},
    };
  }
  return report;
}

}  // namespace surpmark
