#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "surpmark/divergence.hpp"
#include "surpmark/error.hpp"
#include "surpmark/markov.hpp"
#include "surpmark/synth.hpp"
#include "surpmark/types.hpp"

namespace surpmark {

enum class Hypothesis { H0, H1 };  // H0: test drawn from the machine chain P; H1: from Q

std::string_view to_string(Hypothesis h) noexcept;

/// Which mixture the population divergence is taken against.
///  - Joint: row s mixes with weights alpha*pi1(s) : pi2(s). This is the limit
///    of the joint-mode empirical statistic.
///  - RowMixture: every row mixes with alpha : 1, rows of each KL weighted by
///    their own stationary law. Agrees with Joint when pi1 == pi2.
enum class MixtureForm { Joint, RowMixture };

/// Log-ratios of each conditional to the mixture conditional. Cells where the
/// numerator conditional is zero hold -infinity and always carry zero weight.
struct InfoDensities {
  Eigen::MatrixXd iota1;
  Eigen::MatrixXd iota2;
  double alpha = 1.0;
};

/// iota_i = log((1+alpha) M_i / (alpha M1 + M2)). Throws DimensionMismatch.
InfoDensities information_densities(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2,
                                    double alpha);
/// iota_i = log(M_i / J) with J(a|s) = (alpha pi1 M1 + pi2 M2) / (alpha pi1 + pi2).
/// Rows where both weights vanish are set to zero.
InfoDensities joint_information_densities(const Eigen::MatrixXd& m1, const Eigen::VectorXd& pi1,
                                          const Eigen::MatrixXd& m2, const Eigen::VectorXd& pi2,
                                          double alpha);

/// alpha * sum pi1 M1 iota1 + sum pi2 M2 iota2 with the row-mixture densities.
/// Log-likelihood-ratio scale, like delta_gjs. Throws DimensionMismatch, InvalidSpec.
double population_gjs(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2, double alpha,
                      const Eigen::VectorXd& pi1, const Eigen::VectorXd& pi2);
/// Same expansion with the joint-mixture densities.
double population_gjs_joint(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2, double alpha,
                            const Eigen::VectorXd& pi1, const Eigen::VectorXd& pi2);

/// sum over cells of w(s) M(a|s) iota(a|s), with -inf cells skipped when their
/// weight is zero.
double weighted_density_sum(const Eigen::MatrixXd& m, const Eigen::VectorXd& weights,
                            const Eigen::MatrixXd& iota);

/// Long-run variance lim Var(sum_{t<T} f(X_t)) / T of an additive functional.
///
/// Centers f at its stationary mean, solves g = (I - M + 1 pi^T)^{-1} f~ and
/// returns 2 <g, f~>_pi - ||f~||^2_pi. Negative values down to -1e-10 are
/// clamped to zero. Throws DimensionMismatch, Reducible, SingularSolve.
template <typename MDerived, typename PiDerived, typename FDerived>
typename MDerived::Scalar asymptotic_variance(const Eigen::MatrixBase<MDerived>& m,
                                              const Eigen::MatrixBase<PiDerived>& pi,
                                              const Eigen::MatrixBase<FDerived>& f) {
  using Scalar = typename MDerived::Scalar;
  const Eigen::Index k = m.rows();
  if (m.cols() != k || pi.size() != k || f.size() != k) {
    throw Error(Errc::DimensionMismatch, "asymptotic_variance needs k x k, k and k inputs");
  }
  if (closed_class_count(m) != 1) throw Error(Errc::Reducible, "chain has more than one closed class");
  if (!f.allFinite()) throw Error(Errc::NonFiniteValue, "f must be finite");

  const Scalar mean = pi.dot(f);
  const VectorX<Scalar> centered = f.array() - mean;
  MatrixX<Scalar> system = MatrixX<Scalar>::Identity(k, k) - m;
  system += VectorX<Scalar>::Ones(k) * pi.transpose();
  const Eigen::FullPivLU<MatrixX<Scalar>> lu(system);
  if (!lu.isInvertible()) throw Error(Errc::SingularSolve, "fundamental matrix is singular");
  const VectorX<Scalar> g = lu.solve(centered);

  const Scalar inner = (pi.array() * g.array() * centered.array()).sum();
  const Scalar norm = (pi.array() * centered.array().square()).sum();
  Scalar sigma2 = Scalar(2) * inner - norm;
  if (sigma2 < Scalar(0)) {
    if (sigma2 < Scalar(-1e-10)) {
      throw Error(Errc::SingularSolve, "negative asymptotic variance " + std::to_string(double(sigma2)));
    }
    sigma2 = Scalar(0);
  }
  return sigma2;
}

template <typename MDerived, typename FDerived>
typename MDerived::Scalar asymptotic_variance(const Eigen::MatrixBase<MDerived>& m,
                                              const Eigen::MatrixBase<FDerived>& f) {
  return asymptotic_variance(m, stationary_distribution(m), f);
}

/// Asymptotic law of delta_gjs for references of N transitions per side and a
/// test of n transitions.
struct MomentsPrediction {
  Hypothesis hypothesis = Hypothesis::H0;
  MixtureForm form = MixtureForm::Joint;
  double mu = 0.0;
  double var = 0.0;        // (alpha * sigma1_sq + sigma2_sq) / n
  double sigma1_sq = 0.0;  // per-step long-run variance, reference side
  double sigma2_sq = 0.0;  // per-step long-run variance, test side
  double alpha = 1.0;      // N / n
};

/// Under H0 the test follows P, mu = -GJS(M_Q, M_P, alpha), the reference side
/// runs on Q's pair chain with iota1 and the test side on P's pair chain with
/// iota2. H1 mirrors it with the chains swapped and mu positive.
/// Throws InvalidSpec (N, n < 1) and propagates chain errors.
MomentsPrediction theoretical_moments(const Eigen::MatrixXd& machine, const Eigen::MatrixXd& human,
                                      std::int64_t N, std::int64_t n, Hypothesis hypothesis,
                                      MixtureForm form = MixtureForm::Joint);

struct SampleSummary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;  // moment coefficient g1
  std::size_t count = 0;
  double standard_error() const noexcept {
    return count ? std::sqrt(variance / static_cast<double>(count)) : 0.0;
  }
};

/// Throws EmptyInput.
SampleSummary summarize(const std::vector<double>& values);

struct MonteCarloResult {
  std::vector<double> samples;
  SampleSummary summary;
};

/// Simulates `trials` independent (P reference, Q reference, test) triples:
/// N transitions per reference from the stationary law, n test transitions
/// from the hypothesis chain, scored with delta_gjs in joint mode with
/// per-side alpha. Trial t uses Xoshiro256::stream(seed, t), so the result is
/// independent of `threads`.
MonteCarloResult mc_delta_gjs(const Eigen::MatrixXd& machine, const Eigen::MatrixXd& human,
                              std::int64_t N, std::int64_t n, std::size_t trials, std::uint64_t seed,
                              Hypothesis hypothesis, std::size_t threads = 0);

/// One-sample Kolmogorov-Smirnov distance of `values`, standardized by their
/// own mean and standard deviation, to the standard normal.
struct NormalityReport {
  double skewness = 0.0;
  double ks_statistic = 0.0;
  double ks_critical = 0.0;  // asymptotic 1% critical value 1.6276 / sqrt(n)
  bool passes = false;       // |skewness| < 0.2 and ks_statistic < ks_critical
};

NormalityReport normality_report(const std::vector<double>& values,
                                 double skewness_limit = 0.2);

double normal_cdf(double x) noexcept;

/// Mean over replicates of |empirical GJS - population GJS| for two chains
/// sampled with N transitions each (joint mode, alpha = 1, LLR scale).
double gjs_estimation_error(const Eigen::MatrixXd& first, const Eigen::MatrixXd& second,
                            std::int64_t N, std::size_t replicates, std::uint64_t seed,
                            std::size_t threads = 0);

// --- k trade-off sweep -----------------------------------------------------

struct SweepConfig {
  EmissionSpec machine;
  EmissionSpec human;
  std::vector<std::int64_t> n_values;  // reference transitions per side
  std::vector<int> k_values;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  std::size_t calibration_samples = 20000;  // per side, for the fixed quantizers
  int truth_bins = 256;
  std::size_t threads = 0;
};

/// Throws Config naming the offending field.
SweepConfig sweep_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SweepConfig& config);

struct SweepRow {
  std::int64_t n_reference = 0;
  int k = 0;
  std::size_t trial_count = 0;
  double mean_abs_error = 0.0;
  bool argmin = false;
  double discretization_error = 0.0;  // |population GJS at k - truth|
  double statistical_error = 0.0;     // mean |empirical - population at k|
};

struct SweepResult {
  double truth = 0.0;  // fine-grid GJS, LLR scale with alpha = 1
  std::vector<double> population_by_k;
  std::vector<SweepRow> rows;  // n-major, k-minor, in config order
  std::vector<int> argmin_k;   // one per n value
};

/// Population GJS (joint form, alpha = 1) of the two emission sources observed
/// through the bins cut at `boundaries`. Throws InvalidSpec (zero stddev).
double binned_population_gjs(const EmissionSpec& first, const EmissionSpec& second,
                             const std::vector<double>& boundaries);

/// Equal-width fine grid covering both sources' emission ranges (mean +- 5 sd).
std::vector<double> fine_grid_boundaries(const EmissionSpec& first, const EmissionSpec& second,
                                         int bins);

SweepResult k_tradeoff_sweep(const SweepConfig& config);

/// CSV columns: n_reference,k,trial_count,mean_abs_error,argmin_flag.
std::string sweep_csv(const SweepResult& result);
nlohmann::json sweep_summary(const SweepConfig& config, const SweepResult& result);

// --- Monte Carlo validation of the moment predictions ------------------------

struct TheoryConfig {
  ChainSpec machine;
  ChainSpec human;
  std::int64_t N = 20000;
  std::int64_t n = 2000;
  std::size_t trials = 2000;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

TheoryConfig theory_config_from_json(const nlohmann::json& doc);

/// Predictions, Monte Carlo summaries and normality diagnostics under both
/// hypotheses, as emitted by `surpmark simulate-theory`.
nlohmann::json simulate_theory(const TheoryConfig& config);

}  // namespace surpmark
