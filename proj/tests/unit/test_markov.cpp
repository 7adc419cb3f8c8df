#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "surpmark/markov.hpp"
#include "surpmark/rng.hpp"
#include "test_util.hpp"

using namespace surpmark;

TEST(TransitionCounts, HandCounts) {
  const StateSequence s{0, 1, 1, 2, 0};
  const TransitionCounts c = count_transitions(s, 3);
  EXPECT_EQ(c.num_transitions(), 4);
  EXPECT_EQ(c(0, 1), 1);
  EXPECT_EQ(c(1, 1), 1);
  EXPECT_EQ(c(1, 2), 1);
  EXPECT_EQ(c(2, 0), 1);
  EXPECT_EQ(c.counts().sum(), 4);
  EXPECT_EQ(c.source_visits(), (CountVector(3) << 1, 2, 1).finished());
}

TEST(TransitionCounts, ShortSequencesContributeNothing) {
  TransitionCounts c(2);
  c.add_sequence(StateSequence{});
  c.add_sequence(StateSequence{1});
  EXPECT_EQ(c.num_transitions(), 0);
}

TEST(TransitionCounts, MergeIsMonoidWithoutCrossDocumentPairs) {
  const StateSequence a{0, 0, 1}, b{2, 2, 1, 0};
  const TransitionCounts ca = count_transitions(a, 3), cb = count_transitions(b, 3);
  const TransitionCounts zero(3);
  EXPECT_EQ(ca + cb, cb + ca);
  EXPECT_EQ(ca + zero, ca);
  const TransitionCounts cc = count_transitions(StateSequence{1, 2}, 3);
  EXPECT_EQ((ca + cb) + cc, ca + (cb + cc));

  // Concatenating the documents would add the spurious 1 -> 2 pair.
  StateSequence joined = a;
  joined.insert(joined.end(), b.begin(), b.end());
  const TransitionCounts concat = count_transitions(joined, 3);
  EXPECT_EQ((ca + cb)(1, 2), 0);
  EXPECT_EQ(concat(1, 2), 1);
  EXPECT_EQ((ca + cb).num_transitions(), 5);
}

TEST(TransitionCounts, Errors) {
  EXPECT_ERRC(count_transitions(StateSequence{0, 3}, 3), Errc::StateOutOfRange, "index 1");
  EXPECT_ERRC(count_transitions(StateSequence{-1, 0}, 3), Errc::StateOutOfRange);
  EXPECT_ERRC(merge_counts(TransitionCounts(2), TransitionCounts(3)), Errc::DimensionMismatch);
  CountMatrix bad = CountMatrix::Zero(2, 2);
  bad(0, 1) = -1;
  EXPECT_ERRC(TransitionCounts::from_matrix(bad), Errc::Corrupt);
  EXPECT_ERRC(TransitionCounts::from_matrix(CountMatrix::Zero(2, 3)), Errc::Corrupt);
  EXPECT_ERRC(TransitionCounts(0), Errc::InvalidSpec);
}

TEST(TransitionCounts, FromMatrixRecomputesTotals) {
  CountMatrix m(2, 2);
  m << 3, 1, 0, 4;
  const TransitionCounts c = TransitionCounts::from_matrix(m);
  EXPECT_EQ(c.num_transitions(), 8);
  EXPECT_EQ(c.source_visits()(0), 4);
}

TEST(TransitionModel, PlugInRowsAndUndefinedStates) {
  CountMatrix m(3, 3);
  m << 1, 3, 0, 2, 2, 0, 0, 0, 0;
  const TransitionModel model = to_model(TransitionCounts::from_matrix(m));
  EXPECT_DOUBLE_EQ(model.matrix(0, 1), 0.75);
  EXPECT_DOUBLE_EQ(model.matrix(1, 0), 0.5);
  EXPECT_TRUE(model.defined[0]);
  EXPECT_TRUE(model.defined[1]);
  EXPECT_FALSE(model.defined[2]);
  EXPECT_DOUBLE_EQ(model.matrix.row(2).sum(), 0.0);
  EXPECT_DOUBLE_EQ(model.occupancy(0), 0.5);
  EXPECT_DOUBLE_EQ(model.occupancy(2), 0.0);
  EXPECT_FALSE(with_stationary(model).stationary.has_value());

  const TransitionModel smooth = to_model(TransitionCounts::from_matrix(m), 1.0);
  EXPECT_TRUE(smooth.defined[2]);
  EXPECT_DOUBLE_EQ(smooth.matrix(2, 0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(smooth.matrix(0, 1), 4.0 / 7.0);

  EXPECT_ERRC(to_model(TransitionCounts(3)), Errc::NoTransitions);
}

TEST(Stationary, TwoStateClosedForm) {
  const double p = 0.3, q = 0.1;
  Eigen::MatrixXd m(2, 2);
  m << 1 - p, p, q, 1 - q;
  const Eigen::VectorXd pi = stationary_distribution(m);
  EXPECT_NEAR(pi(0), q / (p + q), 1e-14);
  EXPECT_NEAR(pi(1), p / (p + q), 1e-14);
}

TEST(Stationary, ThreeStateIsInvariant) {
  Eigen::MatrixXd m(3, 3);
  m << 0.6, 0.3, 0.1, 0.5, 0.3, 0.2, 0.7, 0.2, 0.1;
  const Eigen::VectorXd pi = stationary_distribution(m);
  EXPECT_NEAR(pi.sum(), 1.0, 1e-14);
  EXPECT_LT((m.transpose() * pi - pi).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Stationary, TransientStatesGetNoMass) {
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 0.5, 0.0, 1.0;
  const Eigen::VectorXd pi = stationary_distribution(m);
  EXPECT_NEAR(pi(0), 0.0, 1e-14);
  EXPECT_NEAR(pi(1), 1.0, 1e-14);
}

TEST(Stationary, Errors) {
  EXPECT_ERRC(stationary_distribution(Eigen::MatrixXd::Identity(2, 2)), Errc::Reducible);
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 0.4, 0.5, 0.5;
  EXPECT_ERRC(stationary_distribution(m), Errc::NotStochastic);
  m << 1.5, -0.5, 0.5, 0.5;
  EXPECT_ERRC(stationary_distribution(m), Errc::NotStochastic);
}

TEST(Stationary, FloatInstantiation) {
  Eigen::MatrixXf m(2, 2);
  m << 0.9f, 0.1f, 0.2f, 0.8f;
  const Eigen::VectorXf pi = stationary_distribution(m);
  EXPECT_NEAR(pi(0), 2.0f / 3.0f, 1e-5f);
}

TEST(ClassStructure, CountsClosedClasses) {
  Eigen::MatrixXd m(4, 4);
  m << 0.5, 0.5, 0, 0,
       0.5, 0.5, 0, 0,
       0, 0, 1, 0,
       0.3, 0, 0.3, 0.4;
  EXPECT_EQ(closed_class_count(m), 2);
  Eigen::MatrixXd cycle(3, 3);
  cycle << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  EXPECT_EQ(closed_class_count(cycle), 1);
}

TEST(PairChain, StationaryLawIsPiTimesRow) {
  Eigen::MatrixXd m(3, 3);
  m << 0.4, 0.4, 0.2, 0.3, 0.4, 0.3, 0.3, 0.3, 0.4;
  const Eigen::VectorXd pi = stationary_distribution(m);
  const PairChain chain = pair_chain(m, pi);
  ASSERT_EQ(chain.matrix.rows(), 9);
  EXPECT_TRUE(is_row_stochastic(chain.matrix));
  const Eigen::VectorXd lifted = chain.matrix.transpose() * chain.stationary_pairs;
  EXPECT_LT((lifted - chain.stationary_pairs).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(chain.stationary_pairs(PairChain::index(1, 2, 3)), pi(1) * 0.3, 1e-15);
  const Eigen::VectorXd direct = stationary_distribution(chain.matrix);
  EXPECT_LT((direct - chain.stationary_pairs).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_ERRC(pair_chain(m, Eigen::VectorXd::Ones(2)), Errc::DimensionMismatch);
}

TEST(PairChain, FromEstimatedModel) {
  Xoshiro256 rng(3);
  StateSequence s(5000);
  for (auto& x : s) x = static_cast<State>(rng.below(3));
  const TransitionModel model = with_stationary(to_model(count_transitions(s, 3)));
  ASSERT_TRUE(model.stationary.has_value());
  const PairChain chain = pair_chain(model);
  EXPECT_NEAR(chain.stationary_pairs.sum(), 1.0, 1e-12);
}
