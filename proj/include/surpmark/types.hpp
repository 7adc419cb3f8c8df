#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace surpmark {

/// Discrete surprisal state, 0-based: a k-bin quantizer yields states 0..k-1.
using State = int;
using StateSequence = std::vector<State>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CountMatrix = MatrixX<std::int64_t>;
using CountVector = VectorX<std::int64_t>;

}  // namespace surpmark
