#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace memxbar {

template <typename Scalar>
using Grid = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using GridXd = Grid<double>;
using VectorXd = Vector<double>;

// Per-row boolean selection used by write plans.
using RowMask = Eigen::Array<bool, Eigen::Dynamic, 1>;

using Rng = std::mt19937_64;

inline constexpr double kMicro = 1e-6;

template <typename Scalar>
constexpr Scalar micro(Scalar value_in_micro) {
  return value_in_micro * Scalar(1e-6);
}

}  // namespace memxbar
