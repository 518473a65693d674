#pragma once

#include "memxbar/crossbar.hpp"
#include "memxbar/types.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace memxbar {

/// Functional view of the crossbar: output i uses the adjacent column pair
/// (2i, 2i+1) as (G+, G-), so W_ij = G(j, 2i) - G(j, 2i+1).
template <typename Scalar = double>
struct PerceptronConfig {
  Eigen::Index n_inputs = 10;
  Eigen::Index n_outputs = 3;
  Scalar beta = Scalar(2e4);  // 1/A
  Scalar target_high = Scalar(0.85);
  Scalar target_low = Scalar(-0.85);
  Scalar v_read = Scalar(0.1);
  Scalar v_bias = Scalar(-0.1);
  Scalar v_write_set = Scalar(1.3);
  Scalar v_write_reset = Scalar(-1.3);

  void validate() const {
    if (n_inputs <= 0 || n_outputs <= 0) {
      throw std::invalid_argument("perceptron: n_inputs and n_outputs must be positive");
    }
    if (!(beta > 0)) throw std::invalid_argument("perceptron: beta must be positive");
    if (std::abs(target_high) != std::abs(target_low) || !(std::abs(target_high) < 1) ||
        !(target_high > target_low)) {
      throw std::invalid_argument("perceptron: targets must be +/-t with 0 < t < 1");
    }
    if (!(v_write_set > 0) || !(v_write_reset < 0)) {
      throw std::invalid_argument("perceptron: set pulse must be positive, reset negative");
    }
  }

  Eigen::Index crossbar_rows() const { return n_inputs; }
  Eigen::Index crossbar_cols() const { return 2 * n_outputs; }
};

template <typename Scalar = double>
struct ForwardResult {
  Vector<Scalar> currents;     // I_i, amperes
  Vector<Scalar> activations;  // f_i = tanh(beta I_i)
};

/// Differential weight matrix (n_inputs x n_outputs), in siemens.
template <typename Scalar>
Grid<Scalar> differential_weights(const Crossbar<Scalar>& xbar) {
  const Eigen::Index n_out = xbar.cols() / 2;
  Grid<Scalar> w(xbar.rows(), n_out);
  for (Eigen::Index i = 0; i < n_out; ++i) {
    w.col(i) = xbar.conductances().col(2 * i) - xbar.conductances().col(2 * i + 1);
  }
  return w;
}

template <typename Scalar>
ForwardResult<Scalar> forward(const Crossbar<Scalar>& xbar, const PerceptronConfig<Scalar>& cfg,
                              const Vector<Scalar>& pattern_voltages,
                              const ReadScheme<Scalar>& scheme = {}) {
  if (pattern_voltages.size() != cfg.n_inputs || xbar.rows() != cfg.crossbar_rows() ||
      xbar.cols() != cfg.crossbar_cols()) {
    throw std::invalid_argument("forward: dimension mismatch");
  }
  const Vector<Scalar> col = read_column_currents(xbar, pattern_voltages, scheme);
  ForwardResult<Scalar> out;
  out.currents.resize(cfg.n_outputs);
  for (Eigen::Index i = 0; i < cfg.n_outputs; ++i) {
    out.currents(i) = col(2 * i) - col(2 * i + 1);
  }
  out.activations = (cfg.beta * out.currents.array()).tanh().matrix();
  return out;
}

/// df/dI = beta (1 - tanh^2(beta I)).
template <typename Scalar>
Scalar activation_derivative(Scalar current, const PerceptronConfig<Scalar>& cfg) {
  const Scalar t = std::tanh(cfg.beta * current);
  return cfg.beta * (Scalar(1) - t * t);
}

/// Index of the strict maximum; nullopt when the maximum is shared.
template <typename Derived>
std::optional<Eigen::Index> classify(const Eigen::MatrixBase<Derived>& activations) {
  if (activations.size() == 0) return std::nullopt;
  Eigen::Index best = 0;
  bool tied = false;
  for (Eigen::Index k = 1; k < activations.size(); ++k) {
    if (activations(k) > activations(best)) {
      best = k;
      tied = false;
    } else if (activations(k) == activations(best)) {
      tied = true;
    }
  }
  if (tied) return std::nullopt;
  return best;
}

}  // namespace memxbar
