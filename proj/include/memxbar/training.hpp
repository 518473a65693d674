#pragma once

#include "memxbar/crossbar.hpp"
#include "memxbar/perceptron.hpp"
#include "memxbar/types.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace memxbar {

/// One encoded training pattern.
template <typename Scalar = double>
struct Sample {
  Vector<Scalar> voltages;
  Eigen::Index label = 0;
};

/// Batch sum of delta-rule increments, n_outputs x n_inputs.
template <typename Scalar = double>
struct DeltaAccumulator {
  Grid<Scalar> sums;

  DeltaAccumulator(Eigen::Index n_outputs, Eigen::Index n_inputs)
      : sums(Grid<Scalar>::Zero(n_outputs, n_inputs)) {}

  void reset() { sums.setZero(); }
};

/// e = (f_target - f) * df/dI evaluated at I.
template <typename Scalar>
Scalar compute_error(Scalar activation, Scalar target, Scalar current,
                     const PerceptronConfig<Scalar>& cfg) {
  return (target - activation) * activation_derivative(current, cfg);
}

template <typename Scalar>
void accumulate(DeltaAccumulator<Scalar>& acc, const Vector<Scalar>& errors,
                const Vector<Scalar>& voltages) {
  if (errors.size() != acc.sums.rows() || voltages.size() != acc.sums.cols()) {
    throw std::invalid_argument("accumulate: dimension mismatch");
  }
  acc.sums.noalias() += errors * voltages.transpose();
}

/// +1 where the accumulated sum is strictly positive, -1 elsewhere.
template <typename Scalar>
Eigen::MatrixXi epoch_signs(const DeltaAccumulator<Scalar>& acc) {
  return ((acc.sums.array() > Scalar(0)).template cast<int>() * 2 - 1).matrix();
}

/// Translates a sign matrix (n_outputs x n_inputs) into the ordered pulse
/// plans of one epoch. For output i the G+ column (2i) gets a set on rows with
/// sign +1 then a reset on the rest; the G- column (2i+1) gets the mirror.
inline std::vector<WritePulsePlan> build_write_plans(const Eigen::MatrixXi& signs) {
  std::vector<WritePulsePlan> plans;
  plans.reserve(static_cast<std::size_t>(signs.rows()) * 4);
  for (Eigen::Index i = 0; i < signs.rows(); ++i) {
    const RowMask up = (signs.row(i).transpose().array() > 0);
    const RowMask down = !up;
    plans.push_back({2 * i, Polarity::kSet, up});
    plans.push_back({2 * i, Polarity::kReset, down});
    plans.push_back({2 * i + 1, Polarity::kSet, down});
    plans.push_back({2 * i + 1, Polarity::kReset, up});
  }
  return plans;
}

template <typename Scalar = double>
struct EpochRecord {
  int epoch = 0;
  int n_errors = 0;
  Grid<Scalar> currents;     // n_patterns x n_outputs, pre-update
  Grid<Scalar> activations;  // n_patterns x n_outputs, pre-update
  std::optional<Grid<Scalar>> conductances;
};

template <typename Scalar = double>
struct TrainingLog {
  std::vector<EpochRecord<Scalar>> epochs;
  std::vector<Eigen::Index> labels;
  bool converged = false;
  std::uint64_t seed = 0;
  std::string config_hash;

  /// Index of the first epoch that began with every pattern classified.
  std::optional<int> epochs_to_convergence() const {
    if (!converged || epochs.empty()) return std::nullopt;
    return epochs.back().epoch;
  }
};

template <typename Scalar = double>
struct TrainOptions {
  ReadScheme<Scalar> read_scheme{};
  bool snapshot_conductances = true;
};

/// Evaluates every sample on the current crossbar state.
template <typename Scalar>
EpochRecord<Scalar> evaluate(const Crossbar<Scalar>& xbar, const PerceptronConfig<Scalar>& cfg,
                             const std::vector<Sample<Scalar>>& samples,
                             const ReadScheme<Scalar>& scheme) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  EpochRecord<Scalar> rec;
  rec.currents.resize(n, cfg.n_outputs);
  rec.activations.resize(n, cfg.n_outputs);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto out = forward(xbar, cfg, samples[k].voltages, scheme);
    rec.currents.row(k) = out.currents.transpose();
    rec.activations.row(k) = out.activations.transpose();
    if (classify(out.activations) != std::optional<Eigen::Index>(samples[k].label)) {
      ++rec.n_errors;
    }
  }
  return rec;
}

/// In-situ batch training with fixed-amplitude pulses. Each epoch evaluates
/// all patterns; training stops as soon as an epoch starts with zero errors.
/// Otherwise the delta-rule increments are summed, reduced to signs, and
/// written as one set and one reset pulse per half-column.
template <typename Scalar>
TrainingLog<Scalar> train(Crossbar<Scalar>& xbar, const PerceptronConfig<Scalar>& cfg,
                          const std::vector<Sample<Scalar>>& samples, int max_epochs, Rng& rng,
                          const TrainOptions<Scalar>& options = {}) {
  cfg.validate();
  if (samples.empty()) throw std::invalid_argument("train: empty dataset");
  if (xbar.rows() != cfg.crossbar_rows() || xbar.cols() != cfg.crossbar_cols()) {
    throw std::invalid_argument("train: crossbar shape does not match the perceptron");
  }

  TrainingLog<Scalar> log;
  for (const auto& s : samples) {
    if (s.label < 0 || s.label >= cfg.n_outputs) {
      throw std::invalid_argument("train: sample label out of range");
    }
    log.labels.push_back(s.label);
  }

  DeltaAccumulator<Scalar> acc(cfg.n_outputs, cfg.n_inputs);
  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    EpochRecord<Scalar> rec = evaluate(xbar, cfg, samples, options.read_scheme);
    rec.epoch = epoch;
    if (options.snapshot_conductances) rec.conductances = xbar.conductances();
    const bool done = rec.n_errors == 0;

    if (!done) {
      acc.reset();
      Vector<Scalar> errors(cfg.n_outputs);
      for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        for (Eigen::Index i = 0; i < cfg.n_outputs; ++i) {
          const Scalar target = i == samples[k].label ? cfg.target_high : cfg.target_low;
          errors(i) = compute_error(rec.activations(row, i), target, rec.currents(row, i), cfg);
        }
        accumulate(acc, errors, samples[k].voltages);
      }
      for (const auto& plan : build_write_plans(epoch_signs(acc))) {
        const Scalar v = plan.polarity == Polarity::kSet ? cfg.v_write_set : cfg.v_write_reset;
        apply_write_plan(xbar, plan, v, rng);
      }
    }

    log.epochs.push_back(std::move(rec));
    if (done) {
      log.converged = true;
      break;
    }
  }
  return log;
}

}  // namespace memxbar
