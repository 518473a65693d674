#pragma once

#include "memxbar/device.hpp"
#include "memxbar/nodal.hpp"
#include "memxbar/types.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace memxbar {

enum class ReadMode { kIdeal, kNodal };

template <typename Scalar = double>
struct ReadScheme {
  ReadMode mode = ReadMode::kIdeal;
  Scalar v_read = Scalar(0.1);
};

/// One half-column write step of the V/2 scheme. Selected rows are biased at
/// +V/2 for a set (-V/2 for a reset), the selected column at the opposite
/// half-voltage, every other line at 0 V.
struct WritePulsePlan {
  Eigen::Index column = 0;
  Polarity polarity = Polarity::kSet;
  RowMask row_mask;
};

/// R x C grid of memristors. Row wires carry the inputs, column wires end in
/// virtual grounds.
template <typename Scalar = double>
class Crossbar {
 public:
  /// Wire resistances are given as whole-line totals and split evenly over the
  /// (crosspoints - 1) segments of each line.
  Crossbar(Eigen::Index rows, Eigen::Index cols, SwitchingModel<Scalar> model,
           Scalar r_row_line = Scalar(800), Scalar r_col_line = Scalar(600))
      : g_(Grid<Scalar>::Constant(rows, cols, model.g_min)), model_(std::move(model)) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("Crossbar: empty grid");
    if (r_row_line < 0 || r_col_line < 0) {
      throw std::invalid_argument("Crossbar: negative wire resistance");
    }
    model_.validate();
    r_row_segment_ = cols > 1 ? r_row_line / Scalar(cols - 1) : Scalar(0);
    r_col_segment_ = rows > 1 ? r_col_line / Scalar(rows - 1) : Scalar(0);
  }

  Eigen::Index rows() const { return g_.rows(); }
  Eigen::Index cols() const { return g_.cols(); }

  const Grid<Scalar>& conductances() const { return g_; }

  /// Replaces the whole grid; values are clamped into [g_min, g_max].
  void set_conductances(const Grid<Scalar>& g) {
    if (g.rows() != rows() || g.cols() != cols()) {
      throw std::invalid_argument("Crossbar: conductance grid shape mismatch");
    }
    g_ = g.cwiseMax(model_.g_min).cwiseMin(model_.g_max);
  }

  Scalar& at(Eigen::Index row, Eigen::Index col) { return g_(row, col); }
  Scalar at(Eigen::Index row, Eigen::Index col) const { return g_(row, col); }

  const SwitchingModel<Scalar>& model() const { return model_; }

  Scalar r_row_segment() const { return r_row_segment_; }
  Scalar r_col_segment() const { return r_col_segment_; }

  void set_segment_resistances(Scalar r_row_segment, Scalar r_col_segment) {
    if (r_row_segment < 0 || r_col_segment < 0) {
      throw std::invalid_argument("Crossbar: negative wire resistance");
    }
    r_row_segment_ = r_row_segment;
    r_col_segment_ = r_col_segment;
  }

 private:
  Grid<Scalar> g_;
  SwitchingModel<Scalar> model_;
  Scalar r_row_segment_ = Scalar(0);
  Scalar r_col_segment_ = Scalar(0);
};

/// Currents sunk by the column virtual grounds for the given row voltages.
/// Ideal mode is the plain product G^T V; nodal mode solves the full
/// resistive network including wire segments.
template <typename Scalar>
Vector<Scalar> read_column_currents(const Crossbar<Scalar>& xbar,
                                    const Vector<Scalar>& row_voltages,
                                    const ReadScheme<Scalar>& scheme = {}) {
  if (row_voltages.size() != xbar.rows()) {
    throw std::invalid_argument("read_column_currents: voltage vector length != rows");
  }
  if ((row_voltages.array().abs() > xbar.model().v_threshold).any()) {
    throw std::invalid_argument("read_column_currents: read voltage would disturb devices");
  }
  if (scheme.mode == ReadMode::kIdeal) {
    return xbar.conductances().transpose() * row_voltages;
  }
  return nodal_column_currents(xbar.conductances(), row_voltages, xbar.r_row_segment(),
                               xbar.r_col_segment());
}

/// Applies one V/2-scheme pulse of magnitude `v_write` to the crossbar. Every
/// device sees (row bias - column bias); half-selected devices therefore get
/// |v_write|/2 and only change if that exceeds the switching threshold.
template <typename Scalar>
void apply_write_plan(Crossbar<Scalar>& xbar, const WritePulsePlan& plan, Scalar v_write,
                      Rng& rng) {
  if (plan.column < 0 || plan.column >= xbar.cols()) {
    throw std::out_of_range("apply_write_plan: column index out of range");
  }
  if (plan.row_mask.size() != xbar.rows()) {
    throw std::invalid_argument("apply_write_plan: row mask length != rows");
  }
  const Scalar half = std::abs(v_write) / 2;
  const Scalar sign = plan.polarity == Polarity::kSet ? Scalar(1) : Scalar(-1);
  for (Eigen::Index i = 0; i < xbar.rows(); ++i) {
    const Scalar v_row = plan.row_mask(i) ? sign * half : Scalar(0);
    for (Eigen::Index j = 0; j < xbar.cols(); ++j) {
      const Scalar v_col = j == plan.column ? -sign * half : Scalar(0);
      const Scalar v = v_row - v_col;
      if (v == Scalar(0)) continue;
      xbar.at(i, j) = apply_pulse(DeviceState<Scalar>{xbar.at(i, j)}, v, xbar.model(), rng)
                          .conductance;
    }
  }
}

/// Independently samples every device, row-major, from `spec`.
template <typename Scalar>
void init_conductances(Crossbar<Scalar>& xbar, const VariabilitySpec<Scalar>& spec, Rng& rng) {
  for (Eigen::Index i = 0; i < xbar.rows(); ++i)
    for (Eigen::Index j = 0; j < xbar.cols(); ++j)
      xbar.at(i, j) = sample_initial(spec, xbar.model(), rng).conductance;
}

}  // namespace memxbar
