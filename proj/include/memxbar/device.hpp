#pragma once

#include "memxbar/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace memxbar {

/// One (conductance, conductance change) calibration point, both in siemens.
template <typename Scalar = double>
struct Anchor {
  Scalar g;
  Scalar delta_g;
};

enum class Polarity { kSet, kReset };

/// Behavioral switching model of a single Al2O3/TiO2-x memristor.
///
/// A full-amplitude pulse changes the conductance by an amount interpolated
/// piecewise-linearly in the present conductance from the polarity's anchor
/// list. Smaller amplitudes scale the change linearly from zero at
/// `v_threshold` to one at `v_write`; at or below the threshold a pulse has no
/// effect at all.
template <typename Scalar = double>
struct SwitchingModel {
  std::vector<Anchor<Scalar>> set_anchors{{micro<Scalar>(20), micro<Scalar>(60)},
                                          {micro<Scalar>(65), micro<Scalar>(24)}};
  std::vector<Anchor<Scalar>> reset_anchors{{micro<Scalar>(20), micro<Scalar>(-5)},
                                            {micro<Scalar>(65), micro<Scalar>(-55)}};
  Scalar g_min = micro<Scalar>(10);
  Scalar g_max = micro<Scalar>(100);
  Scalar v_write = Scalar(1.3);
  Scalar v_threshold = Scalar(1.0);
  Scalar noise_sigma = Scalar(0);
  Scalar pulse_width = Scalar(500e-6);  // metadata only

  /// Throws std::invalid_argument when any invariant is violated.
  void validate() const {
    if (!(g_min > 0) || !(g_min < g_max)) {
      throw std::invalid_argument("switching model: require 0 < g_min < g_max");
    }
    if (!(v_threshold > 0) || !(v_threshold < v_write)) {
      throw std::invalid_argument("switching model: require 0 < v_threshold < v_write");
    }
    if (!(noise_sigma >= 0)) {
      throw std::invalid_argument("switching model: noise_sigma must be >= 0");
    }
    check_anchors(set_anchors, Polarity::kSet);
    check_anchors(reset_anchors, Polarity::kReset);
  }

  const std::vector<Anchor<Scalar>>& anchors(Polarity p) const {
    return p == Polarity::kSet ? set_anchors : reset_anchors;
  }

 private:
  static void check_anchors(const std::vector<Anchor<Scalar>>& list, Polarity p) {
    const std::string name = p == Polarity::kSet ? "set" : "reset";
    if (list.empty()) {
      throw std::invalid_argument("switching model: " + name + " anchors are empty");
    }
    for (std::size_t k = 0; k < list.size(); ++k) {
      const auto& a = list[k];
      if (p == Polarity::kSet ? a.delta_g < 0 : a.delta_g > 0) {
        throw std::invalid_argument("switching model: " + name + " anchor has wrong-sign delta");
      }
      if (k > 0 && !(list[k - 1].g < a.g)) {
        throw std::invalid_argument("switching model: " + name +
                                    " anchors must have strictly increasing conductance");
      }
    }
  }
};

template <typename Scalar = double>
struct DeviceState {
  Scalar conductance;
};

/// Initial-state sampling window; `init_window` is the full width.
template <typename Scalar = double>
struct VariabilitySpec {
  Scalar init_center = micro<Scalar>(35);
  Scalar init_window = micro<Scalar>(5);
  std::uint64_t rng_seed = 1;
};

/// Read current of a device, I = G * V. Rejects reads that would disturb the
/// state, i.e. |v_read| above the model's switching threshold.
template <typename Scalar>
Scalar read_current(const DeviceState<Scalar>& state, Scalar v_read,
                    const SwitchingModel<Scalar>& model) {
  if (std::abs(v_read) > model.v_threshold) {
    throw std::invalid_argument("read_current: |v_read| exceeds the switching threshold");
  }
  return state.conductance * v_read;
}

/// Full-amplitude conductance change at conductance `g`, before noise and
/// clamping. Constant outside the outermost anchors, and never of the wrong
/// sign for the polarity.
template <typename Scalar>
Scalar full_delta(const SwitchingModel<Scalar>& model, Polarity polarity, Scalar g) {
  const auto& list = model.anchors(polarity);
  Scalar delta;
  if (g <= list.front().g) {
    delta = list.front().delta_g;
  } else if (g >= list.back().g) {
    delta = list.back().delta_g;
  } else {
    auto hi = std::upper_bound(list.begin(), list.end(), g,
                               [](Scalar x, const Anchor<Scalar>& a) { return x < a.g; });
    auto lo = std::prev(hi);
    const Scalar t = (g - lo->g) / (hi->g - lo->g);
    delta = lo->delta_g + t * (hi->delta_g - lo->delta_g);
  }
  return polarity == Polarity::kSet ? std::max(delta, Scalar(0)) : std::min(delta, Scalar(0));
}

/// Fraction of the full-amplitude change produced by a pulse of `amplitude`.
template <typename Scalar>
Scalar amplitude_scale(const SwitchingModel<Scalar>& model, Scalar amplitude) {
  const Scalar s = (std::abs(amplitude) - model.v_threshold) / (model.v_write - model.v_threshold);
  return std::clamp(s, Scalar(0), Scalar(1));
}

/// Applies one write pulse. Positive amplitudes set, negative reset; pulses
/// with |amplitude| <= v_threshold leave the state bit-identical and draw no
/// random numbers.
template <typename Scalar>
DeviceState<Scalar> apply_pulse(DeviceState<Scalar> state, Scalar amplitude,
                                const SwitchingModel<Scalar>& model, Rng& rng) {
  if (std::abs(amplitude) <= model.v_threshold) return state;
  const Polarity polarity = amplitude > 0 ? Polarity::kSet : Polarity::kReset;
  Scalar delta = full_delta(model, polarity, state.conductance) * amplitude_scale(model, amplitude);
  if (model.noise_sigma > 0) {
    std::normal_distribution<Scalar> noise(Scalar(0), model.noise_sigma);
    delta *= Scalar(1) + noise(rng);
  }
  state.conductance = std::clamp(state.conductance + delta, model.g_min, model.g_max);
  return state;
}

/// Uniform draw from the initialization window intersected with
/// [g_min, g_max].
template <typename Scalar>
DeviceState<Scalar> sample_initial(const VariabilitySpec<Scalar>& spec,
                                   const SwitchingModel<Scalar>& model, Rng& rng) {
  if (spec.init_center < model.g_min || spec.init_center > model.g_max) {
    throw std::invalid_argument("sample_initial: init_center outside [g_min, g_max]");
  }
  if (spec.init_window < 0) {
    throw std::invalid_argument("sample_initial: negative init_window");
  }
  const Scalar lo = std::max(spec.init_center - spec.init_window / 2, model.g_min);
  const Scalar hi = std::min(spec.init_center + spec.init_window / 2, model.g_max);
  if (lo > hi) {
    throw std::invalid_argument("sample_initial: empty initialization window");
  }
  if (lo == hi) return {lo};
  std::uniform_real_distribution<Scalar> dist(lo, hi);
  return {dist(rng)};
}

}  // namespace memxbar
