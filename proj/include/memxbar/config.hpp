#pragma once

#include "memxbar/crossbar.hpp"
#include "memxbar/device.hpp"
#include "memxbar/perceptron.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace memxbar {

/// Everything a run depends on. Together with the seed it fully determines
/// every output byte. Conductances are held in siemens; the JSON file uses uS.
struct ExperimentConfig {
  SwitchingModel<double> device;
  VariabilitySpec<double> variability;
  PerceptronConfig<double> perceptron;
  ReadScheme<double> read_scheme;
  double r_top_line = 800.0;     // ohms, whole row wire
  double r_bottom_line = 600.0;  // ohms, whole column wire
  std::optional<std::filesystem::path> templates_file;

  std::uint64_t seed = 1;
  int max_epochs = 50;
  int n_runs = 100;      // per sweep center
  int train_runs = 1;    // independent initial states for `train`
  int threads = 0;       // 0 = hardware concurrency
  std::filesystem::path output_dir = "out";

  std::vector<double> sweep_centers = default_sweep_centers();

  double pulse_start_g = 20e-6;
  double pulse_amplitude = 1.3;
  int n_pulses = 20;

  std::vector<double> curve_amplitudes{-1.3, -1.2, -1.1, 1.1, 1.2, 1.3};
  double curve_g_step = 1e-6;

  /// 12.5, 20, 27.5, ..., 97.5 uS.
  static std::vector<double> default_sweep_centers();

  /// Throws std::invalid_argument on any inconsistent field.
  void validate() const;
};

/// Parses a JSON config; keys absent from the file keep their defaults and
/// unknown keys are rejected. Throws std::runtime_error on malformed input.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON rendering of every field (uS units, as in the file).
std::string config_to_json(const ExperimentConfig& cfg);

/// 16-hex-digit FNV-1a hash of the canonical JSON, excluding output_dir and
/// threads.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace memxbar
