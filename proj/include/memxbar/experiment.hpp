#pragma once

#include "memxbar/config.hpp"
#include "memxbar/dataset.hpp"
#include "memxbar/training.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace memxbar {

/// splitmix64 finalizer.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed of run `run` in stream `stream` (0 = train, 1 + k = sweep center k):
/// mix(mix(mix(master) ^ stream) ^ run). Streams are independent of how the
/// runs are scheduled.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t run);

/// Dataset named by the config (templates file or the default set).
PatternSet load_dataset(const ExperimentConfig& cfg);

/// One complete training run: fresh crossbar, initialization, training.
TrainingLog<double> run_single(const ExperimentConfig& cfg, const PatternSet& set,
                               std::uint64_t seed);

struct TrainingRun {
  std::vector<TrainingLog<double>> logs;  // one per initial state
  std::vector<std::filesystem::path> files;
};

/// Trains cfg.train_runs independent initial states and writes
/// training_log.csv and class_means.csv (plus SVG when requested) into
/// cfg.output_dir.
TrainingRun run_training(const ExperimentConfig& cfg, bool write_svg = false);

struct SweepCell {
  double center = 0;  // siemens
  int runs = 0;
  int converged = 0;
  int failed = 0;
  double convergence_pct = 0;
  std::optional<double> mean_epochs;  // among converged runs
};

/// n_runs seeded trainings per center, window and epoch cap from cfg.
/// Runs execute on cfg.threads workers; results are reduced in run order.
std::vector<SweepCell> run_init_sweep(const ExperimentConfig& cfg,
                                      const std::vector<double>& centers);

/// Conductance before and after each of `n_pulses` identical pulses
/// (n_pulses + 1 values).
std::vector<double> run_pulse_train(const SwitchingModel<double>& model, double start_g,
                                    double amplitude, int n_pulses, Rng& rng);

struct GapPoint {
  int pattern = 0;
  int true_class = 0;
  int other_class = 0;
  double gap = 0;  // I_k(n) - I_l(n), amperes
};

struct HistogramData {
  std::vector<GapPoint> initial_gaps;
  std::vector<GapPoint> final_gaps;
  Grid<double> initial_weights;  // n_inputs x n_outputs, siemens
  Grid<double> final_weights;
};

/// Output-current gaps I_k(n) - I_l(n) for every pattern n of class k and
/// every other class l, and the differential weights, at the first and last
/// logged epochs. Throws std::invalid_argument if the log lacks epochs or
/// conductance snapshots.
HistogramData dump_histograms(const TrainingLog<double>& log);

/// Deterministic full-model conductance change vs initial conductance for
/// each configured amplitude.
struct CurvePoint {
  double amplitude = 0;
  double g_initial = 0;
  double delta_g = 0;
};
std::vector<CurvePoint> device_curves(const ExperimentConfig& cfg);

// CSV writers. Conductances are written in uS, currents in uA.
void write_training_csv(const std::filesystem::path& path,
                        const std::vector<TrainingLog<double>>& logs);
void write_class_means_csv(const std::filesystem::path& path,
                           const std::vector<TrainingLog<double>>& logs);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepCell>& cells);
void write_pulse_train_csv(const std::filesystem::path& path, const std::vector<double>& g);
void write_histogram_csvs(const std::filesystem::path& gaps_path,
                          const std::filesystem::path& weights_path, const HistogramData& data);
void write_device_curves_csv(const std::filesystem::path& path,
                             const std::vector<CurvePoint>& points);

/// Row-major conductance grid in uS, comma separated.
void write_grid_csv(const std::filesystem::path& path, const Grid<double>& g);
Grid<double> read_grid_csv(const std::filesystem::path& path);

}  // namespace memxbar
