// Command-line front end: train, sweep, pulse-train, histograms, device-curves.

#include "memxbar/config.hpp"
#include "memxbar/experiment.hpp"
#include "memxbar/plot.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> max_epochs;
  bool svg = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("-c,--config", opt.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("-s,--seed", opt.seed, "master seed (overrides config)");
  cmd->add_option("-o,--out", opt.out_dir, "output directory (overrides config)");
  cmd->add_option("--max-epochs", opt.max_epochs, "epoch cap (overrides config)");
  cmd->add_flag("--svg", opt.svg, "also write SVG charts");
}

memxbar::ExperimentConfig resolve(const CommonOptions& opt) {
  memxbar::ExperimentConfig cfg =
      opt.config_path.empty() ? memxbar::ExperimentConfig{} : memxbar::load_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;
  if (opt.max_epochs) cfg.max_epochs = *opt.max_epochs;
  return cfg;
}

void report(const std::filesystem::path& p) { std::cout << "wrote " << p.string() << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memristor crossbar perceptron simulator"};
  app.require_subcommand(1);

  CommonOptions train_opt;
  std::optional<int> train_runs;
  auto* train_cmd = app.add_subcommand("train", "train the perceptron from one or more initial states");
  add_common(train_cmd, train_opt);
  train_cmd->add_option("-r,--runs", train_runs, "number of independent initial states");

  CommonOptions sweep_opt;
  std::optional<int> sweep_runs;
  std::optional<int> sweep_threads;
  std::vector<double> sweep_centers;
  auto* sweep_cmd = app.add_subcommand("sweep", "convergence vs initial-conductance sweep");
  add_common(sweep_cmd, sweep_opt);
  sweep_cmd->add_option("-r,--runs", sweep_runs, "runs per center");
  sweep_cmd->add_option("--centers", sweep_centers, "init centers in uS");
  sweep_cmd->add_option("-j,--threads", sweep_threads, "worker threads (0 = all cores)");

  CommonOptions pulse_opt;
  std::optional<double> pulse_start;
  std::optional<double> pulse_amp;
  std::optional<int> pulse_count;
  auto* pulse_cmd = app.add_subcommand("pulse-train", "repeated identical pulses on one device");
  add_common(pulse_cmd, pulse_opt);
  pulse_cmd->add_option("--start-us", pulse_start, "initial conductance in uS");
  pulse_cmd->add_option("--amplitude", pulse_amp, "pulse amplitude in V (sign = polarity)");
  pulse_cmd->add_option("-n,--pulses", pulse_count, "number of pulses");

  CommonOptions hist_opt;
  auto* hist_cmd = app.add_subcommand("histograms", "initial/final output gaps and weights of one run");
  add_common(hist_cmd, hist_opt);

  CommonOptions curve_opt;
  auto* curve_cmd = app.add_subcommand("device-curves", "conductance change vs initial conductance");
  add_common(curve_cmd, curve_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      auto cfg = resolve(train_opt);
      if (train_runs) cfg.train_runs = *train_runs;
      const auto run = memxbar::run_training(cfg, train_opt.svg);
      for (std::size_t r = 0; r < run.logs.size(); ++r) {
        const auto e = run.logs[r].epochs_to_convergence();
        std::cout << "run " << r << ": "
                  << (e ? "converged at epoch " + std::to_string(*e) : std::string("not converged"))
                  << '\n';
      }
      for (const auto& f : run.files) report(f);
    } else if (*sweep_cmd) {
      auto cfg = resolve(sweep_opt);
      if (sweep_runs) cfg.n_runs = *sweep_runs;
      if (sweep_threads) cfg.threads = *sweep_threads;
      if (!sweep_centers.empty()) {
        cfg.sweep_centers.clear();
        for (double c : sweep_centers) cfg.sweep_centers.push_back(c * memxbar::kMicro);
      }
      cfg.validate();
      const auto cells = memxbar::run_init_sweep(cfg, cfg.sweep_centers);
      const auto path = cfg.output_dir / "sweep.csv";
      memxbar::write_sweep_csv(path, cells);
      report(path);
      if (sweep_opt.svg) {
        memxbar::Series pct{"convergence %", {}, {}};
        for (const auto& c : cells) {
          pct.x.push_back(c.center / memxbar::kMicro);
          pct.y.push_back(c.convergence_pct);
        }
        const auto svg = cfg.output_dir / "sweep.svg";
        memxbar::write_line_chart_svg(svg, "Convergence vs initial conductance", "center (uS)",
                                      "converged runs (%)", {pct});
        report(svg);
      }
    } else if (*pulse_cmd) {
      auto cfg = resolve(pulse_opt);
      if (pulse_start) cfg.pulse_start_g = *pulse_start * memxbar::kMicro;
      if (pulse_amp) cfg.pulse_amplitude = *pulse_amp;
      if (pulse_count) cfg.n_pulses = *pulse_count;
      cfg.validate();
      memxbar::Rng rng(memxbar::derive_seed(cfg.seed, 0, 0));
      const auto g = memxbar::run_pulse_train(cfg.device, cfg.pulse_start_g, cfg.pulse_amplitude,
                                              cfg.n_pulses, rng);
      const auto path = cfg.output_dir / "pulse_train.csv";
      memxbar::write_pulse_train_csv(path, g);
      report(path);
      if (pulse_opt.svg) {
        memxbar::Series s{"G", {}, {}};
        for (std::size_t k = 0; k < g.size(); ++k) {
          s.x.push_back(static_cast<double>(k));
          s.y.push_back(g[k] / memxbar::kMicro);
        }
        const auto svg = cfg.output_dir / "pulse_train.svg";
        memxbar::write_line_chart_svg(svg, "Conductance under a pulse train", "pulse",
                                      "conductance (uS)", {s});
        report(svg);
      }
    } else if (*hist_cmd) {
      auto cfg = resolve(hist_opt);
      cfg.validate();
      const auto set = memxbar::load_dataset(cfg);
      const auto log = memxbar::run_single(cfg, set, memxbar::derive_seed(cfg.seed, 0, 0));
      const auto data = memxbar::dump_histograms(log);
      const auto gaps = cfg.output_dir / "histogram_gaps.csv";
      const auto weights = cfg.output_dir / "histogram_weights.csv";
      memxbar::write_histogram_csvs(gaps, weights, data);
      report(gaps);
      report(weights);
      const auto g0 = cfg.output_dir / "conductances_initial.csv";
      const auto g1 = cfg.output_dir / "conductances_final.csv";
      memxbar::write_grid_csv(g0, *log.epochs.front().conductances);
      memxbar::write_grid_csv(g1, *log.epochs.back().conductances);
      report(g0);
      report(g1);
    } else if (*curve_cmd) {
      auto cfg = resolve(curve_opt);
      cfg.validate();
      const auto points = memxbar::device_curves(cfg);
      const auto path = cfg.output_dir / "device_curves.csv";
      memxbar::write_device_curves_csv(path, points);
      report(path);
      if (curve_opt.svg) {
        std::vector<memxbar::Series> series;
        for (const auto& p : points) {
          const std::string label = std::to_string(p.amplitude).substr(0, 5) + " V";
          if (series.empty() || series.back().label != label) series.push_back({label, {}, {}});
          series.back().x.push_back(p.g_initial / memxbar::kMicro);
          series.back().y.push_back(p.delta_g / memxbar::kMicro);
        }
        const auto svg = cfg.output_dir / "device_curves.svg";
        memxbar::write_line_chart_svg(svg, "Conductance change per pulse", "initial G (uS)",
                                      "delta G (uS)", series);
        report(svg);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
