#include "memxbar/experiment.hpp"

#include "memxbar/crossbar.hpp"
#include "memxbar/plot.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace memxbar {

namespace {

std::string num(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

double min_correct_margin(const EpochRecord<double>& rec, const std::vector<Eigen::Index>& labels) {
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n < rec.activations.rows(); ++n) {
    const Eigen::Index k = labels[static_cast<std::size_t>(n)];
    double other = -std::numeric_limits<double>::infinity();
    for (Eigen::Index l = 0; l < rec.activations.cols(); ++l) {
      if (l != k) other = std::max(other, rec.activations(n, l));
    }
    margin = std::min(margin, rec.activations(n, k) - other);
  }
  return margin;
}

unsigned worker_count(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t run) {
  return mix_seed(mix_seed(mix_seed(master) ^ stream) ^ run);
}

PatternSet load_dataset(const ExperimentConfig& cfg) {
  PatternSet set =
      cfg.templates_file ? build_pattern_set(load_templates(*cfg.templates_file)) : build_default_set();
  if (static_cast<Eigen::Index>(set.base_images.size()) != cfg.perceptron.n_outputs) {
    throw std::invalid_argument("dataset: number of base images must equal n_outputs");
  }
  return set;
}

TrainingLog<double> run_single(const ExperimentConfig& cfg, const PatternSet& set,
                               std::uint64_t seed) {
  Crossbar<double> xbar(cfg.perceptron.crossbar_rows(), cfg.perceptron.crossbar_cols(),
                        cfg.device, cfg.r_top_line, cfg.r_bottom_line);
  Rng rng(seed);
  VariabilitySpec<double> spec = cfg.variability;
  spec.rng_seed = seed;
  init_conductances(xbar, spec, rng);
  TrainOptions<double> options;
  options.read_scheme = cfg.read_scheme;
  auto log = train(xbar, cfg.perceptron, to_samples(set, cfg.perceptron), cfg.max_epochs, rng,
                   options);
  log.seed = seed;
  log.config_hash = config_hash(cfg);
  return log;
}

TrainingRun run_training(const ExperimentConfig& cfg, bool write_svg) {
  cfg.validate();
  const PatternSet set = load_dataset(cfg);
  TrainingRun result;
  for (int r = 0; r < cfg.train_runs; ++r) {
    result.logs.push_back(run_single(cfg, set, derive_seed(cfg.seed, 0, static_cast<std::uint64_t>(r))));
  }
  result.files.push_back(cfg.output_dir / "training_log.csv");
  write_training_csv(result.files.back(), result.logs);
  result.files.push_back(cfg.output_dir / "class_means.csv");
  write_class_means_csv(result.files.back(), result.logs);
  if (write_svg) {
    std::vector<Series> series;
    for (std::size_t r = 0; r < result.logs.size(); ++r) {
      Series s{"run " + std::to_string(r), {}, {}};
      for (const auto& rec : result.logs[r].epochs) {
        s.x.push_back(rec.epoch);
        s.y.push_back(rec.n_errors);
      }
      series.push_back(std::move(s));
    }
    result.files.push_back(cfg.output_dir / "training_errors.svg");
    write_line_chart_svg(result.files.back(), "Misclassified patterns per epoch", "epoch",
                         "misclassified", series);
  }
  return result;
}

std::vector<SweepCell> run_init_sweep(const ExperimentConfig& cfg,
                                      const std::vector<double>& centers) {
  cfg.validate();
  const PatternSet set = load_dataset(cfg);
  const std::size_t runs = static_cast<std::size_t>(cfg.n_runs);
  const std::size_t total = centers.size() * runs;
  std::vector<std::optional<int>> outcome(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const std::size_t c = task / runs;
      const std::size_t r = task % runs;
      ExperimentConfig local = cfg;
      local.variability.init_center = centers[c];
      const auto log = run_single(local, set, derive_seed(cfg.seed, 1 + c, r));
      outcome[task] = log.epochs_to_convergence();
    }
  };
  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(cfg.threads), std::max<std::size_t>(total, 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  std::vector<SweepCell> cells;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    SweepCell cell;
    cell.center = centers[c];
    cell.runs = cfg.n_runs;
    double sum = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      if (const auto& e = outcome[c * runs + r]) {
        ++cell.converged;
        sum += *e;
      }
    }
    cell.failed = cell.runs - cell.converged;
    cell.convergence_pct = 100.0 * cell.converged / cell.runs;
    if (cell.converged > 0) cell.mean_epochs = sum / cell.converged;
    cells.push_back(cell);
  }
  return cells;
}

std::vector<double> run_pulse_train(const SwitchingModel<double>& model, double start_g,
                                    double amplitude, int n_pulses, Rng& rng) {
  model.validate();
  std::vector<double> g{start_g};
  DeviceState<double> state{start_g};
  for (int k = 0; k < n_pulses; ++k) {
    state = apply_pulse(state, amplitude, model, rng);
    g.push_back(state.conductance);
  }
  return g;
}

HistogramData dump_histograms(const TrainingLog<double>& log) {
  if (log.epochs.empty()) throw std::invalid_argument("dump_histograms: log has no epochs");
  const auto& first = log.epochs.front();
  const auto& last = log.epochs.back();
  if (!first.conductances || !last.conductances) {
    throw std::invalid_argument("dump_histograms: missing conductance snapshots");
  }
  auto gaps = [&](const EpochRecord<double>& rec) {
    std::vector<GapPoint> out;
    for (Eigen::Index n = 0; n < rec.currents.rows(); ++n) {
      const auto k = log.labels[static_cast<std::size_t>(n)];
      for (Eigen::Index l = 0; l < rec.currents.cols(); ++l) {
        if (l == k) continue;
        out.push_back({static_cast<int>(n), static_cast<int>(k), static_cast<int>(l),
                       rec.currents(n, k) - rec.currents(n, l)});
      }
    }
    return out;
  };
  auto weights = [](const Grid<double>& g) {
    Grid<double> w(g.rows(), g.cols() / 2);
    for (Eigen::Index i = 0; i < w.cols(); ++i) w.col(i) = g.col(2 * i) - g.col(2 * i + 1);
    return w;
  };
  return {gaps(first), gaps(last), weights(*first.conductances), weights(*last.conductances)};
}

std::vector<CurvePoint> device_curves(const ExperimentConfig& cfg) {
  cfg.device.validate();
  std::vector<CurvePoint> out;
  Rng unused(0);
  SwitchingModel<double> model = cfg.device;
  model.noise_sigma = 0;
  const int steps = static_cast<int>(std::floor((model.g_max - model.g_min) / cfg.curve_g_step + 1e-9));
  for (double amplitude : cfg.curve_amplitudes) {
    for (int k = 0; k <= steps; ++k) {
      const double g = model.g_min + k * cfg.curve_g_step;
      const double after = apply_pulse(DeviceState<double>{g}, amplitude, model, unused).conductance;
      out.push_back({amplitude, g, after - g});
    }
  }
  return out;
}

void write_training_csv(const std::filesystem::path& path,
                        const std::vector<TrainingLog<double>>& logs) {
  auto out = open_out(path);
  Eigen::Index n_classes = 0;
  for (const auto& log : logs)
    if (!log.epochs.empty()) n_classes = std::max(n_classes, log.epochs.front().currents.cols());
  out << "run,seed,epoch,n_errors,min_correct_margin";
  for (Eigen::Index c = 0; c < n_classes; ++c) out << ",mean_abs_I_uA_class" << c;
  out << '\n';
  for (std::size_t r = 0; r < logs.size(); ++r) {
    const auto& log = logs[r];
    for (const auto& rec : log.epochs) {
      out << r << ',' << log.seed << ',' << rec.epoch << ',' << rec.n_errors << ','
          << num(min_correct_margin(rec, log.labels));
      for (Eigen::Index c = 0; c < n_classes; ++c) {
        double sum = 0;
        int count = 0;
        for (Eigen::Index n = 0; n < rec.currents.rows(); ++n) {
          if (log.labels[static_cast<std::size_t>(n)] != c) continue;
          sum += std::abs(rec.currents(n, c));
          ++count;
        }
        out << ',' << num(count ? sum / count / kMicro : 0.0);
      }
      out << '\n';
    }
  }
}

void write_class_means_csv(const std::filesystem::path& path,
                           const std::vector<TrainingLog<double>>& logs) {
  auto out = open_out(path);
  out << "run,epoch,class,output,mean_activation,mean_current_uA\n";
  for (std::size_t r = 0; r < logs.size(); ++r) {
    const auto& log = logs[r];
    for (const auto& rec : log.epochs) {
      for (Eigen::Index c = 0; c < rec.activations.cols(); ++c) {
        for (Eigen::Index o = 0; o < rec.activations.cols(); ++o) {
          double f = 0;
          double i = 0;
          int count = 0;
          for (Eigen::Index n = 0; n < rec.activations.rows(); ++n) {
            if (log.labels[static_cast<std::size_t>(n)] != c) continue;
            f += rec.activations(n, o);
            i += rec.currents(n, o);
            ++count;
          }
          if (count == 0) continue;
          out << r << ',' << rec.epoch << ',' << c << ',' << o << ',' << num(f / count) << ','
              << num(i / count / kMicro) << '\n';
        }
      }
    }
  }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepCell>& cells) {
  auto out = open_out(path);
  out << "center_uS,runs,converged,failed,convergence_pct,mean_epochs\n";
  for (const auto& c : cells) {
    out << num(c.center / kMicro) << ',' << c.runs << ',' << c.converged << ',' << c.failed << ','
        << num(c.convergence_pct) << ',' << (c.mean_epochs ? num(*c.mean_epochs) : "") << '\n';
  }
}

void write_pulse_train_csv(const std::filesystem::path& path, const std::vector<double>& g) {
  auto out = open_out(path);
  out << "pulse,conductance_uS\n";
  for (std::size_t k = 0; k < g.size(); ++k) out << k << ',' << num(g[k] / kMicro) << '\n';
}

void write_histogram_csvs(const std::filesystem::path& gaps_path,
                          const std::filesystem::path& weights_path, const HistogramData& data) {
  {
    auto out = open_out(gaps_path);
    out << "stage,pattern,true_class,other_class,gap_uA\n";
    auto emit = [&](const char* stage, const std::vector<GapPoint>& pts) {
      for (const auto& p : pts) {
        out << stage << ',' << p.pattern << ',' << p.true_class << ',' << p.other_class << ','
            << num(p.gap / kMicro) << '\n';
      }
    };
    emit("initial", data.initial_gaps);
    emit("final", data.final_gaps);
  }
  auto out = open_out(weights_path);
  out << "stage,output,input,weight_uS\n";
  auto emit = [&](const char* stage, const Grid<double>& w) {
    for (Eigen::Index i = 0; i < w.cols(); ++i)
      for (Eigen::Index j = 0; j < w.rows(); ++j)
        out << stage << ',' << i << ',' << j << ',' << num(w(j, i) / kMicro) << '\n';
  };
  emit("initial", data.initial_weights);
  emit("final", data.final_weights);
}

void write_device_curves_csv(const std::filesystem::path& path,
                             const std::vector<CurvePoint>& points) {
  auto out = open_out(path);
  out << "amplitude_V,g_initial_uS,delta_g_uS\n";
  for (const auto& p : points) {
    out << num(p.amplitude) << ',' << num(p.g_initial / kMicro) << ',' << num(p.delta_g / kMicro)
        << '\n';
  }
}

void write_grid_csv(const std::filesystem::path& path, const Grid<double>& g) {
  auto out = open_out(path);
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      if (j) out << ',';
      out << g(i, j) / kMicro;
    }
    out << '\n';
  }
}

Grid<double> read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used) * kMicro);
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::runtime_error("grid file: bad value '" + cell + "' in " + path.string());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("grid file: ragged rows in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("grid file is empty: " + path.string());
  Grid<double> g(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rows[i][j];
  return g;
}

}  // namespace memxbar
