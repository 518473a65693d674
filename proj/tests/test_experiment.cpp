#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "memxbar/config.hpp"
#include "memxbar/experiment.hpp"
#include "oracles.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace memxbar;

namespace {

constexpr double uS = 1e-6;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("memxbar_exp_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  const auto cfg = parse_config("{}");
  CHECK(cfg.seed == 1);
  CHECK(cfg.max_epochs == 50);
  CHECK(cfg.n_runs == 100);
  CHECK(cfg.device.v_write == 1.3);
  CHECK(cfg.variability.init_center == doctest::Approx(35 * uS));
  CHECK(cfg.sweep_centers.size() == 13);
  CHECK(cfg.sweep_centers.front() == doctest::Approx(12.5 * uS));
  CHECK(cfg.sweep_centers.back() == doctest::Approx(97.5 * uS));

  const auto custom = parse_config(R"({
    "seed": 9, "max_epochs": 20,
    "device": {"set_anchors_uS": [[20, 50], [70, 10]], "noise_sigma": 0.1},
    "variability": {"init_center_uS": 50, "init_window_uS": 0},
    "crossbar": {"read_mode": "nodal"},
    "sweep": {"centers_uS": [20, 40]}
  })");
  CHECK(custom.seed == 9);
  CHECK(custom.max_epochs == 20);
  CHECK(custom.device.set_anchors[1].g == doctest::Approx(70 * uS));
  CHECK(custom.device.noise_sigma == 0.1);
  CHECK(custom.variability.init_window == 0.0);
  CHECK(custom.read_scheme.mode == ReadMode::kNodal);
  CHECK(custom.sweep_centers.size() == 2);
  CHECK_NOTHROW(custom.validate());

  // Round trip through the canonical rendering.
  CHECK(config_to_json(parse_config(config_to_json(custom))) == config_to_json(custom));
  CHECK(config_hash(parse_config(config_to_json(custom))) == config_hash(custom));
  CHECK(config_hash(custom) != config_hash(cfg));
}

TEST_CASE("config rejects bad input") {
  CHECK_THROWS_AS(parse_config("{"), std::runtime_error);
  CHECK_THROWS_AS(parse_config(R"({"sed": 1})"), std::runtime_error);
  CHECK_THROWS_AS(parse_config(R"({"device": {"v_write": "high"}})"), std::runtime_error);
  CHECK_THROWS_AS(parse_config(R"({"crossbar": {"read_mode": "spice"}})"), std::runtime_error);
  CHECK_THROWS_AS(parse_config(R"({"device": {"v_threshold": 2.0}})").validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"sweep": {"centers_uS": [5]}})").validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"n_runs": 0})").validate(), std::invalid_argument);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), std::runtime_error);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0, 0) == derive_seed(1, 0, 0));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
  CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
}

TEST_CASE("pulse train examples") {
  const SwitchingModel<> model;
  Rng rng(0);
  const auto one = run_pulse_train(model, 20 * uS, 1.3, 1, rng);
  REQUIRE(one.size() == 2);
  CHECK(one[0] == 20 * uS);
  CHECK(one[1] == doctest::Approx(80 * uS).epsilon(1e-12));

  const auto flat = run_pulse_train(model, 50 * uS, 0.1, 100, rng);
  REQUIRE(flat.size() == 101);
  for (double g : flat) CHECK(g == 50 * uS);

  const auto up = run_pulse_train(model, 20 * uS, 1.3, 20, rng);
  for (std::size_t k = 1; k < up.size(); ++k) CHECK(up[k] >= up[k - 1]);
  const double fp = oracle::pulse_fixed_point({{20 * uS, 60 * uS}, {65 * uS, 24 * uS}}, true, 20 * uS,
                                              model.g_min, model.g_max);
  CHECK(std::abs(up.back() - fp) <= 1 * uS);
}

TEST_CASE("histograms") {
  ExperimentConfig cfg;
  const auto set = load_dataset(cfg);

  SUBCASE("symmetric start gives zero weights and gaps") {
    ExperimentConfig sym = cfg;
    sym.variability.init_window = 0;
    const auto data = dump_histograms(run_single(sym, set, 5));
    REQUIRE(data.initial_gaps.size() == 60);
    for (const auto& g : data.initial_gaps) CHECK(g.gap == 0.0);
    CHECK(data.initial_weights.isZero(0));
    CHECK(data.initial_weights.size() == 30);
  }
  SUBCASE("converged run has positive final gaps") {
    const auto log = run_single(cfg, set, derive_seed(cfg.seed, 0, 0));
    REQUIRE(log.converged);
    const auto data = dump_histograms(log);
    REQUIRE(data.final_gaps.size() == 60);
    for (const auto& g : data.final_gaps) CHECK(g.gap > 0);
    CHECK(data.final_weights.rows() == 10);
    CHECK(data.final_weights.cols() == 3);
  }
  SUBCASE("missing snapshots") {
    TrainingLog<> empty;
    CHECK_THROWS_AS(dump_histograms(empty), std::invalid_argument);
    auto log = run_single(cfg, set, 1);
    log.epochs.front().conductances.reset();
    CHECK_THROWS_AS(dump_histograms(log), std::invalid_argument);
  }
}

TEST_CASE("sweep accounting") {
  ExperimentConfig cfg;
  cfg.n_runs = 1;
  const auto cells = run_init_sweep(cfg, {20 * uS, 35 * uS, 90 * uS});
  REQUIRE(cells.size() == 3);
  for (const auto& c : cells) {
    CHECK((c.convergence_pct == 0.0 || c.convergence_pct == 100.0));
    CHECK(c.converged + c.failed == c.runs);
  }

  cfg.n_runs = 8;
  cfg.variability.init_window = 0;
  cfg.device.noise_sigma = 0;
  const auto flat = run_init_sweep(cfg, {35 * uS});
  // Degenerate window, deterministic devices: every run is the same run.
  CHECK((flat[0].converged == 0 || flat[0].converged == 8));
  if (flat[0].mean_epochs) {
    const auto log = run_single(cfg, load_dataset(cfg), 999);
    CHECK(*flat[0].mean_epochs == static_cast<double>(*log.epochs_to_convergence()));
  }
}

TEST_CASE("sweep output does not depend on the thread count") {
  ExperimentConfig cfg;
  cfg.n_runs = 6;
  cfg.device.noise_sigma = 0.5;
  cfg.threads = 1;
  const auto serial = run_init_sweep(cfg, {20 * uS, 60 * uS});
  cfg.threads = 4;
  const auto parallel = run_init_sweep(cfg, {20 * uS, 60 * uS});
  for (std::size_t k = 0; k < serial.size(); ++k) {
    CHECK(serial[k].converged == parallel[k].converged);
    CHECK(serial[k].mean_epochs == parallel[k].mean_epochs);
  }
}

TEST_CASE("training output files are byte-reproducible") {
  ExperimentConfig cfg;
  cfg.train_runs = 3;
  cfg.output_dir = scratch("a");
  const auto a = run_training(cfg, true);
  cfg.output_dir = scratch("b");
  const auto b = run_training(cfg, true);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t k = 0; k < a.files.size(); ++k) CHECK(slurp(a.files[k]) == slurp(b.files[k]));
  const std::string head = slurp(a.files[0]);
  CHECK(head.rfind("run,seed,epoch,n_errors,min_correct_margin,mean_abs_I_uA_class0", 0) == 0);
}

TEST_CASE("device curves") {
  ExperimentConfig cfg;
  cfg.curve_amplitudes = {1.3, -1.3, 0.65};
  const auto pts = device_curves(cfg);
  REQUIRE(pts.size() == 3 * 91);
  for (const auto& p : pts) {
    if (std::abs(p.g_initial - 20 * uS) < 1e-12 && p.amplitude == 1.3) CHECK(p.delta_g == doctest::Approx(60 * uS));
    if (std::abs(p.g_initial - 65 * uS) < 1e-12 && p.amplitude == -1.3) CHECK(p.delta_g == doctest::Approx(-55 * uS));
    if (p.amplitude == 0.65) CHECK(p.delta_g == 0.0);
  }
}
