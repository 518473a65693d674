#include "memxbar/config.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

namespace memxbar {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw std::runtime_error("config: '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw std::runtime_error("config: unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_micro(const json& obj, const char* key, double& out) {
  if (obj.contains(key)) out = obj.at(key).get<double>() * kMicro;
}

std::vector<Anchor<double>> read_anchors(const json& arr) {
  std::vector<Anchor<double>> out;
  for (const auto& pair : arr) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::runtime_error("config: anchors must be [G_uS, dG_uS] pairs");
    }
    out.push_back({pair[0].get<double>() * kMicro, pair[1].get<double>() * kMicro});
  }
  return out;
}

json anchors_json(const std::vector<Anchor<double>>& list) {
  json arr = json::array();
  for (const auto& a : list) arr.push_back({a.g / kMicro, a.delta_g / kMicro});
  return arr;
}

std::string read_mode_name(ReadMode m) { return m == ReadMode::kIdeal ? "ideal" : "nodal"; }

}  // namespace

std::vector<double> ExperimentConfig::default_sweep_centers() {
  std::vector<double> c;
  for (int k = 0; k < 12; ++k) c.push_back((12.5 + 7.5 * k) * kMicro);
  c.push_back(97.5 * kMicro);  // off the 7.5 grid; reaches toward g_max
  return c;
}

void ExperimentConfig::validate() const {
  device.validate();
  perceptron.validate();
  if (perceptron.n_inputs != 10) {
    throw std::invalid_argument("config: the perceptron takes 9 pixels + bias (n_inputs = 10)");
  }
  if (variability.init_center < device.g_min || variability.init_center > device.g_max) {
    throw std::invalid_argument("config: init_center outside [g_min, g_max]");
  }
  if (variability.init_window < 0) throw std::invalid_argument("config: negative init_window");
  if (r_top_line < 0 || r_bottom_line < 0) {
    throw std::invalid_argument("config: negative wire resistance");
  }
  if (std::abs(perceptron.v_read) > device.v_threshold ||
      std::abs(perceptron.v_bias) > device.v_threshold) {
    throw std::invalid_argument("config: read voltages must not exceed v_threshold");
  }
  if (max_epochs < 0) throw std::invalid_argument("config: max_epochs must be >= 0");
  if (n_runs < 1 || train_runs < 1) throw std::invalid_argument("config: run counts must be >= 1");
  if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
  for (double c : sweep_centers) {
    if (c < device.g_min || c > device.g_max) {
      throw std::invalid_argument("config: sweep center outside [g_min, g_max]");
    }
  }
  if (n_pulses < 0) throw std::invalid_argument("config: n_pulses must be >= 0");
  if (pulse_start_g < device.g_min || pulse_start_g > device.g_max) {
    throw std::invalid_argument("config: pulse-train start outside [g_min, g_max]");
  }
  if (!(curve_g_step > 0)) throw std::invalid_argument("config: curve g step must be positive");
}

ExperimentConfig parse_config(const std::string& json_text) {
  ExperimentConfig cfg;
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    reject_unknown(root, "root",
                   {"seed", "max_epochs", "n_runs", "train_runs", "threads", "output_dir",
                    "device", "variability", "crossbar", "perceptron", "dataset", "sweep",
                    "pulse_train", "device_curves"});
    read(root, "seed", cfg.seed);
    read(root, "max_epochs", cfg.max_epochs);
    read(root, "n_runs", cfg.n_runs);
    read(root, "train_runs", cfg.train_runs);
    read(root, "threads", cfg.threads);
    if (root.contains("output_dir")) cfg.output_dir = root.at("output_dir").get<std::string>();

    if (root.contains("device")) {
      const auto& d = root.at("device");
      reject_unknown(d, "device",
                     {"g_min_uS", "g_max_uS", "set_anchors_uS", "reset_anchors_uS", "v_write",
                      "v_threshold", "noise_sigma", "pulse_width_s"});
      read_micro(d, "g_min_uS", cfg.device.g_min);
      read_micro(d, "g_max_uS", cfg.device.g_max);
      if (d.contains("set_anchors_uS")) cfg.device.set_anchors = read_anchors(d.at("set_anchors_uS"));
      if (d.contains("reset_anchors_uS")) {
        cfg.device.reset_anchors = read_anchors(d.at("reset_anchors_uS"));
      }
      read(d, "v_write", cfg.device.v_write);
      read(d, "v_threshold", cfg.device.v_threshold);
      read(d, "noise_sigma", cfg.device.noise_sigma);
      read(d, "pulse_width_s", cfg.device.pulse_width);
    }
    if (root.contains("variability")) {
      const auto& v = root.at("variability");
      reject_unknown(v, "variability", {"init_center_uS", "init_window_uS"});
      read_micro(v, "init_center_uS", cfg.variability.init_center);
      read_micro(v, "init_window_uS", cfg.variability.init_window);
    }
    if (root.contains("crossbar")) {
      const auto& x = root.at("crossbar");
      reject_unknown(x, "crossbar", {"r_top_line_ohm", "r_bottom_line_ohm", "read_mode"});
      read(x, "r_top_line_ohm", cfg.r_top_line);
      read(x, "r_bottom_line_ohm", cfg.r_bottom_line);
      if (x.contains("read_mode")) {
        const auto mode = x.at("read_mode").get<std::string>();
        if (mode == "ideal") cfg.read_scheme.mode = ReadMode::kIdeal;
        else if (mode == "nodal") cfg.read_scheme.mode = ReadMode::kNodal;
        else throw std::runtime_error("config: read_mode must be 'ideal' or 'nodal'");
      }
    }
    if (root.contains("perceptron")) {
      const auto& p = root.at("perceptron");
      reject_unknown(p, "perceptron",
                     {"beta", "target_high", "target_low", "v_read", "v_bias", "v_write_set",
                      "v_write_reset"});
      read(p, "beta", cfg.perceptron.beta);
      read(p, "target_high", cfg.perceptron.target_high);
      read(p, "target_low", cfg.perceptron.target_low);
      read(p, "v_read", cfg.perceptron.v_read);
      read(p, "v_bias", cfg.perceptron.v_bias);
      read(p, "v_write_set", cfg.perceptron.v_write_set);
      read(p, "v_write_reset", cfg.perceptron.v_write_reset);
    }
    cfg.read_scheme.v_read = cfg.perceptron.v_read;
    if (root.contains("dataset")) {
      const auto& ds = root.at("dataset");
      reject_unknown(ds, "dataset", {"templates_file"});
      if (ds.contains("templates_file") && !ds.at("templates_file").is_null()) {
        cfg.templates_file = ds.at("templates_file").get<std::string>();
      }
    }
    if (root.contains("sweep")) {
      const auto& s = root.at("sweep");
      reject_unknown(s, "sweep", {"centers_uS"});
      if (s.contains("centers_uS")) {
        cfg.sweep_centers.clear();
        for (const auto& c : s.at("centers_uS")) cfg.sweep_centers.push_back(c.get<double>() * kMicro);
      }
    }
    if (root.contains("pulse_train")) {
      const auto& t = root.at("pulse_train");
      reject_unknown(t, "pulse_train", {"start_uS", "amplitude", "n_pulses"});
      read_micro(t, "start_uS", cfg.pulse_start_g);
      read(t, "amplitude", cfg.pulse_amplitude);
      read(t, "n_pulses", cfg.n_pulses);
    }
    if (root.contains("device_curves")) {
      const auto& c = root.at("device_curves");
      reject_unknown(c, "device_curves", {"amplitudes", "g_step_uS"});
      read(c, "amplitudes", cfg.curve_amplitudes);
      read_micro(c, "g_step_uS", cfg.curve_g_step);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["max_epochs"] = cfg.max_epochs;
  j["n_runs"] = cfg.n_runs;
  j["train_runs"] = cfg.train_runs;
  j["threads"] = cfg.threads;
  j["output_dir"] = cfg.output_dir.string();
  j["device"] = {{"g_min_uS", cfg.device.g_min / kMicro},
                 {"g_max_uS", cfg.device.g_max / kMicro},
                 {"set_anchors_uS", anchors_json(cfg.device.set_anchors)},
                 {"reset_anchors_uS", anchors_json(cfg.device.reset_anchors)},
                 {"v_write", cfg.device.v_write},
                 {"v_threshold", cfg.device.v_threshold},
                 {"noise_sigma", cfg.device.noise_sigma},
                 {"pulse_width_s", cfg.device.pulse_width}};
  j["variability"] = {{"init_center_uS", cfg.variability.init_center / kMicro},
                      {"init_window_uS", cfg.variability.init_window / kMicro}};
  j["crossbar"] = {{"r_top_line_ohm", cfg.r_top_line},
                   {"r_bottom_line_ohm", cfg.r_bottom_line},
                   {"read_mode", read_mode_name(cfg.read_scheme.mode)}};
  j["perceptron"] = {{"beta", cfg.perceptron.beta},
                     {"target_high", cfg.perceptron.target_high},
                     {"target_low", cfg.perceptron.target_low},
                     {"v_read", cfg.perceptron.v_read},
                     {"v_bias", cfg.perceptron.v_bias},
                     {"v_write_set", cfg.perceptron.v_write_set},
                     {"v_write_reset", cfg.perceptron.v_write_reset}};
  j["dataset"] = {{"templates_file", cfg.templates_file ? json(cfg.templates_file->string())
                                                        : json(nullptr)}};
  json centers = json::array();
  for (double c : cfg.sweep_centers) centers.push_back(c / kMicro);
  j["sweep"] = {{"centers_uS", centers}};
  j["pulse_train"] = {{"start_uS", cfg.pulse_start_g / kMicro},
                      {"amplitude", cfg.pulse_amplitude},
                      {"n_pulses", cfg.n_pulses}};
  j["device_curves"] = {{"amplitudes", cfg.curve_amplitudes},
                        {"g_step_uS", cfg.curve_g_step / kMicro}};
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  // Output location and thread count do not affect results.
  json j = json::parse(config_to_json(cfg));
  j.erase("output_dir");
  j.erase("threads");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace memxbar
