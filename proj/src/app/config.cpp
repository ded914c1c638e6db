#include "qrf/app/config.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrf/errors.hpp"

namespace qrf::app {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as " + expected);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, std::is_integral_v<T> ? "an integer" : "a number");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Eigen::Vector3d parse_vec3(const std::string& key, const std::string& value) {
  const auto parts = split_list(value);
  if (parts.size() != 3) bad_value(key, value, "three comma-separated numbers");
  return {parse_number<double>(key, parts[0]), parse_number<double>(key, parts[1]),
          parse_number<double>(key, parts[2])};
}

std::string format_vec3(const Eigen::Vector3d& v) {
  return format_double(v.x()) + "," + format_double(v.y()) + "," + format_double(v.z());
}

// Rethrows library parse errors as ConfigError tagged with the key.
template <typename F>
auto keyed(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

template <typename T>
ConfigKey int_key(std::string name, std::string help, T ExperimentConfig::*field, bool affects = true) {
  return {name, std::move(help), affects,
          [field](const ExperimentConfig& c) { return std::to_string(c.*field); },
          [field, name](ExperimentConfig& c, const std::string& v) { c.*field = parse_number<T>(name, v); }};
}

ConfigKey string_key(std::string name, std::string help, std::string ExperimentConfig::*field, bool affects = true) {
  return {name, std::move(help), affects, [field](const ExperimentConfig& c) { return c.*field; },
          [field](ExperimentConfig& c, const std::string& v) { c.*field = v; }};
}

ConfigKey list_key(std::string name, std::string help, std::vector<std::string> ExperimentConfig::*field) {
  return {name, std::move(help), true, [field](const ExperimentConfig& c) { return join_list(c.*field); },
          [field](ExperimentConfig& c, const std::string& v) { c.*field = split_list(v); }};
}

template <typename Get, typename Set>
ConfigKey custom_key(std::string name, std::string help, Get get, Set set) {
  return {name, std::move(help), true, std::move(get), std::move(set)};
}

std::vector<ConfigKey> build_keys() {
  using C = ExperimentConfig;
  std::vector<ConfigKey> k;
  k.push_back(custom_key(
      "task", "fit2d|fit3d|render|qcount|convergence|ablate|qrender", [](const C& c) { return to_string(c.task); },
      [](C& c, const std::string& v) { c.task = keyed("task", [&] { return parse_task(v); }); }));
  k.push_back(int_key("seed", "seed for initialisation, batches and studies", &C::seed));
  k.push_back(string_key("output_dir", "artifact directory", &C::output_dir, false));
  k.push_back(int_key("threads", "worker threads (results do not depend on it)", &C::threads, false));

  k.push_back(custom_key(
      "encoder", "general|wavefunction|angle|dense", [](const C& c) { return to_string(c.model.encoder); },
      [](C& c, const std::string& v) { c.model.encoder = keyed("encoder", [&] { return parse_encoder(v); }); }));
  k.push_back(custom_key(
      "template", "layered|c5|c6|c16|c17", [](const C& c) { return to_string(c.model.template_kind); },
      [](C& c, const std::string& v) {
        c.model.template_kind = keyed("template", [&] { return parse_template(v); });
      }));
  k.push_back(custom_key(
      "activation", "relu|elu|softplus|sine|qrelu", [](const C& c) { return to_string(c.model.activation); },
      [](C& c, const std::string& v) {
        c.model.activation = keyed("activation", [&] { return parse_activation(v); });
      }));
  auto model_int = [&k](std::string name, std::string help, int QrfConfig::*field) {
    k.push_back(custom_key(
        name, std::move(help), [field](const C& c) { return std::to_string(c.model.*field); },
        [field, name](C& c, const std::string& v) { c.model.*field = parse_number<int>(name, v); }));
  };
  model_int("layers_position", "PQC A layers", &QrfConfig::layers_position);
  model_int("layers_color", "PQC B layers", &QrfConfig::layers_color);
  model_int("freq_position", "positional frequencies for positions", &QrfConfig::freq_position);
  model_int("freq_direction", "positional frequencies for directions", &QrfConfig::freq_direction);
  model_int("position_qubits", "position register size (0: encoder demand)", &QrfConfig::position_qubits);
  model_int("direction_qubits", "direction register size (0: encoder demand)", &QrfConfig::direction_qubits);

  auto train_int = [&k](std::string name, std::string help, int TrainConfig::*field) {
    k.push_back(custom_key(
        name, std::move(help), [field](const C& c) { return std::to_string(c.train.*field); },
        [field, name](C& c, const std::string& v) { c.train.*field = parse_number<int>(name, v); }));
  };
  auto train_double = [&k](std::string name, std::string help, double TrainConfig::*field) {
    k.push_back(custom_key(
        name, std::move(help), [field](const C& c) { return format_double(c.train.*field); },
        [field, name](C& c, const std::string& v) { c.train.*field = parse_number<double>(name, v); }));
  };
  train_int("iterations", "total training iterations", &TrainConfig::iterations);
  train_double("learning_rate", "gradient descent step", &TrainConfig::learning_rate);
  train_double("momentum", "heavy-ball momentum", &TrainConfig::momentum);
  train_int("batch_size", "samples per step (0: all)", &TrainConfig::batch_size);
  train_int("eval_every", "iterations between metric evaluations", &TrainConfig::eval_every);

  k.push_back(string_key("image", "fit2d target image (png or ppm)", &C::image));
  k.push_back(string_key("constant_color", "fit2d constant target r,g,b instead of an image", &C::constant_color));
  k.push_back(int_key("image_size", "side of the constant target", &C::image_size));
  k.push_back(int_key("max_side", "box-downsample targets above this side (at most 64)", &C::max_side));

  k.push_back(string_key("scene", "fit3d procedural scene: sphere|empty", &C::scene));
  k.push_back(int_key("views", "training views on a ring around the scene", &C::views));
  k.push_back(int_key("view_size", "training view side in pixels", &C::view_size));
  k.push_back(int_key("samples_per_ray", "uniform samples per ray", &C::samples_per_ray));

  auto cam_vec = [&k](std::string name, std::string help, Eigen::Vector3d CameraConfig::*field) {
    k.push_back(custom_key(
        name, std::move(help), [field](const C& c) { return format_vec3(c.camera.*field); },
        [field, name](C& c, const std::string& v) { c.camera.*field = parse_vec3(name, v); }));
  };
  cam_vec("camera_position", "held-out / render camera position", &CameraConfig::position);
  cam_vec("camera_look_at", "camera target", &CameraConfig::look_at);
  cam_vec("camera_up", "camera up vector", &CameraConfig::up);
  k.push_back(custom_key(
      "camera_focal", "focal length in pixels", [](const C& c) { return format_double(c.camera.focal); },
      [](C& c, const std::string& v) { c.camera.focal = parse_number<double>("camera_focal", v); }));
  k.push_back(custom_key(
      "camera_width", "image width", [](const C& c) { return std::to_string(c.camera.width); },
      [](C& c, const std::string& v) { c.camera.width = parse_number<int>("camera_width", v); }));
  k.push_back(custom_key(
      "camera_height", "image height", [](const C& c) { return std::to_string(c.camera.height); },
      [](C& c, const std::string& v) { c.camera.height = parse_number<int>("camera_height", v); }));
  k.push_back(custom_key(
      "camera_near", "near depth", [](const C& c) { return format_double(c.camera.near); },
      [](C& c, const std::string& v) { c.camera.near = parse_number<double>("camera_near", v); }));
  k.push_back(custom_key(
      "camera_far", "far depth", [](const C& c) { return format_double(c.camera.far); },
      [](C& c, const std::string& v) { c.camera.far = parse_number<double>("camera_far", v); }));

  k.push_back(string_key("checkpoint", "checkpoint to render", &C::checkpoint));
  k.push_back(string_key("resume", "checkpoint to continue training from", &C::resume));

  k.push_back(string_key("energy_file", "energy table (csv or json)", &C::energy_file));
  k.push_back(int_key("b0", "fixed-point integer bits", &C::b0));
  k.push_back(int_key("b", "fixed-point total bits", &C::b));
  k.push_back(int_key("qpe_bits", "phase-estimation register size", &C::qpe_bits));
  k.push_back(custom_key(
      "oracle", "compiled|gate",
      [](const C& c) { return std::string(c.oracle == qint::OracleMode::Compiled ? "compiled" : "gate"); },
      [](C& c, const std::string& v) {
        if (v == "compiled") {
          c.oracle = qint::OracleMode::Compiled;
        } else if (v == "gate") {
          c.oracle = qint::OracleMode::GateLevel;
        } else {
          bad_value("oracle", v, "compiled|gate");
        }
      }));

  k.push_back(int_key("t_min", "smallest counting register", &C::t_min));
  k.push_back(int_key("t_max", "largest counting register", &C::t_max));
  k.push_back(int_key("nc_min", "smallest Monte Carlo sample count (power of two)", &C::nc_min));
  k.push_back(int_key("nc_max", "largest Monte Carlo sample count (power of two)", &C::nc_max));
  k.push_back(int_key("trials", "Monte Carlo trials per sample count", &C::trials));

  k.push_back(string_key("ablate_task", "task run per grid cell (fit2d)", &C::ablate_task));
  k.push_back(list_key("ablate_activations", "activation list", &C::ablate_activations));
  k.push_back(list_key("ablate_encoders", "encoder list", &C::ablate_encoders));
  k.push_back(list_key("ablate_templates", "circuit template list", &C::ablate_templates));
  k.push_back(int_key("ablate_repeats", "seeded repeats per cell", &C::ablate_repeats));
  k.push_back(int_key("ablate_qubits", "shared position qubit budget (0: per-encoder demand)", &C::ablate_qubits));
  return k;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void require_file(const std::string& key, const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError("config key '" + key + "': file '" + path + "' does not exist");
  }
}

void require_key(const std::string& key, const std::string& value, Task task) {
  if (value.empty()) throw ConfigError("missing required key '" + key + "' for task " + to_string(task));
}

}  // namespace

Eigen::Vector3d parse_vector3(const std::string& key, const std::string& text) { return parse_vec3(key, text); }

Task parse_task(std::string_view name) {
  if (name == "fit2d") return Task::Fit2d;
  if (name == "fit3d") return Task::Fit3d;
  if (name == "render") return Task::Render;
  if (name == "qcount") return Task::QCount;
  if (name == "convergence") return Task::Convergence;
  if (name == "ablate") return Task::Ablate;
  if (name == "qrender") return Task::QRender;
  throw InvalidArgument("unknown task '" + std::string(name) +
                        "' (expected fit2d|fit3d|render|qcount|convergence|ablate|qrender)");
}

std::string to_string(Task task) {
  switch (task) {
    case Task::Fit2d: return "fit2d";
    case Task::Fit3d: return "fit3d";
    case Task::Render: return "render";
    case Task::QCount: return "qcount";
    case Task::Convergence: return "convergence";
    case Task::Ablate: return "ablate";
    case Task::QRender: return "qrender";
  }
  return "?";
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  for (const auto& k : config_keys()) {
    if (k.name == key) {
      k.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  bool has_task = false;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value, got '" + body + "'");
    }
    const std::string key = trim(body.substr(0, eq));
    set_config_value(config, key, trim(body.substr(eq + 1)));
    has_task |= key == "task";
  }
  if (!has_task) throw ConfigError("missing required key 'task'");
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& k : config_keys()) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

void save_config(const std::string& path, const ExperimentConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config file '" + path + "'");
  out << format_config(config);
}

std::map<std::string, std::string> config_snapshot(const ExperimentConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& k : config_keys()) {
    if (k.affects_results) out[k.name] = k.get(config);
  }
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  std::string canonical;
  for (const auto& [key, value] : config_snapshot(config)) canonical += key + "=" + value + "\n";
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
  return buf;
}

void validate_config(const ExperimentConfig& config) {
  const Task task = config.task;
  if (task == Task::Fit2d && config.image.empty() && config.constant_color.empty()) {
    throw ConfigError("missing required key 'image' (or 'constant_color') for task fit2d");
  }
  if (task == Task::QCount) require_key("energy_file", config.energy_file, task);
  if (task == Task::Render) require_key("checkpoint", config.checkpoint, task);
  if (!config.image.empty()) require_file("image", config.image);
  if (!config.energy_file.empty()) require_file("energy_file", config.energy_file);
  if (!config.checkpoint.empty()) require_file("checkpoint", config.checkpoint);
  if (!config.resume.empty()) require_file("resume", config.resume);
  if (config.max_side < 1 || config.max_side > 64) throw ConfigError("config key 'max_side': must be in [1, 64]");
  if (config.threads < 1) throw ConfigError("config key 'threads': must be >= 1");
  if (config.train.iterations < 0) throw ConfigError("config key 'iterations': must be >= 0");
  if (config.train.eval_every < 1) throw ConfigError("config key 'eval_every': must be >= 1");
  if (config.train.batch_size < 0) throw ConfigError("config key 'batch_size': must be >= 0");
  if (config.scene != "sphere" && config.scene != "empty") {
    throw ConfigError("config key 'scene': expected sphere|empty, got '" + config.scene + "'");
  }
}

std::string resolve_output_dir(const ExperimentConfig& config) {
  const std::filesystem::path dir(config.output_dir);
  const char* root = std::getenv("QRF_OUTPUT_ROOT");
  if (root && *root && dir.is_relative()) return (std::filesystem::path(root) / dir).string();
  return dir.string();
}

}  // namespace qrf::app
