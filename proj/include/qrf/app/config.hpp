#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qrf/model/field.hpp"
#include "qrf/qintegrate/counting.hpp"

namespace qrf::app {

enum class Task { Fit2d, Fit3d, Render, QCount, Convergence, Ablate, QRender };

Task parse_task(std::string_view name);
std::string to_string(Task task);

struct CameraConfig {
  Eigen::Vector3d position{1.6, 0.8, 1.6};
  Eigen::Vector3d look_at{0.0, 0.0, 0.0};
  Eigen::Vector3d up{0.0, 1.0, 0.0};
  double focal = 10.0;
  int width = 8;
  int height = 8;
  double near = 0.5;
  double far = 4.3;
};

struct TrainConfig {
  int iterations = 300;
  double learning_rate = 0.5;
  double momentum = 0.9;
  int batch_size = 0;  // 0: every sample each step
  int eval_every = 50;
};

/// Flat experiment description; every field maps to one key of the text format.
struct ExperimentConfig {
  Task task = Task::Fit2d;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  int threads = 1;

  QrfConfig model;
  TrainConfig train;

  // fit2d target: an image file, or a constant colour of image_size^2 pixels.
  std::string image;
  std::string constant_color;
  int image_size = 8;
  int max_side = 64;

  // fit3d procedural scene.
  std::string scene = "sphere";
  int views = 4;
  int view_size = 8;
  int samples_per_ray = 16;
  CameraConfig camera;

  std::string checkpoint;  // render input
  std::string resume;      // fit checkpoint to continue from

  std::string energy_file;
  int b0 = 4;
  int b = 4;
  int qpe_bits = 6;
  qint::OracleMode oracle = qint::OracleMode::Compiled;

  int t_min = 3;
  int t_max = 8;
  int nc_min = 16;
  int nc_max = 4096;
  int trials = 200;

  std::string ablate_task = "fit2d";
  std::vector<std::string> ablate_activations{"qrelu"};
  std::vector<std::string> ablate_encoders{"angle", "dense"};
  std::vector<std::string> ablate_templates{"layered"};
  int ablate_repeats = 10;
  int ablate_qubits = 0;  // > 0: shared position budget, each encoder gets the most frequencies that fit
};

/// One key of the text format.
struct ConfigKey {
  std::string name;
  std::string help;
  bool affects_results = true;  // false for keys excluded from the hash
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

const std::vector<ConfigKey>& config_keys();

/// Sets one key from its text value. Throws ConfigError naming the key.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// "x,y,z" -> vector; throws ConfigError naming the key.
Eigen::Vector3d parse_vector3(const std::string& key, const std::string& text);

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and malformed
/// values throw ConfigError naming the key; `task` is required.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Every key in table order, one `key = value` line each.
std::string format_config(const ExperimentConfig& config);
void save_config(const std::string& path, const ExperimentConfig& config);

/// Result-affecting keys as a map, for embedding in artifacts.
std::map<std::string, std::string> config_snapshot(const ExperimentConfig& config);

/// FNV-1a over the result-affecting keys, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Checks the task's required keys and that every named input file exists.
/// Throws ConfigError naming the key.
void validate_config(const ExperimentConfig& config);

/// output_dir, prefixed by $QRF_OUTPUT_ROOT when that is set and output_dir is relative.
std::string resolve_output_dir(const ExperimentConfig& config);

}  // namespace qrf::app
