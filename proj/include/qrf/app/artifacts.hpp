#pragma once

#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "qrf/app/config.hpp"
#include "qrf/model/train.hpp"
#include "qrf/render/image_io.hpp"

namespace qrf::app {

using Json = nlohmann::ordered_json;

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  int version = kCheckpointVersion;
  ExperimentConfig config;
  TrainState state;
  std::vector<double> loss_history;  // loss before each completed step
};

/// Parameters and velocity are written in shortest round-trip decimal form, so they reload bitwise.
std::string checkpoint_to_string(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
/// Throws UnsupportedVersion for any other format version, ConfigError for malformed files.
Checkpoint load_checkpoint(const std::string& path);

/// Finite values as numbers, infinities as the strings "inf" / "-inf".
Json metric_value(double v);

/// config_hash and seed, the provenance stamp of every artifact.
Json provenance(const ExperimentConfig& config);
ImageMetadata image_provenance(const ExperimentConfig& config);

/// Append-only JSON-lines file; writes from several threads are serialised.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path);
  void write(const Json& record);

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Creates the directory (and parents) if needed and returns it.
std::string ensure_dir(const std::string& dir);

}  // namespace qrf::app
