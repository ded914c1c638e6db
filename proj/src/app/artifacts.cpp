#include "qrf/app/artifacts.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "qrf/errors.hpp"

namespace qrf::app {

namespace {

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError("checkpoint: field '" + field + "' is not an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("checkpoint: field '" + field + "' has a non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

const Json& field(const Json& j, const std::string& name) {
  if (!j.contains(name)) throw ConfigError("checkpoint: missing field '" + name + "'");
  return j.at(name);
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& c) {
  Json j;
  j["format_version"] = c.version;
  j["config_hash"] = config_hash(c.config);
  j["seed"] = c.config.seed;
  Json cfg = Json::object();
  for (const auto& [key, value] : config_snapshot(c.config)) cfg[key] = value;
  j["config"] = cfg;
  j["iteration"] = c.state.iteration;
  j["params"] = vector_json(c.state.params);
  j["velocity"] = vector_json(c.state.velocity);
  j["loss_history"] = c.loss_history;
  return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("checkpoint: not valid JSON: ") + e.what());
  }
  const int version = field(j, "format_version").get<int>();
  if (version != kCheckpointVersion) {
    throw UnsupportedVersion("checkpoint: unsupported format version " + std::to_string(version) + " (this build reads " +
                             std::to_string(kCheckpointVersion) + ")");
  }
  Checkpoint c;
  c.version = version;
  for (const auto& [key, value] : field(j, "config").items()) set_config_value(c.config, key, value.get<std::string>());
  c.state.params = vector_from_json(field(j, "params"), "params");
  c.state.velocity = vector_from_json(field(j, "velocity"), "velocity");
  c.state.iteration = field(j, "iteration").get<std::int64_t>();
  if (c.state.params.size() != c.state.velocity.size()) throw ConfigError("checkpoint: params/velocity length mismatch");
  c.loss_history = field(j, "loss_history").get<std::vector<double>>();
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  write_text(path, checkpoint_to_string(checkpoint));
}

Checkpoint load_checkpoint(const std::string& path) { return checkpoint_from_string(read_text(path)); }

Json metric_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json provenance(const ExperimentConfig& config) {
  Json j;
  j["config_hash"] = config_hash(config);
  j["seed"] = config.seed;
  return j;
}

ImageMetadata image_provenance(const ExperimentConfig& config) {
  return {{"config_hash", config_hash(config)}, {"seed", std::to_string(config.seed)}, {"task", to_string(config.task)}};
}

JsonlWriter::JsonlWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw ConfigError("cannot write '" + path + "'");
}

void JsonlWriter::write(const Json& record) {
  std::lock_guard lock(mutex_);
  out_ << record.dump() << '\n';
  out_.flush();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

}  // namespace qrf::app
