#include "qrf/app/scene.hpp"

#include <cmath>
#include <numbers>

#include "qrf/errors.hpp"

namespace qrf::app {

ToyScene::ToyScene(std::string kind) : kind_(std::move(kind)) {
  if (kind_ != "sphere" && kind_ != "empty") throw ConfigError("unknown scene '" + kind_ + "' (expected sphere|empty)");
}

FieldSample ToyScene::at(const Eigen::Vector3d& p) const {
  FieldSample s;
  if (kind_ == "sphere" && p.norm() <= kRadius) {
    s.sigma = kDensity;
    s.color = (0.5 + 0.45 * p.array() / kRadius).cwiseMax(0.0).cwiseMin(1.0).matrix();
  }
  return s;
}

FieldFunction ToyScene::field() const {
  return [scene = *this](const Eigen::Vector3d& p, const Eigen::Vector3d&) { return scene.at(p); };
}

Camera make_camera(const CameraConfig& c) {
  try {
    return Camera::look_at(c.position, c.look_at, c.up, c.focal, c.width, c.height, c.near, c.far);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("camera: ") + e.what());
  }
}

std::vector<Camera> training_cameras(const ExperimentConfig& config) {
  if (config.views < 1) throw ConfigError("config key 'views': must be >= 1");
  if (config.view_size < 1) throw ConfigError("config key 'view_size': must be >= 1");
  const CameraConfig& held = config.camera;
  const Eigen::Vector3d offset = held.position - held.look_at;
  const double radius = std::hypot(offset.x(), offset.z());
  const double height = offset.y();
  const double base = std::atan2(offset.x(), offset.z());
  // Keep the held-out field of view at the training resolution.
  const double focal = held.focal * config.view_size / std::max(held.width, 1);
  std::vector<Camera> cams;
  for (int v = 0; v < config.views; ++v) {
    const double az = base + std::numbers::pi * (2.0 * v + 1.0) / config.views;
    CameraConfig c = held;
    c.position = held.look_at + Eigen::Vector3d(radius * std::sin(az), height, radius * std::cos(az));
    c.focal = focal;
    c.width = config.view_size;
    c.height = config.view_size;
    cams.push_back(make_camera(c));
  }
  return cams;
}

std::vector<RaySample> training_rays(const ToyScene& scene, const std::vector<Camera>& cameras, int samples_per_ray,
                                     int threads) {
  RenderOptions options;
  options.samples_per_ray = samples_per_ray;
  options.threads = threads;
  const FieldFunction field = scene.field();
  std::vector<RaySample> out;
  for (const Camera& cam : cameras) {
    const Image target = render_image(field, cam, options);
    for (int y = 0; y < cam.height(); ++y) {
      for (int x = 0; x < cam.width(); ++x) {
        out.push_back({cam.pixel_ray(x, y), target.pixel(x, y).transpose().matrix()});
      }
    }
  }
  return out;
}

RenderOptions scene_render_options(const ExperimentConfig& config) {
  RenderOptions options;
  options.samples_per_ray = config.samples_per_ray;
  options.threads = config.threads;
  return options;
}

}  // namespace qrf::app
