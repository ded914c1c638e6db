#pragma once

#include <string>
#include <vector>

#include "qrf/app/config.hpp"
#include "qrf/model/train.hpp"
#include "qrf/render/camera.hpp"
#include "qrf/render/volume.hpp"

namespace qrf::app {

/// Analytic toy volume inside [-1, 1]^3: "sphere" is a ball of radius 0.6 and
/// density 6 coloured by 0.5 + 0.45 p / r; "empty" has zero density everywhere.
class ToyScene {
 public:
  explicit ToyScene(std::string kind);

  static constexpr double kRadius = 0.6;
  static constexpr double kDensity = 6.0;

  FieldSample at(const Eigen::Vector3d& p) const;
  FieldFunction field() const;
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

Camera make_camera(const CameraConfig& camera);

/// `views` cameras on the horizontal ring through the held-out camera, offset by
/// half a step so the held-out view falls between two training views.
std::vector<Camera> training_cameras(const ExperimentConfig& config);

/// Ground-truth pixel rays of every training view, rendered with uniform samples.
std::vector<RaySample> training_rays(const ToyScene& scene, const std::vector<Camera>& cameras, int samples_per_ray,
                                     int threads);

RenderOptions scene_render_options(const ExperimentConfig& config);

}  // namespace qrf::app
