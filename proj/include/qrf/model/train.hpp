#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qrf/model/field.hpp"
#include "qrf/render/camera.hpp"
#include "qrf/render/volume.hpp"

namespace qrf {

/// Image regression sample: normalised position and target colour.
struct PixelSample {
  Eigen::VectorXd position;
  Eigen::Vector3d target = Eigen::Vector3d::Zero();
};

/// Scene fitting sample: camera ray and the pixel colour it should composite to.
struct RaySample {
  Ray ray;
  Eigen::Vector3d target = Eigen::Vector3d::Zero();
};

/// Ray marching used by the scene loss. Points outside [-1, 1]^3 are empty space.
struct MarchOptions {
  int samples_per_ray = 16;
  Eigen::Vector3d background = Eigen::Vector3d::Zero();
};

struct OptimizerOptions {
  double learning_rate = 0.05;
  double momentum = 0.9;
  int threads = 1;
};

struct TrainState {
  ParamVector params;
  ParamVector velocity;
  std::int64_t iteration = 0;

  TrainState() = default;
  explicit TrainState(ParamVector initial)
      : params(std::move(initial)), velocity(ParamVector::Zero(params.size())) {}
};

struct LossAndGradient {
  double loss = 0.0;
  Eigen::VectorXd gradient;
};

/// Mean over samples and channels of (predicted - target)^2.
double loss(const QrfModel& model, const ParamVector& params, std::span<const PixelSample> batch);
double loss(const QrfModel& model, const ParamVector& params, std::span<const RaySample> batch,
            const MarchOptions& march);

/// Loss and its exact gradient. Per-sample terms are summed in index order, so
/// the result does not depend on the thread count.
LossAndGradient loss_gradient(const QrfModel& model, const ParamVector& params,
                              std::span<const PixelSample> batch, int threads = 1);
LossAndGradient loss_gradient(const QrfModel& model, const ParamVector& params,
                              std::span<const RaySample> batch, const MarchOptions& march, int threads = 1);

/// v <- momentum v - lr g; params <- params + v. Returns the loss before the update.
/// Throws TrainingDiverged if the loss or gradient is not finite.
double train_step(const QrfModel& model, TrainState& state, std::span<const PixelSample> batch,
                  const OptimizerOptions& options);
double train_step(const QrfModel& model, TrainState& state, std::span<const RaySample> batch,
                  const MarchOptions& march, const OptimizerOptions& options);

/// `batch` distinct indices in [0, n) drawn from (seed, iteration); all of them when batch >= n.
std::vector<std::size_t> minibatch_indices(std::uint64_t seed, std::int64_t iteration, std::size_t n,
                                           std::size_t batch);

/// Field closure for render_image: the model inside [-1, 1]^3, empty space outside.
FieldFunction field_function(const QrfModel& model, const ParamVector& params);

/// Colour and opacity of one ray under the scene loss's marching rule.
CompositeResult march_ray(const QrfModel& model, const ParamVector& params, const Ray& ray,
                          const MarchOptions& march);

}  // namespace qrf
