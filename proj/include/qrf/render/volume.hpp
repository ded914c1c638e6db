#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "qrf/render/camera.hpp"
#include "qrf/render/image.hpp"

namespace qrf {

/// Field output at one point: colour in [0, 1]^3 and density sigma >= 0.
struct FieldSample {
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  double sigma = 0.0;
};

enum class SamplingMode { Uniform, Stratified };

/// K depths in [near, far]: bin midpoints (Uniform) or one seeded draw per bin (Stratified).
std::vector<double> sample_depths(const Ray& ray, int k, SamplingMode mode, std::uint64_t seed = 0);

/// Samples along one ray. deltas[i] = depths[i+1] - depths[i], last = far - depths[K-1].
struct SampleSet {
  std::vector<double> depths;
  std::vector<double> deltas;
  std::vector<FieldSample> samples;
};

/// Builds the spacing list and checks the ordering invariants.
SampleSet make_sample_set(std::vector<double> depths, double far, std::vector<FieldSample> samples);

struct CompositeResult {
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  double opacity = 0.0;
};

/// Per-sample weights w_i = T_i (1 - exp(-sigma_i delta_i)), T_i = exp(-sum_{j<i} sigma_j delta_j).
std::vector<double> composite_weights(const SampleSet& set);

/// c = sum_i w_i c_i + (1 - sum_i w_i) background.
CompositeResult composite(const SampleSet& set, const Eigen::Vector3d& background = Eigen::Vector3d::Zero());

/// Derivatives of the composited colour with respect to each sample's colour
/// (a scalar weight, d c / d c_i = w_i I) and density (a colour vector per sample).
struct CompositeGradient {
  CompositeResult value;
  std::vector<double> d_color;
  std::vector<Eigen::Vector3d> d_sigma;
};

CompositeGradient composite_with_gradient(const SampleSet& set,
                                          const Eigen::Vector3d& background = Eigen::Vector3d::Zero());

/// Field closure: position, unit view direction -> sample.
using FieldFunction = std::function<FieldSample(const Eigen::Vector3d&, const Eigen::Vector3d&)>;

struct RenderOptions {
  int samples_per_ray = 32;
  SamplingMode mode = SamplingMode::Uniform;
  std::uint64_t seed = 0;
  Eigen::Vector3d background = Eigen::Vector3d::Zero();
  int threads = 1;
};

/// Error raised by the field during render_image, tagged with the pixel.
class RenderError : public std::runtime_error {
 public:
  RenderError(int x, int y, const std::string& what);
  int x() const { return x_; }
  int y() const { return y_; }

 private:
  int x_;
  int y_;
};

/// Stratified seed for one pixel, independent of scheduling.
std::uint64_t pixel_seed(std::uint64_t seed, int x, int y);

/// Colour along one ray.
CompositeResult render_ray(const FieldFunction& field, const Ray& ray, const RenderOptions& options,
                           std::uint64_t ray_seed);

/// Renders every pixel. Rows are split across `threads` workers; output is
/// identical to the single-threaded result.
Image render_image(const FieldFunction& field, const Camera& camera, const RenderOptions& options);

}  // namespace qrf
