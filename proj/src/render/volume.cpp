#include "qrf/render/volume.hpp"

#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "qrf/errors.hpp"

namespace qrf {

std::vector<double> sample_depths(const Ray& ray, int k, SamplingMode mode, std::uint64_t seed) {
  detail::require(k >= 1, "sample_depths: K must be >= 1");
  detail::require(ray.near < ray.far, "sample_depths: near must be < far");
  const double bin = (ray.far - ray.near) / k;
  std::vector<double> depths(static_cast<std::size_t>(k));
  if (mode == SamplingMode::Uniform) {
    for (int i = 0; i < k; ++i) depths[static_cast<std::size_t>(i)] = ray.near + (i + 0.5) * bin;
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < k; ++i) depths[static_cast<std::size_t>(i)] = ray.near + (i + u(rng)) * bin;
  }
  return depths;
}

SampleSet make_sample_set(std::vector<double> depths, double far, std::vector<FieldSample> samples) {
  detail::require(!depths.empty(), "make_sample_set: no samples");
  detail::require(depths.size() == samples.size(), "make_sample_set: depth/sample count mismatch");
  SampleSet set;
  set.deltas.resize(depths.size());
  for (std::size_t i = 0; i < depths.size(); ++i) {
    const double next = i + 1 < depths.size() ? depths[i + 1] : far;
    set.deltas[i] = next - depths[i];
    detail::require(set.deltas[i] > 0, "make_sample_set: depths must be strictly increasing and < far");
    detail::require(samples[i].sigma >= 0 && std::isfinite(samples[i].sigma),
                    "make_sample_set: sigma must be finite and >= 0");
  }
  set.depths = std::move(depths);
  set.samples = std::move(samples);
  return set;
}

std::vector<double> composite_weights(const SampleSet& set) {
  std::vector<double> w(set.samples.size());
  double optical_depth = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double tau = set.samples[i].sigma * set.deltas[i];
    w[i] = std::exp(-optical_depth) * -std::expm1(-tau);
    optical_depth += tau;
  }
  return w;
}

CompositeResult composite(const SampleSet& set, const Eigen::Vector3d& background) {
  CompositeResult out;
  const auto w = composite_weights(set);
  for (std::size_t i = 0; i < w.size(); ++i) {
    out.color += w[i] * set.samples[i].color;
    out.opacity += w[i];
  }
  if (!background.isZero()) out.color += (1.0 - out.opacity) * background;
  return out;
}

CompositeGradient composite_with_gradient(const SampleSet& set, const Eigen::Vector3d& background) {
  const std::size_t k = set.samples.size();
  CompositeGradient g;
  g.d_color = composite_weights(set);
  g.d_sigma.assign(k, Eigen::Vector3d::Zero());

  std::vector<double> transmittance(k + 1);
  double optical_depth = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    transmittance[i] = std::exp(-optical_depth);
    optical_depth += set.samples[i].sigma * set.deltas[i];
  }
  transmittance[k] = std::exp(-optical_depth);

  for (std::size_t i = 0; i < k; ++i) {
    g.value.color += g.d_color[i] * set.samples[i].color;
    g.value.opacity += g.d_color[i];
  }
  g.value.color += transmittance[k] * background;

  // Suffix sums of w_i c_i let each sigma derivative be O(1).
  Eigen::Vector3d tail = transmittance[k] * background;
  for (std::size_t i = k; i-- > 0;) {
    const double attenuated = transmittance[i] * std::exp(-set.samples[i].sigma * set.deltas[i]);
    g.d_sigma[i] = set.deltas[i] * (attenuated * set.samples[i].color - tail);
    tail += g.d_color[i] * set.samples[i].color;
  }
  return g;
}

RenderError::RenderError(int x, int y, const std::string& what)
    : std::runtime_error("pixel (" + std::to_string(x) + ", " + std::to_string(y) + "): " + what), x_(x), y_(y) {}

std::uint64_t pixel_seed(std::uint64_t seed, int x, int y) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (1 + (static_cast<std::uint64_t>(y) << 32 | static_cast<std::uint32_t>(x)));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CompositeResult render_ray(const FieldFunction& field, const Ray& ray, const RenderOptions& options,
                           std::uint64_t ray_seed) {
  auto depths = sample_depths(ray, options.samples_per_ray, options.mode, ray_seed);
  std::vector<FieldSample> samples;
  samples.reserve(depths.size());
  for (double z : depths) samples.push_back(field(ray.at(z), ray.direction));
  return composite(make_sample_set(std::move(depths), ray.far, std::move(samples)), options.background);
}

Image render_image(const FieldFunction& field, const Camera& camera, const RenderOptions& options) {
  const auto rays = generate_rays(camera);
  Image image(camera.width(), camera.height());
  const int workers = std::max(1, std::min(options.threads, camera.height()));

  struct Failure {
    long long index = -1;
    int x = 0, y = 0;
    std::string what;
  };
  std::vector<Failure> failures(static_cast<std::size_t>(workers));

  auto work = [&](int worker) {
    for (int y = worker; y < camera.height(); y += workers) {
      for (int x = 0; x < camera.width(); ++x) {
        const std::size_t idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(camera.width()) + static_cast<std::size_t>(x);
        try {
          image.pixel(x, y) = render_ray(field, rays[idx], options, pixel_seed(options.seed, x, y)).color.transpose().array();
        } catch (const std::exception& e) {
          failures[static_cast<std::size_t>(worker)] = {static_cast<long long>(idx), x, y, e.what()};
          return;
        }
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  const Failure* first = nullptr;
  for (const auto& f : failures) {
    if (f.index >= 0 && (!first || f.index < first->index)) first = &f;
  }
  if (first) throw RenderError(first->x, first->y, first->what);
  return image;
}

}  // namespace qrf
