#include "qrf/model/train.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>
#include <thread>

#include "qrf/errors.hpp"

namespace qrf {

namespace {

bool inside_box(const Eigen::Vector3d& p) { return (p.array().abs() <= 1.0).all(); }

// Runs fn(i) for i in [0, n) on `threads` workers with a strided split and
// rethrows the first failure by index.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

LossAndGradient reduce(std::vector<double>& losses, std::vector<Eigen::VectorXd>& grads, int n_params) {
  LossAndGradient out;
  out.gradient = Eigen::VectorXd::Zero(n_params);
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out.loss += losses[i];
    out.gradient += grads[i];
  }
  return out;
}

struct MarchedRay {
  SampleSet set;
  std::vector<bool> inside;
};

MarchedRay march_samples(const QrfModel& model, const ParamVector& params, const Ray& ray, const MarchOptions& march) {
  MarchedRay m;
  auto depths = sample_depths(ray, march.samples_per_ray, SamplingMode::Uniform);
  std::vector<FieldSample> samples(depths.size());
  m.inside.resize(depths.size());
  for (std::size_t k = 0; k < depths.size(); ++k) {
    const Eigen::Vector3d p = ray.at(depths[k]);
    m.inside[k] = inside_box(p);
    if (m.inside[k]) samples[k] = model.evaluate(params, p, ray.direction);
  }
  m.set = make_sample_set(std::move(depths), ray.far, std::move(samples));
  return m;
}

void check_finite(const LossAndGradient& lg, std::int64_t iteration) {
  if (std::isfinite(lg.loss) && lg.gradient.allFinite()) return;
  std::ostringstream msg;
  msg << "training diverged at iteration " << iteration << ": loss " << lg.loss;
  for (Eigen::Index i = 0; i < lg.gradient.size(); ++i) {
    if (!std::isfinite(lg.gradient(i))) {
      msg << ", gradient[" << i << "] = " << lg.gradient(i);
      break;
    }
  }
  throw TrainingDiverged(msg.str());
}

double apply_update(TrainState& state, const LossAndGradient& lg, const OptimizerOptions& options) {
  check_finite(lg, state.iteration);
  state.velocity = options.momentum * state.velocity - options.learning_rate * lg.gradient;
  state.params += state.velocity;
  if (!state.params.allFinite()) {
    throw TrainingDiverged("training diverged at iteration " + std::to_string(state.iteration) +
                           ": parameters became non-finite");
  }
  ++state.iteration;
  return lg.loss;
}

}  // namespace

double loss(const QrfModel& model, const ParamVector& params, std::span<const PixelSample> batch) {
  detail::require(!batch.empty(), "loss: empty batch");
  double total = 0.0;
  for (const auto& s : batch) total += (model.evaluate(params, s.position).color - s.target).squaredNorm();
  return total / (3.0 * static_cast<double>(batch.size()));
}

double loss(const QrfModel& model, const ParamVector& params, std::span<const RaySample> batch,
            const MarchOptions& march) {
  detail::require(!batch.empty(), "loss: empty batch");
  double total = 0.0;
  for (const auto& s : batch) total += (march_ray(model, params, s.ray, march).color - s.target).squaredNorm();
  return total / (3.0 * static_cast<double>(batch.size()));
}

LossAndGradient loss_gradient(const QrfModel& model, const ParamVector& params, std::span<const PixelSample> batch,
                              int threads) {
  detail::require(!batch.empty(), "loss_gradient: empty batch");
  const double scale = 1.0 / (3.0 * static_cast<double>(batch.size()));
  std::vector<double> losses(batch.size());
  std::vector<Eigen::VectorXd> grads(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t i) {
    grads[i] = Eigen::VectorXd::Zero(model.param_count());
    const Eigen::Vector3d predicted = model.evaluate(params, batch[i].position).color;
    const Eigen::Vector3d residual = predicted - batch[i].target;
    losses[i] = scale * residual.squaredNorm();
    FieldCotangent cot;
    cot.d_color = 2.0 * scale * residual;
    model.accumulate_gradient(params, batch[i].position, Eigen::Vector3d::UnitZ(), cot, grads[i]);
  });
  return reduce(losses, grads, model.param_count());
}

LossAndGradient loss_gradient(const QrfModel& model, const ParamVector& params, std::span<const RaySample> batch,
                              const MarchOptions& march, int threads) {
  detail::require(!batch.empty(), "loss_gradient: empty batch");
  detail::require(model.has_density(), "loss_gradient: ray batches need a 3-D model");
  const double scale = 1.0 / (3.0 * static_cast<double>(batch.size()));
  std::vector<double> losses(batch.size());
  std::vector<Eigen::VectorXd> grads(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t i) {
    grads[i] = Eigen::VectorXd::Zero(model.param_count());
    const Ray& ray = batch[i].ray;
    const MarchedRay m = march_samples(model, params, ray, march);
    const CompositeGradient g = composite_with_gradient(m.set, march.background);
    const Eigen::Vector3d residual = g.value.color - batch[i].target;
    losses[i] = scale * residual.squaredNorm();
    const Eigen::Vector3d d_pixel = 2.0 * scale * residual;
    for (std::size_t k = 0; k < m.set.depths.size(); ++k) {
      if (!m.inside[k]) continue;
      FieldCotangent cot;
      cot.d_color = g.d_color[k] * d_pixel;
      cot.d_sigma = g.d_sigma[k].dot(d_pixel);
      model.accumulate_gradient(params, ray.at(m.set.depths[k]), ray.direction, cot, grads[i]);
    }
  });
  return reduce(losses, grads, model.param_count());
}

double train_step(const QrfModel& model, TrainState& state, std::span<const PixelSample> batch,
                  const OptimizerOptions& options) {
  return apply_update(state, loss_gradient(model, state.params, batch, options.threads), options);
}

double train_step(const QrfModel& model, TrainState& state, std::span<const RaySample> batch,
                  const MarchOptions& march, const OptimizerOptions& options) {
  return apply_update(state, loss_gradient(model, state.params, batch, march, options.threads), options);
}

std::vector<std::size_t> minibatch_indices(std::uint64_t seed, std::int64_t iteration, std::size_t n,
                                           std::size_t batch) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (batch >= n) return idx;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(iteration), static_cast<std::uint32_t>(static_cast<std::uint64_t>(iteration) >> 32)};
  std::mt19937_64 rng(seq);
  for (std::size_t i = 0; i < batch; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(batch);
  return idx;
}

FieldFunction field_function(const QrfModel& model, const ParamVector& params) {
  return [&model, params](const Eigen::Vector3d& p, const Eigen::Vector3d& d) {
    if (!inside_box(p)) return FieldSample{};
    return model.evaluate(params, p, d);
  };
}

CompositeResult march_ray(const QrfModel& model, const ParamVector& params, const Ray& ray,
                          const MarchOptions& march) {
  return composite(march_samples(model, params, ray, march).set, march.background);
}

}  // namespace qrf
