#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>

#include "qrf/app/scene.hpp"
#include "qrf/app/tasks.hpp"
#include "qrf/errors.hpp"
#include "qrf/render/image_io.hpp"
#include "qrf/render/metrics.hpp"

namespace qrf::app {

namespace {

namespace fs = std::filesystem;

struct Evaluation {
  double loss = 0.0;
  double psnr = 0.0;
  std::optional<double> ssim;
  Image image;
  std::optional<bool> sigma_view_independent;
};

std::optional<double> ssim_if_defined(const Image& a, const Image& b) {
  if (a.width() < kSsimWindow || a.height() < kSsimWindow) return std::nullopt;
  return ssim(a, b);
}

Json optional_json(const std::optional<double>& v) { return v ? metric_value(*v) : Json(nullptr); }

// Density must not depend on the view direction: 100 random direction pairs at
// a few fixed positions, compared bitwise.
bool sigma_view_independent(const QrfModel& model, const ParamVector& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5157a11dULL);
  std::uniform_real_distribution<double> coord(-0.9, 0.9);
  std::normal_distribution<double> normal;
  auto random_dir = [&] {
    Eigen::Vector3d d(normal(rng), normal(rng), normal(rng));
    return Eigen::Vector3d(d.normalized());
  };
  for (int pos = 0; pos < 3; ++pos) {
    const Eigen::Vector3d p(coord(rng), coord(rng), coord(rng));
    for (int pair = 0; pair < 100; ++pair) {
      const Eigen::Vector3d d1 = random_dir();
      const Eigen::Vector3d d2 = random_dir();
      if (model.evaluate(params, p, d1).sigma != model.evaluate(params, p, d2).sigma) return false;
    }
  }
  return true;
}

template <typename Sample>
using StepFn = std::function<double(TrainState&, std::span<const Sample>)>;
using EvalFn = std::function<Evaluation(const ParamVector&)>;

struct FitOutcome {
  Checkpoint checkpoint;
  Evaluation initial;
  Evaluation final;
};

// Shared training driver: resume or initialise, step with seeded minibatches,
// evaluate at iteration 0, every eval_every steps and at the end.
template <typename Sample>
FitOutcome fit_loop(const ExperimentConfig& config, const QrfModel& model, const std::vector<Sample>& data,
                    const StepFn<Sample>& step, const EvalFn& evaluate, const std::string& dir) {
  FitOutcome out;
  Checkpoint& ck = out.checkpoint;
  if (!config.resume.empty()) {
    ck = load_checkpoint(config.resume);
    if (ck.state.params.size() != model.param_count()) {
      throw ConfigError("config key 'resume': checkpoint has " + std::to_string(ck.state.params.size()) +
                        " parameters, model needs " + std::to_string(model.param_count()));
    }
  } else {
    ck.state = TrainState(model.init_params(config.seed));
  }
  ck.config = config;

  std::optional<JsonlWriter> metrics, timing;
  if (!dir.empty()) {
    metrics.emplace((fs::path(dir) / "metrics.jsonl").string());
    timing.emplace((fs::path(dir) / "timing.jsonl").string());
  }
  const auto start = std::chrono::steady_clock::now();
  const Json stamp = provenance(config);
  auto log = [&](const Evaluation& e) {
    if (!metrics) return;
    Json rec;
    rec["iteration"] = ck.state.iteration;
    rec["loss"] = metric_value(e.loss);
    rec["psnr"] = metric_value(e.psnr);
    rec["ssim"] = optional_json(e.ssim);
    if (e.sigma_view_independent) rec["sigma_view_independent"] = *e.sigma_view_independent;
    rec.update(stamp);
    metrics->write(rec);
    Json t;
    t["iteration"] = ck.state.iteration;
    t["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    t.update(stamp);
    timing->write(t);
  };

  out.initial = evaluate(ck.state.params);
  log(out.initial);
  out.final = out.initial;
  const std::size_t batch = config.train.batch_size > 0 ? static_cast<std::size_t>(config.train.batch_size) : data.size();
  std::vector<Sample> minibatch;
  while (ck.state.iteration < config.train.iterations) {
    const auto idx = minibatch_indices(config.seed, ck.state.iteration, data.size(), batch);
    minibatch.clear();
    for (std::size_t i : idx) minibatch.push_back(data[i]);
    ck.loss_history.push_back(step(ck.state, minibatch));
    if (ck.state.iteration % config.train.eval_every == 0 || ck.state.iteration == config.train.iterations) {
      out.final = evaluate(ck.state.params);
      log(out.final);
    }
  }
  return out;
}

Json fit_summary(const ExperimentConfig& config, const QrfModel& model, const FitOutcome& r) {
  Json s;
  s["task"] = to_string(config.task);
  s.update(provenance(config));
  s["iterations"] = r.checkpoint.state.iteration;
  s["param_count"] = model.param_count();
  s["qubits"] = model.color_qubits();
  s["initial_loss"] = metric_value(r.initial.loss);
  s["initial_psnr"] = metric_value(r.initial.psnr);
  s["initial_ssim"] = optional_json(r.initial.ssim);
  s["final_loss"] = metric_value(r.final.loss);
  s["final_psnr"] = metric_value(r.final.psnr);
  s["final_ssim"] = optional_json(r.final.ssim);
  s["psnr_gain"] = metric_value(r.final.psnr - r.initial.psnr);
  if (r.final.sigma_view_independent) s["sigma_view_independent"] = *r.final.sigma_view_independent;
  return s;
}

void write_fit_artifacts(const std::string& dir, const ExperimentConfig& config, const FitOutcome& r,
                         const Json& summary, const std::string& image_name) {
  write_image((fs::path(dir) / image_name).string(), r.final.image, image_provenance(config));
  save_checkpoint((fs::path(dir) / "checkpoint.json").string(), r.checkpoint);
  write_text((fs::path(dir) / "summary.json").string(), summary.dump(1) + "\n");
}

}  // namespace

QrfConfig model_config(const ExperimentConfig& config) {
  QrfConfig m = config.model;
  m.position_dim = config.task == Task::Fit2d ? 2 : 3;
  return m;
}

Image load_fit2d_target(const ExperimentConfig& config) {
  if (!config.constant_color.empty()) {
    if (config.image_size < 1 || config.image_size > 64) throw ConfigError("config key 'image_size': must be in [1, 64]");
    const Eigen::Vector3d color = parse_vector3("constant_color", config.constant_color);
    if ((color.array() < 0.0).any() || (color.array() > 1.0).any()) {
      throw ConfigError("config key 'constant_color': channels must lie in [0, 1]");
    }
    return Image(config.image_size, config.image_size, color);
  }
  Image image;
  try {
    image = read_image(config.image);
  } catch (const std::exception& e) {
    throw ConfigError("config key 'image': cannot load '" + config.image + "': " + e.what());
  }
  return downsample_box(image, config.max_side);
}

std::vector<PixelSample> pixel_samples(const Image& target) {
  std::vector<PixelSample> out;
  out.reserve(static_cast<std::size_t>(target.size()));
  for (int y = 0; y < target.height(); ++y) {
    for (int x = 0; x < target.width(); ++x) {
      PixelSample s;
      s.position = Eigen::Vector2d((2.0 * x + 1.0) / target.width() - 1.0, (2.0 * y + 1.0) / target.height() - 1.0);
      s.target = target.pixel(x, y).transpose().matrix();
      out.push_back(std::move(s));
    }
  }
  return out;
}

Image predict_image(const QrfModel& model, const ParamVector& params, int width, int height) {
  Image out(width, height);
  Image probe(width, height);
  const auto samples = pixel_samples(probe);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto& s = samples[static_cast<std::size_t>(y * width + x)];
      out.pixel(x, y) = model.evaluate(params, s.position).color.transpose().array();
    }
  }
  return out;
}

Json run_fit2d(const ExperimentConfig& config, bool write_artifacts) {
  const Image target = load_fit2d_target(config);
  const QrfModel model(model_config(config));
  const auto data = pixel_samples(target);
  const OptimizerOptions opt{config.train.learning_rate, config.train.momentum, config.threads};
  const StepFn<PixelSample> step = [&](TrainState& s, std::span<const PixelSample> batch) {
    return train_step(model, s, batch, opt);
  };
  const EvalFn evaluate = [&](const ParamVector& params) {
    Evaluation e;
    e.image = predict_image(model, params, target.width(), target.height());
    e.loss = mean_squared_error(e.image, target);
    e.psnr = psnr(e.image, target);
    e.ssim = ssim_if_defined(e.image, target);
    return e;
  };
  const std::string dir = write_artifacts ? ensure_dir(resolve_output_dir(config)) : std::string();
  const FitOutcome r = fit_loop<PixelSample>(config, model, data, step, evaluate, dir);
  Json summary = fit_summary(config, model, r);
  summary["width"] = target.width();
  summary["height"] = target.height();
  if (write_artifacts) {
    write_image((fs::path(dir) / "target.png").string(), target, image_provenance(config));
    write_fit_artifacts(dir, config, r, summary, "reconstruction.png");
  }
  return summary;
}

Json run_fit3d(const ExperimentConfig& config, bool write_artifacts) {
  const ToyScene scene(config.scene);
  const QrfModel model(model_config(config));
  const auto cameras = training_cameras(config);
  const auto data = training_rays(scene, cameras, config.samples_per_ray, config.threads);
  const Camera held_out = make_camera(config.camera);
  const RenderOptions render_opts = scene_render_options(config);
  const Image truth = render_image(scene.field(), held_out, render_opts);
  MarchOptions march;
  march.samples_per_ray = config.samples_per_ray;
  const OptimizerOptions opt{config.train.learning_rate, config.train.momentum, config.threads};
  const StepFn<RaySample> step = [&](TrainState& s, std::span<const RaySample> batch) {
    return train_step(model, s, batch, march, opt);
  };
  const EvalFn evaluate = [&](const ParamVector& params) {
    Evaluation e;
    e.image = render_image(field_function(model, params), held_out, render_opts);
    e.loss = loss(model, params, std::span<const RaySample>(data), march);
    e.psnr = psnr(e.image, truth);
    e.ssim = ssim_if_defined(e.image, truth);
    e.sigma_view_independent = sigma_view_independent(model, params, config.seed);
    return e;
  };
  const std::string dir = write_artifacts ? ensure_dir(resolve_output_dir(config)) : std::string();
  const FitOutcome r = fit_loop<RaySample>(config, model, data, step, evaluate, dir);
  Json summary = fit_summary(config, model, r);
  summary["training_rays"] = data.size();
  summary["scene"] = config.scene;
  if (write_artifacts) {
    write_image((fs::path(dir) / "heldout_truth.png").string(), truth, image_provenance(config));
    write_fit_artifacts(dir, config, r, summary, "heldout.png");
  }
  return summary;
}

Json run_render(const ExperimentConfig& config) {
  const Checkpoint ck = load_checkpoint(config.checkpoint);
  const QrfModel model(model_config(ck.config));
  if (ck.state.params.size() != model.param_count()) throw ConfigError("checkpoint: parameter count does not match its config");
  const std::string dir = ensure_dir(resolve_output_dir(config));
  Json summary;
  summary["task"] = "render";
  summary.update(provenance(config));
  summary["checkpoint_config_hash"] = config_hash(ck.config);
  summary["checkpoint_iteration"] = ck.state.iteration;
  Image image;
  if (!model.has_density()) {
    image = predict_image(model, ck.state.params, config.camera.width, config.camera.height);
  } else {
    const Camera camera = make_camera(config.camera);
    const RenderOptions opts = scene_render_options(config);
    image = render_image(field_function(model, ck.state.params), camera, opts);
    const Image truth = render_image(ToyScene(ck.config.scene).field(), camera, opts);
    summary["scene"] = ck.config.scene;
    summary["psnr"] = metric_value(psnr(image, truth));
    summary["ssim"] = optional_json(ssim_if_defined(image, truth));
  }
  summary["width"] = image.width();
  summary["height"] = image.height();
  write_image((fs::path(dir) / "render.png").string(), image, image_provenance(config));
  write_text((fs::path(dir) / "summary.json").string(), summary.dump(1) + "\n");
  return summary;
}

namespace {

int max_frequency_within(EncoderKind encoder, int dim, int qubits) {
  int best = -1;
  for (int l = 0; l <= 16; ++l) {
    const std::size_t features = l == 0 ? static_cast<std::size_t>(dim) : static_cast<std::size_t>(2 * l * dim);
    if (qubit_demand(encoder, features) <= qubits) best = l;
  }
  return best;
}

}  // namespace

Json run_ablate(const ExperimentConfig& config) {
  if (config.ablate_task != "fit2d" && config.ablate_task != "fit3d") {
    throw ConfigError("config key 'ablate_task': expected fit2d|fit3d, got '" + config.ablate_task + "'");
  }
  if (config.ablate_repeats < 1) throw ConfigError("config key 'ablate_repeats': must be >= 1");
  if (config.ablate_activations.empty() || config.ablate_encoders.empty() || config.ablate_templates.empty()) {
    throw ConfigError("ablation grid is empty");
  }
  ExperimentConfig base = config;
  base.task = parse_task(config.ablate_task);
  base.resume.clear();
  if (base.task == Task::Fit2d) load_fit2d_target(base);  // fail early on the shared target

  const std::string dir = ensure_dir(resolve_output_dir(config));
  Json runs = Json::array();
  Json rows = Json::array();
  std::string csv = "# config_hash=" + config_hash(config) + " seed=" + std::to_string(config.seed) + "\n";
  csv += "activation,encoder,template,freq_position,position_qubits,completed,mean_final_psnr,mean_final_ssim\n";
  // final PSNR per (activation, template, encoder, repeat) for the encoder comparison
  std::map<std::tuple<std::string, std::string, std::string, int>, double> final_psnr;

  for (const auto& act : config.ablate_activations) {
    for (const auto& enc : config.ablate_encoders) {
      for (const auto& tpl : config.ablate_templates) {
        ExperimentConfig cell = base;
        Json row;
        row["activation"] = act;
        row["encoder"] = enc;
        row["template"] = tpl;
        int completed = 0;
        double psnr_sum = 0.0, ssim_sum = 0.0;
        bool ssim_defined = true;
        std::string cell_error;
        try {
          set_config_value(cell, "activation", act);
          set_config_value(cell, "encoder", enc);
          set_config_value(cell, "template", tpl);
          if (config.ablate_qubits > 0) {
            const int dim = base.task == Task::Fit2d ? 2 : 3;
            const int l = max_frequency_within(cell.model.encoder, dim, config.ablate_qubits);
            if (l < 0) throw ConfigError("encoder " + enc + " cannot fit " + std::to_string(config.ablate_qubits) + " qubits");
            cell.model.freq_position = l;
            cell.model.position_qubits = config.ablate_qubits;
          }
        } catch (const std::exception& e) {
          cell_error = e.what();
        }
        row["freq_position"] = cell.model.freq_position;
        row["position_qubits"] = cell.model.position_qubits;
        for (int r = 0; r < config.ablate_repeats; ++r) {
          ExperimentConfig run = cell;
          run.seed = config.seed + static_cast<std::uint64_t>(r);
          Json rec;
          rec["activation"] = act;
          rec["encoder"] = enc;
          rec["template"] = tpl;
          rec["seed"] = run.seed;
          try {
            if (!cell_error.empty()) throw ConfigError(cell_error);
            const Json s = run.task == Task::Fit2d ? run_fit2d(run, false) : run_fit3d(run, false);
            rec["status"] = "ok";
            rec["initial_psnr"] = s["initial_psnr"];
            rec["final_psnr"] = s["final_psnr"];
            rec["final_ssim"] = s["final_ssim"];
            const double p = s["final_psnr"].is_number() ? s["final_psnr"].get<double>()
                                                          : std::numeric_limits<double>::infinity();
            psnr_sum += p;
            if (s["final_ssim"].is_number()) {
              ssim_sum += s["final_ssim"].get<double>();
            } else {
              ssim_defined = false;
            }
            final_psnr[{act, tpl, enc, r}] = p;
            ++completed;
          } catch (const std::exception& e) {
            rec["status"] = "failed";
            rec["error"] = e.what();
          }
          runs.push_back(rec);
        }
        row["completed"] = completed;
        row["mean_final_psnr"] = completed ? metric_value(psnr_sum / completed) : Json(nullptr);
        row["mean_final_ssim"] = completed && ssim_defined ? Json(ssim_sum / completed) : Json(nullptr);
        char line[512];
        std::snprintf(line, sizeof(line), "%s,%s,%s,%d,%d,%d,%s,%s\n", act.c_str(), enc.c_str(), tpl.c_str(),
                      cell.model.freq_position, cell.model.position_qubits, completed,
                      row["mean_final_psnr"].dump().c_str(), row["mean_final_ssim"].dump().c_str());
        csv += line;
        rows.push_back(row);
      }
    }
  }

  Json comparisons = Json::array();
  for (const auto& act : config.ablate_activations) {
    for (const auto& tpl : config.ablate_templates) {
      int wins = 0, total = 0;
      for (int r = 0; r < config.ablate_repeats; ++r) {
        const auto d = final_psnr.find({act, tpl, "dense", r});
        const auto a = final_psnr.find({act, tpl, "angle", r});
        if (d == final_psnr.end() || a == final_psnr.end()) continue;
        ++total;
        wins += d->second >= a->second;
      }
      if (total == 0) continue;
      Json c;
      c["activation"] = act;
      c["template"] = tpl;
      c["dense_at_least_angle"] = wins;
      c["paired_repeats"] = total;
      c["fraction"] = static_cast<double>(wins) / total;
      comparisons.push_back(c);
    }
  }

  Json summary;
  summary["task"] = "ablate";
  summary.update(provenance(config));
  summary["cell_task"] = config.ablate_task;
  summary["rows"] = rows;
  summary["runs"] = runs;
  summary["dense_vs_angle"] = comparisons;
  write_text((fs::path(dir) / "ablation.csv").string(), csv);
  write_text((fs::path(dir) / "summary.json").string(), summary.dump(1) + "\n");
  return summary;
}

}  // namespace qrf::app
