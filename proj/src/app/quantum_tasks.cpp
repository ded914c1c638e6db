#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "qrf/app/scene.hpp"
#include "qrf/app/tasks.hpp"
#include "qrf/errors.hpp"
#include "qrf/qintegrate/study.hpp"
#include "qrf/render/image_io.hpp"

namespace qrf::app {

namespace {

namespace fs = std::filesystem;

qint::FixedPointSpec fixed_point(const ExperimentConfig& config) {
  try {
    return qint::FixedPointSpec(config.b0, config.b);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config keys 'b0'/'b': ") + e.what());
  }
}

std::string mode_name(qint::OracleMode mode) { return mode == qint::OracleMode::Compiled ? "compiled" : "gate"; }

Json count_json(const qint::CountResult& c) {
  Json j;
  j["estimate"] = c.estimate;
  j["total"] = c.total;
  j["qpe_bits"] = c.qpe_bits;
  j["oracle_queries"] = c.oracle_queries;
  j["outcome"] = c.outcome;
  j["outcome_probability"] = c.outcome_probability;
  j["error_bound"] = c.error_bound;
  return j;
}

}  // namespace

qint::EnergyTable load_energy_table(const std::string& path) {
  const std::string text = read_text(path);
  std::vector<double> values;
  try {
    if (fs::path(path).extension() == ".json") {
      const Json j = Json::parse(text);
      const Json& arr = j.is_object() ? j.at("energies") : j;
      values = arr.get<std::vector<double>>();
    } else {
      std::stringstream lines(text);
      std::string line;
      while (std::getline(lines, line)) {
        line = line.substr(0, line.find('#'));
        for (char& ch : line) {
          if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
        }
        std::stringstream tokens(line);
        std::string tok;
        while (tokens >> tok) {
          std::size_t used = 0;
          const double v = std::stod(tok, &used);
          if (used != tok.size()) throw ConfigError("'" + tok + "' is not a number");
          values.push_back(v);
        }
      }
    }
    return qint::EnergyTable(values);
  } catch (const std::exception& e) {
    throw ConfigError("config key 'energy_file': cannot read energies from '" + path + "': " + e.what());
  }
}

qint::EnergyTable default_study_table() { return qint::EnergyTable({2, 15, 0, 9, 8, 0, 10, 6}); }

Json run_qcount(const ExperimentConfig& config) {
  const auto table = load_energy_table(config.energy_file);
  const auto spec = fixed_point(config);
  const auto est = qint::estimate_mean(table, spec, config.qpe_bits, config.oracle);
  const std::string dir = ensure_dir(resolve_output_dir(config));
  Json s;
  s["task"] = "qcount";
  s.update(provenance(config));
  s["rays"] = table.size();
  s["b0"] = spec.b0;
  s["b"] = spec.b;
  s["oracle"] = mode_name(config.oracle);
  s["true_mean"] = table.mean();
  s["quantized_mean"] = table.quantized_mean(spec);
  s["estimated_mean"] = est.mean;
  s["mean_error_bound"] = est.error_bound;
  s["marked_exact"] = qint::count_marked_bruteforce(table, spec);
  s["count"] = count_json(est.count);
  write_text((fs::path(dir) / "summary.json").string(), s.dump(1) + "\n");
  return s;
}

Json run_convergence(const ExperimentConfig& config) {
  const auto table = config.energy_file.empty() ? default_study_table() : load_energy_table(config.energy_file);
  const auto spec = fixed_point(config);
  if (config.t_min < 2 || config.t_max < config.t_min) throw ConfigError("config keys 't_min'/'t_max': need 2 <= t_min <= t_max");
  if (config.nc_min < 1 || config.nc_max < config.nc_min) throw ConfigError("config keys 'nc_min'/'nc_max': need 1 <= nc_min <= nc_max");
  if (config.trials < 1) throw ConfigError("config key 'trials': must be >= 1");
  qint::StudyOptions opt;
  opt.qpe_bits.clear();
  for (int t = config.t_min; t <= config.t_max; ++t) opt.qpe_bits.push_back(t);
  opt.mc_samples.clear();
  for (long nc = config.nc_min; nc <= config.nc_max; nc *= 2) opt.mc_samples.push_back(static_cast<std::uint64_t>(nc));
  opt.trials = config.trials;
  opt.seed = config.seed;
  opt.mode = config.oracle;
  const auto report = qint::convergence_study(table, spec, opt);

  const std::string dir = ensure_dir(resolve_output_dir(config));
  std::string csv = "# config_hash=" + config_hash(config) + " seed=" + std::to_string(config.seed) + "\n";
  csv += "method,cost,error,reference\n";
  char line[256];
  for (const auto& p : report.quantum) {
    std::snprintf(line, sizeof(line), "quantum,%llu,%.17g,%.17g\n", static_cast<unsigned long long>(p.queries),
                  p.envelope, p.error_bound);
    csv += line;
  }
  for (const auto& p : report.quantum) {
    std::snprintf(line, sizeof(line), "quantum_modal,%llu,%.17g,%.17g\n", static_cast<unsigned long long>(p.queries),
                  p.error, p.error_bound);
    csv += line;
  }
  for (const auto& p : report.monte_carlo) {
    std::snprintf(line, sizeof(line), "monte_carlo,%llu,%.17g,%.17g\n", static_cast<unsigned long long>(p.samples),
                  p.rmse, p.predicted_rmse);
    csv += line;
  }
  write_text((fs::path(dir) / "convergence.csv").string(), csv);

  Json s;
  s["task"] = "convergence";
  s.update(provenance(config));
  s["energies"] = table.energies();
  s["b0"] = spec.b0;
  s["b"] = spec.b;
  s["true_mean"] = report.true_mean;
  s["quantized_mean"] = report.quantized_mean;
  s["quantum_slope"] = std::isnan(report.quantum_slope) ? Json(nullptr) : Json(report.quantum_slope);
  s["mc_slope"] = std::isnan(report.mc_slope) ? Json(nullptr) : Json(report.mc_slope);
  s["trials"] = config.trials;
  s["quantum_error"] = "worst error over the most probable outcomes holding 8/pi^2 of the mass, against the quantized mean";
  s["mc_error"] = "RMSE against the exact mean";
  s["cost_note"] = "one oracle query is charged the same as one classical ray sample";
  write_text((fs::path(dir) / "convergence.json").string(), s.dump(1) + "\n");
  write_text((fs::path(dir) / "summary.json").string(), s.dump(1) + "\n");
  return s;
}

Json run_qrender(const ExperimentConfig& config) {
  const ToyScene scene(config.scene);
  const auto spec = fixed_point(config);
  // 2 x 2 output pixels, each integrating a 2 x 2 grid of sub-pixel rays (n = 2).
  constexpr int kSide = 2, kSub = 2;
  CameraConfig fine = config.camera;
  fine.focal = config.camera.focal * (kSide * kSub) / std::max(config.camera.width, 1);
  fine.width = fine.height = kSide * kSub;
  const Camera camera = make_camera(fine);
  const RenderOptions opts = scene_render_options(config);
  const FieldFunction field = scene.field();
  const double scale = std::ldexp(1.0, spec.b0) - spec.step();

  Image quantum(kSide, kSide), classical(kSide, kSide);
  Json pixels = Json::array();
  for (int py = 0; py < kSide; ++py) {
    for (int px = 0; px < kSide; ++px) {
      std::vector<Eigen::Vector3d> rays;
      for (int sy = 0; sy < kSub; ++sy) {
        for (int sx = 0; sx < kSub; ++sx) {
          rays.push_back(render_ray(field, camera.pixel_ray(px * kSub + sx, py * kSub + sy), opts, 0).color);
        }
      }
      Json pj;
      pj["x"] = px;
      pj["y"] = py;
      Json channels = Json::array();
      for (int ch = 0; ch < 3; ++ch) {
        std::vector<double> f;
        for (const auto& c : rays) f.push_back(c(ch) * scale);
        const qint::EnergyTable table(f);
        const auto est = qint::estimate_mean(table, spec, config.qpe_bits, config.oracle);
        quantum.pixel(px, py)(ch) = std::clamp(est.mean / scale, 0.0, 1.0);
        classical.pixel(px, py)(ch) = table.mean() / scale;
        Json cj;
        cj["classical"] = table.mean() / scale;
        cj["quantized"] = table.quantized_mean(spec) / scale;
        cj["quantum"] = est.mean / scale;
        cj["error_bound"] = est.error_bound / scale;
        cj["oracle_queries"] = est.count.oracle_queries;
        channels.push_back(cj);
      }
      pj["channels"] = channels;
      pixels.push_back(pj);
    }
  }
  const std::string dir = ensure_dir(resolve_output_dir(config));
  write_image((fs::path(dir) / "qrender.png").string(), quantum, image_provenance(config));
  write_image((fs::path(dir) / "qrender_classical.png").string(), classical, image_provenance(config));
  Json s;
  s["task"] = "qrender";
  s.update(provenance(config));
  s["scene"] = config.scene;
  s["qpe_bits"] = config.qpe_bits;
  s["rays_per_pixel"] = kSub * kSub;
  s["pixels"] = pixels;
  write_text((fs::path(dir) / "summary.json").string(), s.dump(1) + "\n");
  return s;
}

Json run_task(const ExperimentConfig& config) {
  validate_config(config);
  save_config((fs::path(ensure_dir(resolve_output_dir(config))) / "config.txt").string(), config);
  switch (config.task) {
    case Task::Fit2d: return run_fit2d(config);
    case Task::Fit3d: return run_fit3d(config);
    case Task::Render: return run_render(config);
    case Task::QCount: return run_qcount(config);
    case Task::Convergence: return run_convergence(config);
    case Task::Ablate: return run_ablate(config);
    case Task::QRender: return run_qrender(config);
  }
  throw ConfigError("unknown task");
}

}  // namespace qrf::app
