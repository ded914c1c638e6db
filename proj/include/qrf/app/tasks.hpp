#pragma once

#include <string>
#include <vector>

#include "qrf/app/artifacts.hpp"
#include "qrf/app/config.hpp"
#include "qrf/qintegrate/counting.hpp"
#include "qrf/render/image.hpp"

namespace qrf::app {

/// Model architecture for a task: fit2d has no direction register or density head.
QrfConfig model_config(const ExperimentConfig& config);

/// fit2d target: the constant colour, or the image box-downsampled to max_side.
Image load_fit2d_target(const ExperimentConfig& config);

/// One sample per pixel, coordinates of pixel centres mapped to [-1, 1]^2.
std::vector<PixelSample> pixel_samples(const Image& target);

/// The model's colour at every pixel centre.
Image predict_image(const QrfModel& model, const ParamVector& params, int width, int height);

/// CSV (comma / whitespace separated, '#' comments) or JSON (array, or object with "energies").
qint::EnergyTable load_energy_table(const std::string& path);

/// Table used by the convergence study when no energy file is given.
qint::EnergyTable default_study_table();

/// Each runner returns the summary it writes to <output_dir>/summary.json. With
/// write_artifacts = false nothing is written (used by the ablation grid).
Json run_fit2d(const ExperimentConfig& config, bool write_artifacts = true);
Json run_fit3d(const ExperimentConfig& config, bool write_artifacts = true);
Json run_render(const ExperimentConfig& config);
Json run_qcount(const ExperimentConfig& config);
Json run_convergence(const ExperimentConfig& config);
Json run_ablate(const ExperimentConfig& config);
/// Quantum-integrated render of a 2 x 2 version of the camera view, four rays per pixel.
Json run_qrender(const ExperimentConfig& config);

/// Validates the config and dispatches on config.task.
Json run_task(const ExperimentConfig& config);

}  // namespace qrf::app
