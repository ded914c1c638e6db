#pragma once

#include <Eigen/Core>

#include "qrf/render/image.hpp"

namespace qrf {

/// Grayscale conversion weights (Rec. 601 luma by default).
struct LumaWeights {
  double r = 0.299;
  double g = 0.587;
  double b = 0.114;
};

Eigen::ArrayXXd to_grayscale(const Image& image, const LumaWeights& weights = {});

double mean_squared_error(const Image& a, const Image& b);

/// 10 log10(1 / MSE) over all channels; +infinity for identical images.
double psnr(const Image& a, const Image& b);

inline constexpr int kSsimWindow = 8;

/// Mean SSIM over every 8x8 window (stride 1) of the grayscale images, with
/// C1 = 0.01^2 and C2 = 0.03^2 for unit dynamic range and population statistics.
double ssim(const Image& a, const Image& b, const LumaWeights& weights = {});

}  // namespace qrf
