#include "qrf/render/metrics.hpp"

#include <cmath>
#include <limits>

#include "qrf/errors.hpp"

namespace qrf {

namespace {

void require_same_shape(const Image& a, const Image& b, const char* who) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw InvalidArgument(std::string(who) + ": image dimensions differ (" + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                          std::to_string(b.height()) + ")");
  }
  detail::require(a.size() > 0, std::string(who) + ": empty image");
}

}  // namespace

Eigen::ArrayXXd to_grayscale(const Image& image, const LumaWeights& w) {
  Eigen::ArrayXXd gray(image.height(), image.width());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const auto p = image.pixel(x, y);
      gray(y, x) = w.r * p(0) + w.g * p(1) + w.b * p(2);
    }
  }
  return gray;
}

double mean_squared_error(const Image& a, const Image& b) {
  require_same_shape(a, b, "mean_squared_error");
  return (a.pixels() - b.pixels()).square().mean();
}

double psnr(const Image& a, const Image& b) {
  const double mse = mean_squared_error(a, b);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b, const LumaWeights& weights) {
  require_same_shape(a, b, "ssim");
  if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
    throw InvalidArgument("ssim: image smaller than the 8x8 window");
  }
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  const Eigen::ArrayXXd ga = to_grayscale(a, weights);
  const Eigen::ArrayXXd gb = to_grayscale(b, weights);
  const int rows = a.height() - kSsimWindow + 1;
  const int cols = a.width() - kSsimWindow + 1;

  double total = 0.0;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      const auto wa = ga.block(y, x, kSsimWindow, kSsimWindow);
      const auto wb = gb.block(y, x, kSsimWindow, kSsimWindow);
      const double mu_a = wa.mean();
      const double mu_b = wb.mean();
      const double var_a = (wa - mu_a).square().mean();
      const double var_b = (wb - mu_b).square().mean();
      const double cov = ((wa - mu_a) * (wb - mu_b)).mean();
      total += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
    }
  }
  return total / (static_cast<double>(rows) * cols);
}

}  // namespace qrf
