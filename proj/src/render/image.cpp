#include "qrf/render/image.hpp"

#include <algorithm>

#include "qrf/errors.hpp"

namespace qrf {

Image downsample_box(const Image& image, int max_side) {
  detail::require(max_side >= 1, "downsample_box: max_side must be >= 1");
  const int longest = std::max(image.width(), image.height());
  if (longest <= max_side) return image;
  const int f = (longest + max_side - 1) / max_side;
  const int w = image.width() / f;
  const int h = image.height() / f;
  detail::require(w >= 1 && h >= 1, "downsample_box: image too thin for the box factor");
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Eigen::Array3d acc = Eigen::Array3d::Zero();
      for (int dy = 0; dy < f; ++dy) {
        for (int dx = 0; dx < f; ++dx) acc += image.pixel(x * f + dx, y * f + dy).transpose();
      }
      out.pixel(x, y) = (acc / (f * f)).transpose();
    }
  }
  return out;
}

Image crop(const Image& image, int x0, int y0, int width, int height) {
  detail::require(x0 >= 0 && y0 >= 0 && width >= 1 && height >= 1 && x0 + width <= image.width() &&
                      y0 + height <= image.height(),
                  "crop: rectangle outside the image");
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out.pixel(x, y) = image.pixel(x0 + x, y0 + y);
  }
  return out;
}

}  // namespace qrf
