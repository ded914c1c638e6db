#pragma once

#include <Eigen/Core>

namespace qrf {

/// RGB image with channel values in [0, 1], pixels stored row-major (y * width + x).
class Image {
 public:
  using Pixels = Eigen::Array<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

  Image() = default;
  Image(int width, int height) : width_(width), height_(height), pixels_(Pixels::Zero(width * height, 3)) {}
  Image(int width, int height, const Eigen::Vector3d& fill) : Image(width, height) {
    pixels_.rowwise() = fill.transpose().array();
  }

  int width() const { return width_; }
  int height() const { return height_; }
  Eigen::Index size() const { return pixels_.rows(); }

  auto pixel(int x, int y) { return pixels_.row(static_cast<Eigen::Index>(y) * width_ + x); }
  auto pixel(int x, int y) const { return pixels_.row(static_cast<Eigen::Index>(y) * width_ + x); }

  Pixels& pixels() { return pixels_; }
  const Pixels& pixels() const { return pixels_; }

  friend bool operator==(const Image& a, const Image& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && (a.pixels_ == b.pixels_).all();
  }

 private:
  int width_ = 0;
  int height_ = 0;
  Pixels pixels_;
};

/// Averages f x f blocks, f = ceil(max(w, h) / max_side); trailing partial blocks are cropped.
/// Returns the input unchanged when it already fits.
Image downsample_box(const Image& image, int max_side);

/// Crop of the given rectangle.
Image crop(const Image& image, int x0, int y0, int width, int height);

}  // namespace qrf
