#pragma once

#include <vector>

#include <Eigen/Core>

namespace qrf {

struct Ray {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();  // unit length
  double near = 0.0;
  double far = 1.0;

  Eigen::Vector3d at(double depth) const { return origin + depth * direction; }
};

/// Throws InvalidArgument unless |direction| = 1 (1e-12) and 0 <= near < far.
void validate_ray(const Ray& ray);

/// Pinhole camera. Camera space looks down -z with +y up and +x right;
/// `rotation` maps camera-space vectors to world space.
class Camera {
 public:
  Camera(Eigen::Vector3d position, Eigen::Matrix3d rotation, double focal_px, int width, int height,
         double near, double far);

  /// Camera at `position` looking at `target`, with `up` fixing the roll.
  static Camera look_at(const Eigen::Vector3d& position, const Eigen::Vector3d& target,
                        const Eigen::Vector3d& up, double focal_px, int width, int height, double near,
                        double far);

  const Eigen::Vector3d& position() const { return position_; }
  const Eigen::Matrix3d& rotation() const { return rotation_; }
  double focal() const { return focal_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double near() const { return near_; }
  double far() const { return far_; }
  Eigen::Vector3d forward() const { return -rotation_.col(2); }

  /// Ray through the centre of pixel (x, y); y = 0 is the top row.
  Ray pixel_ray(int x, int y) const;

 private:
  Eigen::Vector3d position_;
  Eigen::Matrix3d rotation_;
  double focal_;
  int width_;
  int height_;
  double near_;
  double far_;
};

/// One ray per pixel in row-major order (index y * width + x).
std::vector<Ray> generate_rays(const Camera& camera);

}  // namespace qrf
