#include "qrf/render/camera.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "qrf/errors.hpp"

namespace qrf {

void validate_ray(const Ray& ray) {
  detail::require(std::abs(ray.direction.norm() - 1.0) <= 1e-12, "ray direction must be unit length");
  detail::require(ray.near >= 0.0 && ray.near < ray.far, "ray needs 0 <= near < far");
}

Camera::Camera(Eigen::Vector3d position, Eigen::Matrix3d rotation, double focal_px, int width, int height,
               double near, double far)
    : position_(std::move(position)),
      rotation_(std::move(rotation)),
      focal_(focal_px),
      width_(width),
      height_(height),
      near_(near),
      far_(far) {
  const double ortho_err = (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  detail::require(ortho_err <= 1e-9, "camera rotation must be orthonormal");
  detail::require(rotation_.determinant() > 0, "camera rotation must be proper (det = +1)");
  detail::require(focal_ > 0 && std::isfinite(focal_), "camera focal length must be positive");
  detail::require(near_ >= 0 && near_ < far_, "camera needs 0 <= near < far");
  detail::require(width_ >= 0 && height_ >= 0, "camera image size must be non-negative");
}

Camera Camera::look_at(const Eigen::Vector3d& position, const Eigen::Vector3d& target,
                       const Eigen::Vector3d& up, double focal_px, int width, int height, double near,
                       double far) {
  const Eigen::Vector3d fwd = target - position;
  detail::require(fwd.norm() > 0, "look_at: target coincides with position");
  const Eigen::Vector3d f = fwd.normalized();
  const Eigen::Vector3d side = f.cross(up);
  detail::require(side.norm() > 1e-12, "look_at: up vector is parallel to the view direction");
  const Eigen::Vector3d right = side.normalized();
  const Eigen::Vector3d true_up = right.cross(f);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = true_up;
  r.col(2) = -f;
  return Camera(position, r, focal_px, width, height, near, far);
}

Ray Camera::pixel_ray(int x, int y) const {
  const Eigen::Vector3d cam((x + 0.5 - width_ / 2.0) / focal_, -(y + 0.5 - height_ / 2.0) / focal_, -1.0);
  Ray ray;
  ray.origin = position_;
  ray.direction = (rotation_ * cam).normalized();
  ray.near = near_;
  ray.far = far_;
  return ray;
}

std::vector<Ray> generate_rays(const Camera& camera) {
  if (camera.width() <= 0 || camera.height() <= 0) {
    throw InvalidArgument("generate_rays: image has zero size");
  }
  std::vector<Ray> rays;
  rays.reserve(static_cast<std::size_t>(camera.width()) * static_cast<std::size_t>(camera.height()));
  for (int y = 0; y < camera.height(); ++y) {
    for (int x = 0; x < camera.width(); ++x) rays.push_back(camera.pixel_ray(x, y));
  }
  return rays;
}

}  // namespace qrf
