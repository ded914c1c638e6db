#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qrf/encoding.hpp"
#include "qrf/model/activation.hpp"
#include "qrf/pqc.hpp"
#include "qrf/render/volume.hpp"

namespace qrf {

/// Sinusoidal lift: for l = 0..L-1 and each component x, (sin(2^l pi x), cos(2^l pi x)).
/// L = 0 returns p unchanged. Components must lie in [-1, 1].
Eigen::VectorXd positional_encode(const Eigen::VectorXd& p, int frequencies);

/// (theta, phi) -> (sin theta cos phi, sin theta sin phi, cos theta).
Eigen::Vector3d direction_from_angles(double theta, double phi);

/// Architecture of the hybrid field.
///
/// Position features gamma(p) are encoded on the position register and run
/// through PQC A; density is read from that register alone. Colour uses the
/// position register tensored with gamma(d) on a direction register, runs PQC A
/// then PQC B over every qubit and reads all of them. With position_dim = 2 there
/// is no direction register and no density head (image regression).
struct QrfConfig {
  EncoderKind encoder = EncoderKind::DenseAngle;
  TemplateKind template_kind = TemplateKind::LayeredRotCnot;
  int layers_position = 2;
  int layers_color = 2;
  ActivationKind activation = ActivationKind::QReLU;
  int freq_position = 4;
  int freq_direction = 2;
  int position_dim = 3;
  int position_qubits = 0;   // 0: the encoder's demand
  int direction_qubits = 0;  // 0: the encoder's demand

  friend bool operator==(const QrfConfig&, const QrfConfig&) = default;
};

/// Offsets of each block inside the flat parameter vector:
/// [PQC A | PQC B | density head (w, b) | colour head (3 x n_color w, 3 b)].
struct ParamLayout {
  int pqc_a = 0, n_pqc_a = 0;
  int pqc_b = 0, n_pqc_b = 0;
  int sigma_head = 0, n_sigma_head = 0;
  int color_head = 0, n_color_head = 0;
  int total = 0;
};

/// Upstream derivatives of a scalar loss with respect to one field sample.
struct FieldCotangent {
  Eigen::Vector3d d_color = Eigen::Vector3d::Zero();
  double d_sigma = 0.0;
};

class QrfModel {
 public:
  /// Validates the config; throws InvalidArgument when the encoder demand exceeds
  /// a register or a frequency count is unusable, ResourceLimit above the qubit cap.
  explicit QrfModel(const QrfConfig& config);

  const QrfConfig& config() const { return config_; }
  const ParamLayout& layout() const { return layout_; }
  int param_count() const { return layout_.total; }
  int position_qubits() const { return n_pos_; }
  int direction_qubits() const { return n_dir_; }
  int color_qubits() const { return n_pos_ + n_dir_; }
  bool has_density() const { return config_.position_dim == 3; }

  /// Circuit angles uniform in [-pi, pi], head weights N(0, 0.1^2), biases 0.
  ParamVector init_params(std::uint64_t seed) const;

  /// Field at position p in [-1, 1]^dim and unit view direction (ignored in 2D).
  FieldSample evaluate(const ParamVector& params, const Eigen::VectorXd& p,
                       const Eigen::Vector3d& direction = Eigen::Vector3d::UnitZ()) const;

  /// Same, with the direction given as (theta, phi).
  FieldSample evaluate_angles(const ParamVector& params, const Eigen::VectorXd& p, double theta, double phi) const;

  /// Density alone; reads only the position register.
  double density(const ParamVector& params, const Eigen::VectorXd& p) const;

  /// Adds d loss / d params to `grad` given the loss cotangent at this sample
  /// and returns the sample. Circuit derivatives use the parameter-shift rule.
  FieldSample accumulate_gradient(const ParamVector& params, const Eigen::VectorXd& p,
                                  const Eigen::Vector3d& direction, const FieldCotangent& cotangent,
                                  Eigen::Ref<Eigen::VectorXd> grad) const;

  /// Encoded input states, exposed for the oracle tests.
  Statevector position_state(const Eigen::VectorXd& p) const;
  Statevector color_input_state(const Eigen::VectorXd& p, const Eigen::Vector3d& direction) const;

  /// PQC A alone (position register) and PQC A then PQC B (full colour register).
  QuantumCircuit density_circuit(const ParamVector& params) const;
  QuantumCircuit color_circuit(const ParamVector& params) const;

 private:
  void check_position(const Eigen::VectorXd& p) const;
  void check_params(const ParamVector& params) const;

  QrfConfig config_;
  PqcTemplate pqc_a_;
  PqcTemplate pqc_b_;
  int n_pos_ = 0;
  int n_dir_ = 0;
  ParamLayout layout_;
  std::vector<int> pos_readouts_;
  std::vector<int> color_readouts_;
};

}  // namespace qrf
