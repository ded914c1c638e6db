#include "qrf/model/field.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "qrf/errors.hpp"

namespace qrf {

namespace {

using std::numbers::pi;

int feature_count(int dim, int frequencies) { return frequencies == 0 ? dim : 2 * frequencies * dim; }

Statevector encode_features(EncoderKind kind, const Eigen::VectorXd& features, int n_qubits) {
  const std::span<const double> values(features.data(), static_cast<std::size_t>(features.size()));
  return encode(kind, scale_features(kind, values), n_qubits);
}

std::vector<int> iota(int n) {
  std::vector<int> q(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i)] = i;
  return q;
}

Eigen::VectorXd activate_all(ActivationKind kind, const Eigen::VectorXd& z) {
  return z.unaryExpr([kind](double v) { return activate(kind, v); });
}

Eigen::VectorXd activate_derivative_all(ActivationKind kind, const Eigen::VectorXd& z) {
  return z.unaryExpr([kind](double v) { return activate_derivative(kind, v); });
}

}  // namespace

Eigen::VectorXd positional_encode(const Eigen::VectorXd& p, int frequencies) {
  detail::require(frequencies >= 0, "positional_encode: L must be >= 0");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) >= -1.0 && p(i) <= 1.0)) {
      throw InvalidArgument("positional_encode: component " + std::to_string(i) + " = " + std::to_string(p(i)) +
                            " outside [-1, 1]");
    }
  }
  if (frequencies == 0) return p;
  Eigen::VectorXd out(2 * frequencies * p.size());
  Eigen::Index k = 0;
  for (int l = 0; l < frequencies; ++l) {
    const double scale = std::ldexp(pi, l);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      out(k++) = std::sin(scale * p(i));
      out(k++) = std::cos(scale * p(i));
    }
  }
  return out;
}

Eigen::Vector3d direction_from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

QrfModel::QrfModel(const QrfConfig& config) : config_(config) {
  detail::require(config.position_dim == 2 || config.position_dim == 3, "QrfModel: position_dim must be 2 or 3");
  detail::require(config.freq_position >= 0 && config.freq_direction >= 0,
                  "QrfModel: frequency counts must be >= 0");
  detail::require(config.position_qubits >= 0 && config.direction_qubits >= 0,
                  "QrfModel: qubit counts must be >= 0");
  const bool needs_lift =
      config.encoder == EncoderKind::Wavefunction || config.encoder == EncoderKind::GeneralQubit;
  if (needs_lift && (config.freq_position < 1 || (has_density() && config.freq_direction < 1))) {
    throw InvalidArgument("QrfModel: " + to_string(config.encoder) +
                          " encoding needs at least one positional frequency (zero inputs have no state)");
  }

  const int pos_demand = qubit_demand(config.encoder, static_cast<std::size_t>(feature_count(config.position_dim, config.freq_position)));
  n_pos_ = config.position_qubits == 0 ? pos_demand : config.position_qubits;
  if (n_pos_ < pos_demand) {
    throw InvalidArgument("QrfModel: position features need " + std::to_string(pos_demand) + " qubits, register has " +
                          std::to_string(n_pos_));
  }
  if (has_density()) {
    const int dir_demand = qubit_demand(config.encoder, static_cast<std::size_t>(feature_count(3, config.freq_direction)));
    n_dir_ = config.direction_qubits == 0 ? dir_demand : config.direction_qubits;
    if (n_dir_ < dir_demand) {
      throw InvalidArgument("QrfModel: direction features need " + std::to_string(dir_demand) +
                            " qubits, register has " + std::to_string(n_dir_));
    }
  }
  if (n_pos_ + n_dir_ > kMaxQubits) {
    throw ResourceLimit("QrfModel: " + std::to_string(n_pos_ + n_dir_) + " qubits exceed the simulator cap of " +
                        std::to_string(kMaxQubits));
  }

  pqc_a_ = PqcTemplate(config.template_kind, n_pos_, config.layers_position);
  pqc_b_ = PqcTemplate(config.template_kind, color_qubits(), config.layers_color);
  pos_readouts_ = iota(n_pos_);
  color_readouts_ = iota(color_qubits());

  ParamLayout& l = layout_;
  l.pqc_a = 0;
  l.n_pqc_a = static_cast<int>(qrf::param_count(pqc_a_));
  l.pqc_b = l.pqc_a + l.n_pqc_a;
  l.n_pqc_b = static_cast<int>(qrf::param_count(pqc_b_));
  l.sigma_head = l.pqc_b + l.n_pqc_b;
  l.n_sigma_head = has_density() ? n_pos_ + 1 : 0;
  l.color_head = l.sigma_head + l.n_sigma_head;
  l.n_color_head = 3 * color_qubits() + 3;
  l.total = l.color_head + l.n_color_head;
}

ParamVector QrfModel::init_params(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-pi, pi);
  std::normal_distribution<double> weight(0.0, 0.1);
  ParamVector p = ParamVector::Zero(layout_.total);
  for (int i = 0; i < layout_.n_pqc_a + layout_.n_pqc_b; ++i) p(i) = angle(rng);
  for (int i = 0; i < layout_.n_sigma_head - 1; ++i) p(layout_.sigma_head + i) = weight(rng);
  for (int i = 0; i < 3 * color_qubits(); ++i) p(layout_.color_head + i) = weight(rng);
  return p;
}

void QrfModel::check_position(const Eigen::VectorXd& p) const {
  if (p.size() != config_.position_dim) {
    throw InvalidArgument("QrfModel: expected a " + std::to_string(config_.position_dim) + "-D position, got " +
                          std::to_string(p.size()));
  }
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) >= -1.0 && p(i) <= 1.0)) {
      throw InvalidArgument("QrfModel: position component " + std::to_string(i) + " = " + std::to_string(p(i)) +
                            " outside the normalised scene bounds [-1, 1]");
    }
  }
}

void QrfModel::check_params(const ParamVector& params) const {
  if (params.size() != layout_.total) {
    throw InvalidArgument("QrfModel: expected " + std::to_string(layout_.total) + " parameters, got " +
                          std::to_string(params.size()));
  }
}

Statevector QrfModel::position_state(const Eigen::VectorXd& p) const {
  check_position(p);
  return encode_features(config_.encoder, positional_encode(p, config_.freq_position), n_pos_);
}

Statevector QrfModel::color_input_state(const Eigen::VectorXd& p, const Eigen::Vector3d& direction) const {
  Statevector pos = position_state(p);
  if (!has_density()) return pos;
  const Eigen::VectorXd d = direction.normalized().cwiseMax(-1.0).cwiseMin(1.0);
  return pos.tensor(encode_features(config_.encoder, positional_encode(d, config_.freq_direction), n_dir_));
}

QuantumCircuit QrfModel::density_circuit(const ParamVector& params) const {
  check_params(params);
  return build_circuit(pqc_a_, params.segment(layout_.pqc_a, layout_.n_pqc_a), layout_.pqc_a);
}

QuantumCircuit QrfModel::color_circuit(const ParamVector& params) const {
  QuantumCircuit c(color_qubits());
  c.append(density_circuit(params));
  c.append(build_circuit(pqc_b_, params.segment(layout_.pqc_b, layout_.n_pqc_b), layout_.pqc_b));
  return c;
}

double QrfModel::density(const ParamVector& params, const Eigen::VectorXd& p) const {
  if (!has_density()) return 0.0;
  Statevector s = position_state(p);
  apply_circuit(s, density_circuit(params));
  const Eigen::VectorXd a = activate_all(config_.activation, readout_z(s, pos_readouts_));
  const auto w = params.segment(layout_.sigma_head, n_pos_);
  return softplus(w.dot(a) + params(layout_.sigma_head + n_pos_));
}

FieldSample QrfModel::evaluate(const ParamVector& params, const Eigen::VectorXd& p,
                               const Eigen::Vector3d& direction) const {
  check_params(params);
  FieldSample out;
  out.sigma = density(params, p);
  Statevector s = color_input_state(p, direction);
  apply_circuit(s, color_circuit(params));
  const Eigen::VectorXd a = activate_all(config_.activation, readout_z(s, color_readouts_));
  const int n = color_qubits();
  for (int ch = 0; ch < 3; ++ch) {
    const double u = params.segment(layout_.color_head + ch * n, n).dot(a) + params(layout_.color_head + 3 * n + ch);
    out.color(ch) = sigmoid(u);
  }
  return out;
}

FieldSample QrfModel::evaluate_angles(const ParamVector& params, const Eigen::VectorXd& p, double theta,
                                      double phi) const {
  return evaluate(params, p, direction_from_angles(theta, phi));
}

FieldSample QrfModel::accumulate_gradient(const ParamVector& params, const Eigen::VectorXd& p,
                                          const Eigen::Vector3d& direction, const FieldCotangent& cotangent,
                                          Eigen::Ref<Eigen::VectorXd> grad) const {
  check_params(params);
  detail::require(grad.size() == layout_.total, "accumulate_gradient: gradient length mismatch");
  const ActivationKind act = config_.activation;
  FieldSample out;

  if (has_density()) {
    const Statevector input = position_state(p);
    const QuantumCircuit circuit = density_circuit(params);
    Statevector s = input;
    apply_circuit(s, circuit);
    const Eigen::VectorXd z = readout_z(s, pos_readouts_);
    const Eigen::VectorXd a = activate_all(act, z);
    const auto w = params.segment(layout_.sigma_head, n_pos_);
    const double pre = w.dot(a) + params(layout_.sigma_head + n_pos_);
    out.sigma = softplus(pre);
    if (cotangent.d_sigma != 0.0) {
      const double ds = cotangent.d_sigma * sigmoid(pre);
      grad.segment(layout_.sigma_head, n_pos_) += ds * a;
      grad(layout_.sigma_head + n_pos_) += ds;
      const Eigen::VectorXd dz = ds * w.cwiseProduct(activate_derivative_all(act, z));
      const Eigen::MatrixXd jac = circuit_jacobian(circuit, layout_.n_pqc_a, input, pos_readouts_);
      grad.segment(layout_.pqc_a, layout_.n_pqc_a) += jac * dz;
    }
  }

  const Statevector input = color_input_state(p, direction);
  const QuantumCircuit circuit = color_circuit(params);
  Statevector s = input;
  apply_circuit(s, circuit);
  const Eigen::VectorXd z = readout_z(s, color_readouts_);
  const Eigen::VectorXd a = activate_all(act, z);
  const int n = color_qubits();
  Eigen::VectorXd da = Eigen::VectorXd::Zero(n);
  bool any = false;
  for (int ch = 0; ch < 3; ++ch) {
    const int w0 = layout_.color_head + ch * n;
    const int b = layout_.color_head + 3 * n + ch;
    const double c = sigmoid(params.segment(w0, n).dot(a) + params(b));
    out.color(ch) = c;
    const double du = cotangent.d_color(ch) * c * (1.0 - c);
    if (du == 0.0) continue;
    any = true;
    grad.segment(w0, n) += du * a;
    grad(b) += du;
    da += du * params.segment(w0, n);
  }
  if (any) {
    const Eigen::VectorXd dz = da.cwiseProduct(activate_derivative_all(act, z));
    const int n_circuit = layout_.n_pqc_a + layout_.n_pqc_b;
    const Eigen::MatrixXd jac = circuit_jacobian(circuit, n_circuit, input, color_readouts_);
    grad.segment(layout_.pqc_a, n_circuit) += jac * dz;
  }
  return out;
}

}  // namespace qrf
