#include "qrf/encoding.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "qrf/errors.hpp"

namespace qrf {

using std::numbers::pi;

EncoderKind parse_encoder(std::string_view name) {
  if (name == "general") return EncoderKind::GeneralQubit;
  if (name == "wavefunction") return EncoderKind::Wavefunction;
  if (name == "angle") return EncoderKind::Angle;
  if (name == "dense") return EncoderKind::DenseAngle;
  throw InvalidArgument("unknown encoder '" + std::string(name) +
                        "' (expected general|wavefunction|angle|dense)");
}

std::string to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::GeneralQubit: return "general";
    case EncoderKind::Wavefunction: return "wavefunction";
    case EncoderKind::Angle: return "angle";
    case EncoderKind::DenseAngle: return "dense";
  }
  return "?";
}

FeatureVector scale_features(EncoderKind kind, std::span<const double> unit_features) {
  FeatureVector out;
  out.values.assign(unit_features.begin(), unit_features.end());
  switch (kind) {
    case EncoderKind::Angle:
      for (double& v : out.values) v *= pi / 2;
      out.domain = FeatureDomain::AngleScaled;
      break;
    case EncoderKind::DenseAngle:
      for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = (out.values[i] + 1) / (i % 2 == 0 ? 4 : 2);
      }
      out.domain = FeatureDomain::UnitInterval;
      break;
    default:
      out.domain = FeatureDomain::Raw;
      break;
  }
  return out;
}

int qubit_demand(EncoderKind kind, std::size_t n_features) {
  detail::require(n_features >= 1, "qubit_demand: need at least one feature");
  switch (kind) {
    case EncoderKind::Angle:
      return static_cast<int>(n_features);
    case EncoderKind::DenseAngle:
    case EncoderKind::GeneralQubit:
      return static_cast<int>((n_features + 1) / 2);
    case EncoderKind::Wavefunction: {
      int n = 0;
      while ((std::size_t{1} << n) < n_features) ++n;
      return n == 0 ? 1 : n;
    }
  }
  return 0;
}

namespace {

int resolve_width(EncoderKind kind, std::size_t n_features, int requested) {
  const int need = qubit_demand(kind, n_features);
  if (requested == 0) return need;
  if (requested < need) {
    throw InvalidArgument(to_string(kind) + " encoding of " + std::to_string(n_features) +
                          " features needs " + std::to_string(need) + " qubits, got " +
                          std::to_string(requested));
  }
  return requested;
}

void require_finite(const FeatureVector& x, const char* who) {
  detail::require(!x.values.empty(), std::string(who) + ": empty feature vector");
  for (double v : x.values) {
    detail::require(std::isfinite(v), std::string(who) + ": non-finite feature");
  }
}

double feature_or_zero(const FeatureVector& x, std::size_t i) {
  return i < x.values.size() ? x.values[i] : 0.0;
}

}  // namespace

QuantumCircuit angle_encode(const FeatureVector& x, int n_qubits) {
  require_finite(x, "angle_encode");
  const int n = resolve_width(EncoderKind::Angle, x.values.size(), n_qubits);
  QuantumCircuit c(n);
  for (std::size_t k = 0; k < x.values.size(); ++k) {
    const double theta = x.values[k];
    if (theta < -pi || theta > pi) {
      throw InvalidArgument("angle_encode: feature " + std::to_string(k) + " = " +
                            std::to_string(theta) + " outside [-pi, pi]; rescale first");
    }
    c.add(gates::ry(static_cast<int>(k), 2 * theta));
  }
  return c;
}

QuantumCircuit dense_angle_encode(const FeatureVector& x, int n_qubits) {
  require_finite(x, "dense_angle_encode");
  for (std::size_t k = 0; k < x.values.size(); ++k) {
    if (x.values[k] < 0.0 || x.values[k] > 1.0) {
      throw InvalidArgument("dense_angle_encode: feature " + std::to_string(k) +
                            " outside [0, 1]; rescale first");
    }
  }
  const int n = resolve_width(EncoderKind::DenseAngle, x.values.size(), n_qubits);
  QuantumCircuit c(n);
  const std::size_t pairs = (x.values.size() + 1) / 2;
  for (std::size_t k = 0; k < pairs; ++k) {
    const double a = feature_or_zero(x, 2 * k);
    const double b = feature_or_zero(x, 2 * k + 1);
    const int q = static_cast<int>(k);
    c.add(gates::ry(q, 2 * pi * a));
    c.add(gates::rz(q, 2 * pi * b));
  }
  return c;
}

Statevector wavefunction_encode(const FeatureVector& x, int n_qubits) {
  require_finite(x, "wavefunction_encode");
  double norm2 = 0;
  for (double v : x.values) norm2 += v * v;
  if (!(norm2 > 0)) throw InvalidArgument("wavefunction_encode: zero feature vector");
  const double norm = std::sqrt(norm2);
  const int n = resolve_width(EncoderKind::Wavefunction, x.values.size(), n_qubits);
  Statevector::Vector amps = Statevector::Vector::Zero(Eigen::Index{1} << n);
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    amps(static_cast<Eigen::Index>(i)) = x.values[i] / norm;
  }
  return Statevector::from_amplitudes(std::move(amps));
}

Statevector general_qubit_encode(const FeatureVector& x, int n_qubits) {
  require_finite(x, "general_qubit_encode");
  const int n = resolve_width(EncoderKind::GeneralQubit, x.values.size(), n_qubits);
  const std::size_t pairs = (x.values.size() + 1) / 2;

  // Product state built qubit by qubit: amplitude(i) = prod_k psi_k(bit_k(i)).
  std::vector<std::array<double, 2>> factors(static_cast<std::size_t>(n), {1.0, 0.0});
  for (std::size_t k = 0; k < pairs; ++k) {
    const double a = feature_or_zero(x, 2 * k);
    const double b = feature_or_zero(x, 2 * k + 1);
    const double r = std::hypot(a, b);
    if (!(r > 0)) {
      throw InvalidArgument("general_qubit_encode: feature pair " + std::to_string(k) +
                            " is (0, 0)");
    }
    factors[k] = {a / r, b / r};
  }
  Statevector::Vector amps(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    double v = 1.0;
    for (int q = 0; q < n && v != 0.0; ++q) v *= factors[static_cast<std::size_t>(q)][(i >> q) & 1];
    amps(i) = v;
  }
  return Statevector::from_amplitudes(std::move(amps));
}

Statevector encode(EncoderKind kind, const FeatureVector& x, int n_qubits) {
  switch (kind) {
    case EncoderKind::Angle: {
      auto s = zero_state(n_qubits);
      apply_circuit(s, angle_encode(x, n_qubits));
      return s;
    }
    case EncoderKind::DenseAngle: {
      auto s = zero_state(n_qubits);
      apply_circuit(s, dense_angle_encode(x, n_qubits));
      return s;
    }
    case EncoderKind::Wavefunction:
      return wavefunction_encode(x, n_qubits);
    case EncoderKind::GeneralQubit:
      return general_qubit_encode(x, n_qubits);
  }
  throw InvalidArgument("encode: unknown encoder");
}

}  // namespace qrf
