#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrf/quantum/circuit.hpp"
#include "qrf/quantum/statevector.hpp"

namespace qrf {

enum class EncoderKind { GeneralQubit, Wavefunction, Angle, DenseAngle };

/// Accepts the CLI spellings general | wavefunction | angle | dense.
EncoderKind parse_encoder(std::string_view name);
std::string to_string(EncoderKind kind);

/// Range a feature vector has been scaled into.
enum class FeatureDomain { Raw, UnitInterval, AngleScaled };

struct FeatureVector {
  std::vector<double> values;
  FeatureDomain domain = FeatureDomain::Raw;
};

/// Rescales features in [-1, 1] into the domain the encoder expects:
/// Angle -> theta = (pi/2) x; DenseAngle -> (x + 1) / 4 on amplitude slots and
/// (x + 1) / 2 on phase slots, so distinct inputs give distinct states; others unchanged.
FeatureVector scale_features(EncoderKind kind, std::span<const double> unit_features);

/// Qubits needed for n features: Angle n, DenseAngle and GeneralQubit ceil(n/2),
/// Wavefunction ceil(log2 n) (at least one qubit).
int qubit_demand(EncoderKind kind, std::size_t n_features);

/// One RY(2 theta_k) per qubit: tensor_k (cos theta_k |0> + sin theta_k |1>).
/// Each theta_k must lie in [-pi, pi]. n_qubits = 0 means exactly one per feature.
QuantumCircuit angle_encode(const FeatureVector& x, int n_qubits = 0);

/// Two features (a, b) in [0, 1] per qubit:
/// cos(pi a)|0> + exp(2 pi i b) sin(pi a)|1>, up to global phase, via RY(2 pi a) RZ(2 pi b).
/// An odd trailing feature is paired with 0.
QuantumCircuit dense_angle_encode(const FeatureVector& x, int n_qubits = 0);

/// Amplitudes x_i / |x| on the first N basis states of ceil(log2 N) qubits.
Statevector wavefunction_encode(const FeatureVector& x, int n_qubits = 0);

/// Per qubit (a|0> + b|1>) / sqrt(a^2 + b^2). An odd trailing feature is paired with 0.
Statevector general_qubit_encode(const FeatureVector& x, int n_qubits = 0);

/// State produced by any encoder on an n_qubits register (unused qubits stay |0>).
Statevector encode(EncoderKind kind, const FeatureVector& x, int n_qubits);

}  // namespace qrf
