#pragma once

#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "qrf/quantum/circuit.hpp"
#include "qrf/quantum/statevector.hpp"

namespace qrf {

/// Trainable angles in radians. Layout is layer-major, qubit-minor, with the
/// rotation axis (or gate within a block) innermost; see docs/pqc_templates.md.
using ParamVector = Eigen::VectorXd;

enum class TemplateKind { LayeredRotCnot, Circuit5, Circuit6, Circuit16, Circuit17 };

/// CLI spellings: layered | c5 | c6 | c16 | c17.
TemplateKind parse_template(std::string_view name);
std::string to_string(TemplateKind kind);

struct PqcTemplate {
  TemplateKind kind = TemplateKind::LayeredRotCnot;
  int n_qubits = 1;
  int n_layers = 1;

  PqcTemplate() = default;
  /// Throws InvalidArgument for n_qubits < 1 or n_layers < 1.
  PqcTemplate(TemplateKind kind, int n_qubits, int n_layers);

  friend bool operator==(const PqcTemplate&, const PqcTemplate&) = default;
};

std::size_t param_count(const PqcTemplate& t);

/// Gate list for the template. Trainable gate i gets param_index = param_offset + i.
QuantumCircuit build_circuit(const PqcTemplate& t, const ParamVector& params, int param_offset = 0);

/// <Z> on each readout qubit.
Eigen::VectorXd readout_z(const Statevector& state, std::span<const int> readout_qubits);

/// Runs the template on a copy of input_state and reads <Z> on the readout qubits.
Eigen::VectorXd forward(const PqcTemplate& t, const ParamVector& params, const Statevector& input_state,
                        std::span<const int> readout_qubits);

/// d<Z_r>/d theta_i, shaped (param_count x readouts). Single-qubit rotations use
/// the +-pi/2 two-term shift. Controlled rotations are expanded into
/// RZ(theta/2) CNOT RZ(-theta/2) CNOT (conjugated by H for CRX) and each half-angle
/// rotation is shifted the same way, weighted by +-1/2.
Eigen::MatrixXd parameter_shift_gradient(const PqcTemplate& t, const ParamVector& params,
                                         const Statevector& input_state,
                                         std::span<const int> readout_qubits);

/// Same rule on an arbitrary circuit whose trainable gates carry param_index in
/// [0, n_params). Throws UnsupportedOperation for a trainable gate that cannot be shifted.
Eigen::MatrixXd circuit_jacobian(const QuantumCircuit& circuit, int n_params,
                                 const Statevector& input_state, std::span<const int> readout_qubits);

}  // namespace qrf
