#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace qrf {

class QuantumCircuit;

enum class GateKind {
  RX,
  RY,
  RZ,
  H,
  X,
  CNOT,
  CRX,
  CRZ,
  ControlledUnitaryPower,
  DiagonalPhase,
};

std::string to_string(GateKind kind);

/// One instruction of a circuit.
///
/// Every kind except ControlledUnitaryPower is a (multi-)controlled operation on
/// its targets. RX/RY/RZ/H/X/CNOT/CRX/CRZ act on a single target.
///
/// DiagonalPhase multiplies each basis state by exp(i * params[x]) where x is the
/// value of the target register read little-endian (targets[0] is bit 0), so
/// params has 2^targets.size() entries. Z on q is DiagonalPhase({q}, {0, pi}).
///
/// ControlledUnitaryPower applies `body` `power` times, body qubit i mapped to
/// targets[i], every body gate additionally conditioned on `controls`.
struct GateOp {
  GateKind kind = GateKind::H;
  std::vector<double> params;
  std::vector<int> targets;
  std::vector<int> controls;
  // Index of the trainable parameter that drives params[0]; -1 for fixed gates.
  int param_index = -1;
  std::shared_ptr<const QuantumCircuit> body;
  std::uint64_t power = 1;
};

/// Throws InvalidArgument if the op is malformed or touches qubits >= n_qubits.
void validate_gate(const GateOp& op, int n_qubits);

/// Gate with angles negated (rotations, phases) or the body inverted.
GateOp inverse_gate(const GateOp& op);

/// True for kinds the parameter-shift machinery can differentiate.
bool is_shiftable(GateKind kind);

namespace gates {

GateOp rx(int target, double theta, int param_index = -1);
GateOp ry(int target, double theta, int param_index = -1);
GateOp rz(int target, double theta, int param_index = -1);
GateOp h(int target);
GateOp x(int target);
GateOp mcx(std::vector<int> controls, int target);
GateOp cnot(int control, int target);
GateOp crx(int control, int target, double theta, int param_index = -1);
GateOp crz(int control, int target, double theta, int param_index = -1);
GateOp z(int target);
GateOp phase(std::vector<int> targets, std::vector<double> phases, std::vector<int> controls = {});
/// Controlled phase exp(i*phi) on |11> of (a, b).
GateOp cphase(int a, int b, double phi);
GateOp controlled_power(std::shared_ptr<const QuantumCircuit> body, std::vector<int> targets,
                        std::vector<int> controls, std::uint64_t power);

}  // namespace gates

/// The 2x2 unitary of a single-target gate kind (not DiagonalPhase / ControlledUnitaryPower).
template <typename Real>
Eigen::Matrix<std::complex<Real>, 2, 2> single_qubit_matrix(GateKind kind, double theta) {
  using C = std::complex<Real>;
  Eigen::Matrix<C, 2, 2> u;
  const Real c = static_cast<Real>(std::cos(theta / 2));
  const Real s = static_cast<Real>(std::sin(theta / 2));
  switch (kind) {
    case GateKind::RX:
    case GateKind::CRX:
      u << C(c, 0), C(0, -s), C(0, -s), C(c, 0);
      break;
    case GateKind::RY:
      u << C(c, 0), C(-s, 0), C(s, 0), C(c, 0);
      break;
    case GateKind::RZ:
    case GateKind::CRZ:
      u << C(c, -s), C(0, 0), C(0, 0), C(c, s);
      break;
    case GateKind::H: {
      const Real r = static_cast<Real>(1.0 / std::sqrt(2.0));
      u << C(r, 0), C(r, 0), C(r, 0), C(-r, 0);
      break;
    }
    case GateKind::X:
    case GateKind::CNOT:
      u << C(0, 0), C(1, 0), C(1, 0), C(0, 0);
      break;
    default:
      throw std::logic_error("single_qubit_matrix: not a single-target gate");
  }
  return u;
}

}  // namespace qrf
