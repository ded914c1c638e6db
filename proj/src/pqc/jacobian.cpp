#include <numbers>

#include "qrf/errors.hpp"
#include "qrf/pqc.hpp"

namespace qrf {

namespace {

constexpr double kShift = std::numbers::pi / 2;

// Runs `head` then ops (first, end) of the circuit on a copy of `prefix`.
Eigen::VectorXd run_tail(const Statevector& prefix, std::span<const GateOp> head,
                         const QuantumCircuit& circuit, std::size_t first,
                         std::span<const int> readouts) {
  Statevector s = prefix;
  for (const auto& op : head) detail::apply_mapped(s, op, nullptr, 0);
  apply_ops(s, circuit, first, circuit.size());
  return readout_z(s, readouts);
}

// Controlled rotation as RZ(theta/2 + s1) CNOT RZ(-theta/2 + s2) CNOT on the target,
// wrapped in H for the X axis.
std::vector<GateOp> expand_controlled(const GateOp& op, double s1, double s2) {
  const int c = op.controls[0];
  const int t = op.targets[0];
  const double half = op.params[0] / 2;
  std::vector<GateOp> seq;
  const bool x_axis = op.kind == GateKind::CRX;
  if (x_axis) seq.push_back(gates::h(t));
  seq.push_back(gates::rz(t, half + s1));
  seq.push_back(gates::cnot(c, t));
  seq.push_back(gates::rz(t, -half + s2));
  seq.push_back(gates::cnot(c, t));
  if (x_axis) seq.push_back(gates::h(t));
  return seq;
}

}  // namespace

Eigen::MatrixXd circuit_jacobian(const QuantumCircuit& circuit, int n_params,
                                 const Statevector& input_state, std::span<const int> readouts) {
  if (input_state.n_qubits() != circuit.n_qubits()) {
    throw InvalidArgument("circuit_jacobian: input width does not match circuit");
  }
  for (int q : readouts) {
    if (q < 0 || q >= circuit.n_qubits()) {
      throw InvalidArgument("circuit_jacobian: readout qubit " + std::to_string(q) + " out of range");
    }
  }
  for (const auto& op : circuit.ops()) {
    if (op.param_index < 0) continue;
    if (!is_shiftable(op.kind)) {
      throw UnsupportedOperation("circuit_jacobian: " + to_string(op.kind) +
                                 " gate has no parameter-shift rule");
    }
    if (op.param_index >= n_params) throw InvalidArgument("circuit_jacobian: param_index out of range");
  }

  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_params, static_cast<Eigen::Index>(readouts.size()));
  Statevector prefix = input_state;
  const auto& ops = circuit.ops();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const GateOp& op = ops[i];
    if (op.param_index >= 0) {
      auto row = jac.row(op.param_index);
      if (op.controls.empty()) {
        GateOp plus = op, minus = op;
        plus.params[0] += kShift;
        minus.params[0] -= kShift;
        const auto fp = run_tail(prefix, std::span(&plus, 1), circuit, i + 1, readouts);
        const auto fm = run_tail(prefix, std::span(&minus, 1), circuit, i + 1, readouts);
        row += ((fp - fm) / 2).transpose();
      } else {
        // theta enters the two half-angle rotations with weights +1/2 and -1/2.
        const auto a_p = run_tail(prefix, expand_controlled(op, kShift, 0), circuit, i + 1, readouts);
        const auto a_m = run_tail(prefix, expand_controlled(op, -kShift, 0), circuit, i + 1, readouts);
        const auto b_p = run_tail(prefix, expand_controlled(op, 0, kShift), circuit, i + 1, readouts);
        const auto b_m = run_tail(prefix, expand_controlled(op, 0, -kShift), circuit, i + 1, readouts);
        row += (0.5 * (a_p - a_m) / 2 - 0.5 * (b_p - b_m) / 2).transpose();
      }
    }
    detail::apply_mapped(prefix, op, nullptr, 0);
  }
  return jac;
}

}  // namespace qrf
