#include "qrf/quantum/gate.hpp"

#include <algorithm>
#include <numbers>
#include <utility>

#include "qrf/errors.hpp"
#include "qrf/quantum/circuit.hpp"

namespace qrf {

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CRX: return "CRX";
    case GateKind::CRZ: return "CRZ";
    case GateKind::ControlledUnitaryPower: return "ControlledUnitaryPower";
    case GateKind::DiagonalPhase: return "DiagonalPhase";
  }
  return "?";
}

namespace {

void check_counts(const GateOp& op, std::size_t targets, std::size_t params, int controls) {
  const std::string name = to_string(op.kind);
  if (op.targets.size() != targets) {
    throw InvalidArgument(name + ": expected " + std::to_string(targets) + " target(s)");
  }
  if (op.params.size() != params) {
    throw InvalidArgument(name + ": expected " + std::to_string(params) + " angle(s)");
  }
  if (controls >= 0 && op.controls.size() != static_cast<std::size_t>(controls)) {
    throw InvalidArgument(name + ": expected " + std::to_string(controls) + " control(s)");
  }
}

}  // namespace

void validate_gate(const GateOp& op, int n_qubits) {
  switch (op.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
      check_counts(op, 1, 1, 0);
      break;
    case GateKind::H:
      check_counts(op, 1, 0, 0);
      break;
    case GateKind::X:
      check_counts(op, 1, 0, -1);
      break;
    case GateKind::CNOT:
      check_counts(op, 1, 0, 1);
      break;
    case GateKind::CRX:
    case GateKind::CRZ:
      check_counts(op, 1, 1, 1);
      break;
    case GateKind::DiagonalPhase:
      if (op.targets.empty() || op.targets.size() > 20) {
        throw InvalidArgument("DiagonalPhase: needs 1..20 targets");
      }
      if (op.params.size() != (std::size_t{1} << op.targets.size())) {
        throw InvalidArgument("DiagonalPhase: expected 2^targets phases");
      }
      break;
    case GateKind::ControlledUnitaryPower:
      if (!op.body) throw InvalidArgument("ControlledUnitaryPower: missing body");
      if (op.targets.size() != static_cast<std::size_t>(op.body->n_qubits())) {
        throw InvalidArgument("ControlledUnitaryPower: targets must map every body qubit");
      }
      if (!op.params.empty()) throw InvalidArgument("ControlledUnitaryPower: takes no angles");
      if (op.power == 0) throw InvalidArgument("ControlledUnitaryPower: power must be >= 1");
      break;
  }
  if (op.param_index >= 0 && !is_shiftable(op.kind)) {
    throw InvalidArgument(to_string(op.kind) + ": cannot carry a trainable parameter");
  }

  std::vector<int> seen;
  seen.reserve(op.targets.size() + op.controls.size());
  for (const auto* list : {&op.targets, &op.controls}) {
    for (int q : *list) {
      if (q < 0 || q >= n_qubits) {
        throw InvalidArgument(to_string(op.kind) + ": qubit index " + std::to_string(q) +
                              " out of range for " + std::to_string(n_qubits) + " qubits");
      }
      if (std::find(seen.begin(), seen.end(), q) != seen.end()) {
        throw InvalidArgument(to_string(op.kind) + ": qubit " + std::to_string(q) +
                              " used twice");
      }
      seen.push_back(q);
    }
  }
}

GateOp inverse_gate(const GateOp& op) {
  GateOp inv = op;
  switch (op.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::CRX:
    case GateKind::CRZ:
    case GateKind::DiagonalPhase:
      for (double& p : inv.params) p = -p;
      break;
    case GateKind::ControlledUnitaryPower:
      inv.body = std::make_shared<const QuantumCircuit>(inverse(*op.body));
      break;
    case GateKind::H:
    case GateKind::X:
    case GateKind::CNOT:
      break;
  }
  return inv;
}

bool is_shiftable(GateKind kind) {
  switch (kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::CRX:
    case GateKind::CRZ:
      return true;
    default:
      return false;
  }
}

namespace gates {

namespace {
GateOp make(GateKind kind, std::vector<int> targets, std::vector<int> controls,
            std::vector<double> params, int param_index = -1) {
  GateOp op;
  op.kind = kind;
  op.targets = std::move(targets);
  op.controls = std::move(controls);
  op.params = std::move(params);
  op.param_index = param_index;
  return op;
}
}  // namespace

GateOp rx(int target, double theta, int param_index) {
  return make(GateKind::RX, {target}, {}, {theta}, param_index);
}
GateOp ry(int target, double theta, int param_index) {
  return make(GateKind::RY, {target}, {}, {theta}, param_index);
}
GateOp rz(int target, double theta, int param_index) {
  return make(GateKind::RZ, {target}, {}, {theta}, param_index);
}
GateOp h(int target) { return make(GateKind::H, {target}, {}, {}); }
GateOp x(int target) { return make(GateKind::X, {target}, {}, {}); }
GateOp mcx(std::vector<int> controls, int target) {
  return make(GateKind::X, {target}, std::move(controls), {});
}
GateOp cnot(int control, int target) { return make(GateKind::CNOT, {target}, {control}, {}); }
GateOp crx(int control, int target, double theta, int param_index) {
  return make(GateKind::CRX, {target}, {control}, {theta}, param_index);
}
GateOp crz(int control, int target, double theta, int param_index) {
  return make(GateKind::CRZ, {target}, {control}, {theta}, param_index);
}
GateOp z(int target) { return phase({target}, {0.0, std::numbers::pi}); }
GateOp phase(std::vector<int> targets, std::vector<double> phases, std::vector<int> controls) {
  return make(GateKind::DiagonalPhase, std::move(targets), std::move(controls), std::move(phases));
}
GateOp cphase(int a, int b, double phi) { return phase({a, b}, {0.0, 0.0, 0.0, phi}); }

GateOp controlled_power(std::shared_ptr<const QuantumCircuit> body, std::vector<int> targets,
                        std::vector<int> controls, std::uint64_t power) {
  GateOp op = make(GateKind::ControlledUnitaryPower, std::move(targets), std::move(controls), {});
  op.body = std::move(body);
  op.power = power;
  return op;
}

}  // namespace gates
}  // namespace qrf
