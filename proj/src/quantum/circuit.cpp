#include "qrf/quantum/circuit.hpp"

#include <algorithm>

#include "qrf/errors.hpp"

namespace qrf {

QuantumCircuit::QuantumCircuit(int n_qubits) : n_qubits_(n_qubits) {
  detail::require(n_qubits >= 1, "QuantumCircuit: n_qubits must be positive");
}

QuantumCircuit& QuantumCircuit::add(GateOp op) {
  validate_gate(op, n_qubits_);
  ops_.push_back(std::move(op));
  return *this;
}

QuantumCircuit& QuantumCircuit::append(const QuantumCircuit& other,
                                       const std::vector<int>& qubit_map, int param_offset) {
  if (!qubit_map.empty() && qubit_map.size() != static_cast<std::size_t>(other.n_qubits())) {
    throw InvalidArgument("QuantumCircuit::append: qubit map must cover every source qubit");
  }
  if (qubit_map.empty() && other.n_qubits() > n_qubits_) {
    throw InvalidArgument("QuantumCircuit::append: source circuit is wider than destination");
  }
  auto remap = [&](int q) { return qubit_map.empty() ? q : qubit_map[static_cast<std::size_t>(q)]; };
  for (GateOp op : other.ops()) {
    for (int& q : op.targets) q = remap(q);
    for (int& q : op.controls) q = remap(q);
    if (op.param_index >= 0) op.param_index += param_offset;
    add(std::move(op));
  }
  return *this;
}

QuantumCircuit inverse(const QuantumCircuit& circuit) {
  QuantumCircuit inv(circuit.n_qubits());
  auto& ops = inv.mutable_ops();
  ops.reserve(circuit.size());
  for (auto it = circuit.ops().rbegin(); it != circuit.ops().rend(); ++it) {
    ops.push_back(inverse_gate(*it));
  }
  return inv;
}

std::uint64_t count_body_applications(const QuantumCircuit& circuit) {
  std::uint64_t total = 0;
  for (const auto& op : circuit.ops()) {
    if (op.kind == GateKind::ControlledUnitaryPower) total += op.power;
  }
  return total;
}

std::size_t count_kind(const QuantumCircuit& circuit, GateKind kind) {
  return static_cast<std::size_t>(std::count_if(
      circuit.ops().begin(), circuit.ops().end(), [kind](const GateOp& op) { return op.kind == kind; }));
}

int trainable_slots(const QuantumCircuit& circuit) {
  int slots = 0;
  for (const auto& op : circuit.ops()) slots = std::max(slots, op.param_index + 1);
  return slots;
}

}  // namespace qrf
