#pragma once

#include <cstdint>
#include <vector>

#include "qrf/quantum/gate.hpp"

namespace qrf {

/// Ordered gate list over a fixed register width.
class QuantumCircuit {
 public:
  explicit QuantumCircuit(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  const std::vector<GateOp>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  bool empty() const { return ops_.empty(); }

  /// Validates against the register width before appending.
  QuantumCircuit& add(GateOp op);

  /// Appends `other` gate by gate; other's qubit i lands on qubit_map[i]
  /// (identity when the map is empty). Trainable indices are shifted by
  /// param_offset.
  QuantumCircuit& append(const QuantumCircuit& other, const std::vector<int>& qubit_map = {},
                         int param_offset = 0);

  std::vector<GateOp>& mutable_ops() { return ops_; }

 private:
  int n_qubits_;
  std::vector<GateOp> ops_;
};

/// Reversed gate list with every gate inverted.
QuantumCircuit inverse(const QuantumCircuit& circuit);

/// Total number of body executions performed by top-level
/// ControlledUnitaryPower ops.
std::uint64_t count_body_applications(const QuantumCircuit& circuit);

/// Number of ops of one kind at the top level.
std::size_t count_kind(const QuantumCircuit& circuit, GateKind kind);

/// Largest param_index + 1 over the circuit (0 when nothing is trainable).
int trainable_slots(const QuantumCircuit& circuit);

}  // namespace qrf
