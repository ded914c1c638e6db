#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "qrf/quantum/circuit.hpp"
#include "qrf/quantum/statevector.hpp"

namespace qrf::qint {

/// Non-negative reals with b0 integer bits out of b total; step 2^(b0 - b).
struct FixedPointSpec {
  int b0 = 4;
  int b = 4;

  FixedPointSpec() = default;
  /// Throws InvalidArgument unless 1 <= b0 <= b <= 10.
  FixedPointSpec(int b0, int b);

  double step() const;
  std::uint32_t max_code() const { return (1u << b) - 1; }
};

/// floor(2^(b - b0) f), clamped to 2^b - 1. Throws InvalidArgument for f < 0.
std::uint32_t quantize(double f, const FixedPointSpec& spec);

/// Per-ray energies f(j), j < N = 2^n.
class EnergyTable {
 public:
  /// Throws InvalidArgument unless the length is a power of two (n >= 1) and
  /// every entry is finite and >= 0.
  explicit EnergyTable(std::vector<double> energies);

  int n_index_qubits() const { return n_; }
  std::size_t size() const { return energies_.size(); }
  double operator[](std::size_t j) const { return energies_[j]; }
  const std::vector<double>& energies() const { return energies_; }

  double mean() const;
  /// Mean of the quantized codes in energy units.
  double quantized_mean(const FixedPointSpec& spec) const;

 private:
  int n_;
  std::vector<double> energies_;
};

/// Classical reference threshold predicate: 1 iff quantize(f(j)) >= k.
bool g(std::size_t j, std::uint32_t k, const EnergyTable& table, const FixedPointSpec& spec);

/// Sum over all (j, k) of g(j, k), by exhaustive loop.
std::uint64_t count_marked_bruteforce(const EnergyTable& table, const FixedPointSpec& spec);

/// Register layout of the gate-level oracle. Index register j at [0, n), threshold k
/// at [n, n + b), value register v, comparator borrows c_1..c_b, then one flag qubit.
struct OracleLayout {
  int n = 0;
  int b = 0;

  int index(int i) const { return i; }
  int threshold(int i) const { return n + i; }
  int value(int i) const { return n + b + i; }
  int borrow(int i) const { return n + 2 * b + i - 1; }  // c_i for i in [1, b]
  int flag() const { return n + 3 * b; }
  int search_qubits() const { return n + b; }
  int total_qubits() const { return n + 3 * b + 1; }
};

/// |j>|0>_b -> |j>|quantize(f(j))>_b as multi-controlled bit sets on n + b qubits,
/// value register directly above j. Self-inverse.
QuantumCircuit build_oracle_f(const EnergyTable& table, const FixedPointSpec& spec);

/// Ripple-borrow comparison writing [v >= k] into the flag (gate-level layout).
QuantumCircuit build_comparator(const OracleLayout& layout);

enum class OracleMode {
  Compiled,   // one diagonal phase table over the j, k register
  GateLevel,  // O_f, COMP, Z on the flag, then both uncomputed, with ancillas
};

/// |j>|k> -> (-1)^g(j,k) |j>|k>. GateLevel acts on OracleLayout::total_qubits() with
/// every ancilla returned to |0>; Compiled acts on the n + b search qubits only.
QuantumCircuit phase_oracle_g(const EnergyTable& table, const FixedPointSpec& spec,
                              OracleMode mode = OracleMode::Compiled);

/// 2|s><s| - I on the first `search_qubits` qubits of a `width`-qubit register.
QuantumCircuit diffusion(int search_qubits, int width);

/// G = D O where O is a phase oracle whose first `search_qubits` qubits are searched.
QuantumCircuit grover_operator(const QuantumCircuit& phase_oracle, int search_qubits);
QuantumCircuit grover_operator(const EnergyTable& table, const FixedPointSpec& spec,
                               OracleMode mode = OracleMode::Compiled);

/// QFT on `qubits` (qubits[0] least significant), bit-reversal swaps included.
QuantumCircuit qft(int width, std::span<const int> qubits);
QuantumCircuit inverse_qft(int width, std::span<const int> qubits);

struct CountResult {
  double estimate = 0.0;        // M-hat
  std::uint64_t total = 0;      // T = 2^search_qubits
  int qpe_bits = 0;             // t
  std::uint64_t oracle_queries = 0;  // N_q, counted from the circuit
  std::uint64_t outcome = 0;    // modal register value y
  double outcome_probability = 0.0;
  double error_bound = 0.0;
  std::vector<double> distribution;  // P(y) for every register value
};

/// M-hat for register outcome y: T sin^2(pi y / 2^t), snapped to an integer within 1e-9 T.
double count_from_outcome(std::uint64_t y, double total, int t);

/// Smallest set of most probable outcomes (ties to smaller y) carrying at least
/// 8 / pi^2 of the probability, the standard phase-estimation success mass.
std::vector<std::uint64_t> confident_outcomes(const std::vector<double>& distribution);

/// Quantum counting on an arbitrary phase oracle: uniform search state, t-qubit
/// register above the oracle's qubits, controlled G^(2^i), inverse QFT, modal
/// outcome y (ties to the smaller y), M-hat = T sin^2(pi y / 2^t).
CountResult count_marked(const QuantumCircuit& phase_oracle, int search_qubits, int t);

/// Counting for an energy table. Throws ResourceLimit beyond the simulator cap
/// and InvalidArgument for t < 2.
CountResult quantum_count(const EnergyTable& table, const FixedPointSpec& spec, int t,
                          OracleMode mode = OracleMode::Compiled);

/// The phase-estimation circuit used by count_marked, exposed for query accounting.
QuantumCircuit counting_circuit(const QuantumCircuit& phase_oracle, int search_qubits, int t);

/// |M - M-hat| bound for t-bit counting, evaluated at M-hat:
/// 2 pi sqrt(M(T - M)) / 2^t + pi^2 T / 4^t.
double counting_error_bound(double m_hat, double total, int t);

struct MeanEstimate {
  double mean = 0.0;
  double error_bound = 0.0;  // in energy units
  CountResult count;
};

/// 2^(b0 - b) (M-hat - N) / N.
MeanEstimate estimate_mean(const EnergyTable& table, const FixedPointSpec& spec, int t,
                           OracleMode mode = OracleMode::Compiled);

}  // namespace qrf::qint
