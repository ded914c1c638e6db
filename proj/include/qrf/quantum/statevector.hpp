#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qrf/errors.hpp"
#include "qrf/quantum/circuit.hpp"
#include "qrf/quantum/gate.hpp"

namespace qrf {

/// Largest register the simulator will allocate (2^24 amplitudes, 256 MiB in double).
inline constexpr int kMaxQubits = 24;

/// Dense pure state over n qubits. Basis index = bitstring with qubit 0 as the
/// least significant bit.
template <typename Real>
class BasicStatevector {
 public:
  using RealScalar = Real;
  using Scalar = std::complex<Real>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Index = Eigen::Index;

  /// |0...0> on n qubits.
  explicit BasicStatevector(int n_qubits) : n_qubits_(checked_width(n_qubits)) {
    amplitudes_ = Vector::Zero(Index{1} << n_qubits_);
    amplitudes_(0) = Scalar(1);
  }

  /// Adopts raw amplitudes; the length must be 2^n and the norm 1 within 1e-10.
  static BasicStatevector from_amplitudes(Vector amplitudes) {
    const Index dim = amplitudes.size();
    int n = 0;
    while ((Index{1} << n) < dim) ++n;
    if (dim < 2 || (Index{1} << n) != dim) {
      throw InvalidArgument("from_amplitudes: length must be a power of two >= 2");
    }
    const Real norm2 = amplitudes.squaredNorm();
    if (!(std::abs(norm2 - Real(1)) <= Real(1e-10))) {
      throw InvalidArgument("from_amplitudes: amplitudes must have unit norm");
    }
    BasicStatevector s(n);
    s.amplitudes_ = std::move(amplitudes);
    return s;
  }

  int n_qubits() const { return n_qubits_; }
  Index dim() const { return amplitudes_.size(); }
  const Vector& amplitudes() const { return amplitudes_; }
  Scalar operator[](Index i) const { return amplitudes_(i); }
  Real norm_squared() const { return amplitudes_.squaredNorm(); }

  /// Controlled 2x2 unitary on `target`; applied where all bits in ctrl_mask are set.
  void apply_2x2(int target, std::uint64_t ctrl_mask, const Eigen::Matrix<Scalar, 2, 2>& u) {
    const Index half = dim() >> 1;
    const Index tbit = Index{1} << target;
    const Index low = tbit - 1;
    const auto mask = static_cast<Index>(ctrl_mask);
    const Scalar u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    Scalar* a = amplitudes_.data();
    for (Index k = 0; k < half; ++k) {
      const Index i0 = ((k & ~low) << 1) | (k & low);
      if ((i0 & mask) != mask) continue;
      const Index i1 = i0 | tbit;
      const Scalar a0 = a[i0];
      const Scalar a1 = a[i1];
      a[i0] = u00 * a0 + u01 * a1;
      a[i1] = u10 * a0 + u11 * a1;
    }
  }

  /// Controlled bit flip on `target`.
  void apply_x(int target, std::uint64_t ctrl_mask) {
    const Index half = dim() >> 1;
    const Index tbit = Index{1} << target;
    const Index low = tbit - 1;
    const auto mask = static_cast<Index>(ctrl_mask);
    Scalar* a = amplitudes_.data();
    for (Index k = 0; k < half; ++k) {
      const Index i0 = ((k & ~low) << 1) | (k & low);
      if ((i0 & mask) != mask) continue;
      std::swap(a[i0], a[i0 | tbit]);
    }
  }

  /// Controlled diag(d0, d1) on `target`.
  void apply_diag(int target, std::uint64_t ctrl_mask, Scalar d0, Scalar d1) {
    const Index tbit = Index{1} << target;
    const auto mask = static_cast<Index>(ctrl_mask);
    Scalar* a = amplitudes_.data();
    for (Index i = 0; i < dim(); ++i) {
      if ((i & mask) != mask) continue;
      a[i] *= (i & tbit) ? d1 : d0;
    }
  }

  /// Multiplies basis state i by phases[x(i)], x = target bits read little-endian.
  void apply_phase_table(std::span<const int> targets, std::uint64_t ctrl_mask,
                         std::span<const Scalar> phases) {
    const auto mask = static_cast<Index>(ctrl_mask);
    Scalar* a = amplitudes_.data();
    for (Index i = 0; i < dim(); ++i) {
      if ((i & mask) != mask) continue;
      std::size_t x = 0;
      for (std::size_t b = 0; b < targets.size(); ++b) {
        x |= static_cast<std::size_t>((i >> targets[b]) & 1) << b;
      }
      a[i] *= phases[x];
    }
  }

  /// Tensor product with `high` placed on the qubits above this state's.
  BasicStatevector tensor(const BasicStatevector& high) const {
    const int n = n_qubits_ + high.n_qubits_;
    BasicStatevector out(checked_width(n));
    const Index lo = dim();
    for (Index h = 0; h < high.dim(); ++h) {
      out.amplitudes_.segment(h * lo, lo) = high.amplitudes_(h) * amplitudes_;
    }
    return out;
  }

 private:
  static int checked_width(int n) {
    if (n < 1 || n > kMaxQubits) {
      throw InvalidArgument("statevector width " + std::to_string(n) + " outside [1, " +
                            std::to_string(kMaxQubits) + "]");
    }
    return n;
  }

  int n_qubits_;
  Vector amplitudes_;
};

using Statevector = BasicStatevector<double>;

template <typename Real = double>
BasicStatevector<Real> zero_state(int n_qubits) {
  return BasicStatevector<Real>(n_qubits);
}

namespace detail {

inline std::uint64_t control_mask(const std::vector<int>& controls, const std::vector<int>* map) {
  std::uint64_t mask = 0;
  for (int q : controls) mask |= std::uint64_t{1} << (map ? (*map)[static_cast<std::size_t>(q)] : q);
  return mask;
}

// Applies op with its qubits routed through `map` (nullptr = identity) and extra controls.
template <typename Real>
void apply_mapped(BasicStatevector<Real>& state, const GateOp& op, const std::vector<int>* map,
                  std::uint64_t extra_mask) {
  using C = std::complex<Real>;
  auto route = [map](int q) { return map ? (*map)[static_cast<std::size_t>(q)] : q; };
  const std::uint64_t mask = extra_mask | control_mask(op.controls, map);
  switch (op.kind) {
    case GateKind::X:
    case GateKind::CNOT:
      state.apply_x(route(op.targets[0]), mask);
      return;
    case GateKind::RZ:
    case GateKind::CRZ: {
      const Real half = static_cast<Real>(op.params[0] / 2);
      state.apply_diag(route(op.targets[0]), mask, std::polar(Real(1), -half),
                       std::polar(Real(1), half));
      return;
    }
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::CRX:
    case GateKind::H:
      state.apply_2x2(route(op.targets[0]), mask,
                      single_qubit_matrix<Real>(op.kind, op.params.empty() ? 0.0 : op.params[0]));
      return;
    case GateKind::DiagonalPhase: {
      std::vector<int> targets(op.targets.size());
      for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = route(op.targets[i]);
      std::vector<C> phases(op.params.size());
      for (std::size_t i = 0; i < phases.size(); ++i) {
        phases[i] = std::polar(Real(1), static_cast<Real>(op.params[i]));
      }
      state.apply_phase_table(targets, mask, phases);
      return;
    }
    case GateKind::ControlledUnitaryPower: {
      std::vector<int> body_map(op.targets.size());
      for (std::size_t i = 0; i < body_map.size(); ++i) body_map[i] = route(op.targets[i]);
      for (std::uint64_t rep = 0; rep < op.power; ++rep) {
        for (const auto& inner : op.body->ops()) apply_mapped(state, inner, &body_map, mask);
      }
      return;
    }
  }
}

}  // namespace detail

/// Applies one gate in place. Throws InvalidArgument when the gate does not fit the state.
template <typename Real>
void apply_gate(BasicStatevector<Real>& state, const GateOp& gate) {
  validate_gate(gate, state.n_qubits());
  detail::apply_mapped(state, gate, nullptr, 0);
}

/// Applies the circuit's gates in list order.
template <typename Real>
void apply_circuit(BasicStatevector<Real>& state, const QuantumCircuit& circuit) {
  if (circuit.n_qubits() != state.n_qubits()) {
    throw InvalidArgument("apply_circuit: circuit has " + std::to_string(circuit.n_qubits()) +
                          " qubits, state has " + std::to_string(state.n_qubits()));
  }
  // Ops were validated when added to the circuit.
  for (const auto& op : circuit.ops()) detail::apply_mapped(state, op, nullptr, 0);
}

/// Applies ops [first, last) of a circuit whose width matches the state.
template <typename Real>
void apply_ops(BasicStatevector<Real>& state, const QuantumCircuit& circuit, std::size_t first,
               std::size_t last) {
  for (std::size_t i = first; i < last; ++i) detail::apply_mapped(state, circuit.ops()[i], nullptr, 0);
}

/// Exact <Z> on one qubit.
template <typename Real>
Real expectation_z(const BasicStatevector<Real>& state, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits()) {
    throw InvalidArgument("expectation_z: qubit " + std::to_string(qubit) + " out of range");
  }
  const Eigen::Index bit = Eigen::Index{1} << qubit;
  Real plus = 0, minus = 0;
  const auto& a = state.amplitudes();
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    const Real p = std::norm(a(i));
    if (i & bit) {
      minus += p;
    } else {
      plus += p;
    }
  }
  return plus - minus;
}

template <typename Real>
std::vector<Real> probabilities(const BasicStatevector<Real>& state) {
  std::vector<Real> p(static_cast<std::size_t>(state.dim()));
  for (Eigen::Index i = 0; i < state.dim(); ++i) p[static_cast<std::size_t>(i)] = std::norm(state[i]);
  return p;
}

/// Draws `shots` computational-basis outcomes. For realism studies only; all
/// library code uses exact expectations.
template <typename Real>
std::vector<std::uint64_t> sample_outcomes(const BasicStatevector<Real>& state, std::size_t shots,
                                           std::uint64_t seed) {
  const auto p = probabilities(state);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::uint64_t> dist(p.begin(), p.end());
  std::vector<std::uint64_t> out(shots);
  for (auto& o : out) o = dist(rng);
  return out;
}

/// Shot-sampled estimate of <Z> on one qubit.
template <typename Real>
Real sampled_expectation_z(const BasicStatevector<Real>& state, int qubit, std::size_t shots,
                           std::uint64_t seed) {
  if (qubit < 0 || qubit >= state.n_qubits()) {
    throw InvalidArgument("sampled_expectation_z: qubit out of range");
  }
  detail::require(shots > 0, "sampled_expectation_z: shots must be positive");
  long long acc = 0;
  for (auto o : sample_outcomes(state, shots, seed)) acc += ((o >> qubit) & 1) ? -1 : 1;
  return static_cast<Real>(acc) / static_cast<Real>(shots);
}

}  // namespace qrf
