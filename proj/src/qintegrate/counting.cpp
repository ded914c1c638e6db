#include "qrf/qintegrate/counting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "qrf/errors.hpp"

namespace qrf::qint {

namespace {

using std::numbers::pi;

std::vector<int> range(int first, int count) {
  std::vector<int> q(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) q[static_cast<std::size_t>(i)] = first + i;
  return q;
}

void check_width(int width, const char* who) {
  if (width > kMaxQubits) {
    throw ResourceLimit(std::string(who) + ": needs " + std::to_string(width) + " qubits, cap is " +
                        std::to_string(kMaxQubits));
  }
}

// Toffoli-style gate flipping `target` when every control is 1.
GateOp ccx(int a, int b, int target) { return gates::mcx({a, b}, target); }

}  // namespace

FixedPointSpec::FixedPointSpec(int b0_, int b_) : b0(b0_), b(b_) {
  if (!(1 <= b0 && b0 <= b && b <= 10)) {
    throw InvalidArgument("FixedPointSpec: need 1 <= b0 <= b <= 10, got b0=" + std::to_string(b0) +
                          " b=" + std::to_string(b));
  }
}

double FixedPointSpec::step() const { return std::ldexp(1.0, b0 - b); }

std::uint32_t quantize(double f, const FixedPointSpec& spec) {
  if (!(f >= 0.0)) throw InvalidArgument("quantize: energy must be finite and >= 0");
  const double scaled = std::floor(std::ldexp(f, spec.b - spec.b0));
  if (scaled >= static_cast<double>(spec.max_code())) return spec.max_code();
  return static_cast<std::uint32_t>(scaled);
}

EnergyTable::EnergyTable(std::vector<double> energies) : energies_(std::move(energies)) {
  const std::size_t n = energies_.size();
  if (n < 2 || !std::has_single_bit(n)) {
    throw InvalidArgument("EnergyTable: length must be a power of two >= 2, got " + std::to_string(n));
  }
  n_ = std::countr_zero(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(energies_[j]) || energies_[j] < 0.0) {
      throw InvalidArgument("EnergyTable: entry " + std::to_string(j) + " must be finite and >= 0");
    }
  }
}

double EnergyTable::mean() const {
  double s = 0.0;
  for (double f : energies_) s += f;
  return s / static_cast<double>(energies_.size());
}

double EnergyTable::quantized_mean(const FixedPointSpec& spec) const {
  std::uint64_t s = 0;
  for (double f : energies_) s += quantize(f, spec);
  return spec.step() * static_cast<double>(s) / static_cast<double>(energies_.size());
}

bool g(std::size_t j, std::uint32_t k, const EnergyTable& table, const FixedPointSpec& spec) {
  if (j >= table.size()) throw InvalidArgument("g: ray index out of range");
  if (k > spec.max_code()) throw InvalidArgument("g: threshold index out of range");
  return quantize(table[j], spec) >= k;
}

std::uint64_t count_marked_bruteforce(const EnergyTable& table, const FixedPointSpec& spec) {
  std::uint64_t m = 0;
  for (std::size_t j = 0; j < table.size(); ++j) {
    for (std::uint32_t k = 0; k <= spec.max_code(); ++k) m += g(j, k, table, spec);
  }
  return m;
}

QuantumCircuit build_oracle_f(const EnergyTable& table, const FixedPointSpec& spec) {
  const int n = table.n_index_qubits();
  check_width(n + spec.b, "build_oracle_f");
  QuantumCircuit c(n + spec.b);
  const std::vector<int> index = range(0, n);
  for (std::size_t j = 0; j < table.size(); ++j) {
    const std::uint32_t code = quantize(table[j], spec);
    if (code == 0) continue;
    for (int i = 0; i < n; ++i) {
      if (!((j >> i) & 1)) c.add(gates::x(i));
    }
    for (int m = 0; m < spec.b; ++m) {
      if ((code >> m) & 1) c.add(gates::mcx(index, n + m));
    }
    for (int i = 0; i < n; ++i) {
      if (!((j >> i) & 1)) c.add(gates::x(i));
    }
  }
  return c;
}

QuantumCircuit build_comparator(const OracleLayout& l) {
  check_width(l.total_qubits(), "build_comparator");
  QuantumCircuit c(l.total_qubits());
  for (int i = 0; i < l.b; ++i) {
    c.add(gates::x(l.value(i)));
    c.add(ccx(l.value(i), l.threshold(i), l.borrow(i + 1)));
    c.add(gates::cnot(l.threshold(i), l.value(i)));
    if (i > 0) c.add(ccx(l.value(i), l.borrow(i), l.borrow(i + 1)));
  }
  // Final borrow is [v < k]; the flag takes its complement.
  c.add(gates::x(l.flag()));
  c.add(gates::cnot(l.borrow(l.b), l.flag()));
  return c;
}

QuantumCircuit phase_oracle_g(const EnergyTable& table, const FixedPointSpec& spec, OracleMode mode) {
  const int n = table.n_index_qubits();
  const int b = spec.b;
  if (mode == OracleMode::Compiled) {
    check_width(n + b, "phase_oracle_g");
    std::vector<double> phases(std::size_t{1} << (n + b));
    for (std::size_t j = 0; j < table.size(); ++j) {
      const std::uint32_t code = quantize(table[j], spec);
      for (std::uint32_t k = 0; k <= spec.max_code(); ++k) {
        phases[j + (static_cast<std::size_t>(k) << n)] = code >= k ? pi : 0.0;
      }
    }
    QuantumCircuit c(n + b);
    c.add(gates::phase(range(0, n + b), std::move(phases)));
    return c;
  }

  const OracleLayout l{n, b};
  check_width(l.total_qubits(), "phase_oracle_g");
  std::vector<int> f_map = range(0, n);
  for (int m = 0; m < b; ++m) f_map.push_back(l.value(m));
  const QuantumCircuit of = build_oracle_f(table, spec);
  const QuantumCircuit comp = build_comparator(l);

  QuantumCircuit c(l.total_qubits());
  c.append(of, f_map);
  c.append(comp);
  c.add(gates::z(l.flag()));
  c.append(inverse(comp));
  c.append(of, f_map);
  return c;
}

QuantumCircuit diffusion(int search_qubits, int width) {
  detail::require(search_qubits >= 1 && search_qubits <= width, "diffusion: bad register size");
  QuantumCircuit c(width);
  for (int q = 0; q < search_qubits; ++q) c.add(gates::h(q));
  // 2|0><0| - I: phase 0 on |0...0>, pi elsewhere.
  std::vector<double> phases(std::size_t{1} << search_qubits, pi);
  phases[0] = 0.0;
  c.add(gates::phase(range(0, search_qubits), std::move(phases)));
  for (int q = 0; q < search_qubits; ++q) c.add(gates::h(q));
  return c;
}

QuantumCircuit grover_operator(const QuantumCircuit& phase_oracle, int search_qubits) {
  QuantumCircuit c(phase_oracle.n_qubits());
  c.append(phase_oracle);
  c.append(diffusion(search_qubits, phase_oracle.n_qubits()));
  return c;
}

QuantumCircuit grover_operator(const EnergyTable& table, const FixedPointSpec& spec, OracleMode mode) {
  return grover_operator(phase_oracle_g(table, spec, mode), table.n_index_qubits() + spec.b);
}

QuantumCircuit qft(int width, std::span<const int> q) {
  const int t = static_cast<int>(q.size());
  QuantumCircuit c(width);
  for (int j = t - 1; j >= 0; --j) {
    c.add(gates::h(q[static_cast<std::size_t>(j)]));
    for (int m = j - 1; m >= 0; --m) {
      c.add(gates::cphase(q[static_cast<std::size_t>(m)], q[static_cast<std::size_t>(j)],
                          2 * pi / std::ldexp(1.0, j - m + 1)));
    }
  }
  for (int i = 0; i < t / 2; ++i) {
    const int a = q[static_cast<std::size_t>(i)];
    const int b = q[static_cast<std::size_t>(t - 1 - i)];
    c.add(gates::cnot(a, b));
    c.add(gates::cnot(b, a));
    c.add(gates::cnot(a, b));
  }
  return c;
}

QuantumCircuit inverse_qft(int width, std::span<const int> qubits) { return inverse(qft(width, qubits)); }

QuantumCircuit counting_circuit(const QuantumCircuit& phase_oracle, int search_qubits, int t) {
  if (t < 2) throw InvalidArgument("quantum counting needs t >= 2 register qubits");
  const int w = phase_oracle.n_qubits();
  check_width(w + t, "quantum_count");
  auto grover = std::make_shared<const QuantumCircuit>(grover_operator(phase_oracle, search_qubits));
  const std::vector<int> reg = range(w, t);
  const std::vector<int> body_targets = range(0, w);

  QuantumCircuit c(w + t);
  for (int q = 0; q < search_qubits; ++q) c.add(gates::h(q));
  for (int q : reg) c.add(gates::h(q));
  for (int i = 0; i < t; ++i) {
    c.add(gates::controlled_power(grover, body_targets, {reg[static_cast<std::size_t>(i)]}, std::uint64_t{1} << i));
  }
  c.append(inverse_qft(w + t, reg));
  return c;
}

double counting_error_bound(double m_hat, double total, int t) {
  const double m = std::clamp(m_hat, 0.0, total);
  return 2 * pi * std::sqrt(m * (total - m)) / std::ldexp(1.0, t) + pi * pi * total / std::ldexp(1.0, 2 * t);
}

double count_from_outcome(std::uint64_t y, double total, int t) {
  const double sn = std::sin(pi * static_cast<double>(y) / std::ldexp(1.0, t));
  const double m_hat = total * sn * sn;
  return std::abs(m_hat - std::round(m_hat)) <= 1e-9 * total ? std::round(m_hat) : m_hat;
}

std::vector<std::uint64_t> confident_outcomes(const std::vector<double>& distribution) {
  std::vector<std::uint64_t> order(distribution.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint64_t a, std::uint64_t b) { return distribution[a] > distribution[b]; });
  const double target = 8.0 / (pi * pi);
  double mass = 0.0;
  std::vector<std::uint64_t> out;
  for (auto y : order) {
    out.push_back(y);
    mass += distribution[y];
    if (mass >= target) break;
  }
  return out;
}

CountResult count_marked(const QuantumCircuit& phase_oracle, int search_qubits, int t) {
  const QuantumCircuit circuit = counting_circuit(phase_oracle, search_qubits, t);
  const int w = phase_oracle.n_qubits();
  Statevector s(w + t);
  apply_circuit(s, circuit);

  std::vector<double> p(std::size_t{1} << t, 0.0);
  const auto& a = s.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) p[static_cast<std::size_t>(i >> w)] += std::norm(a(i));
  std::size_t y = 0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] > p[y]) y = k;
  }

  CountResult r;
  r.total = std::uint64_t{1} << search_qubits;
  r.qpe_bits = t;
  r.oracle_queries = count_body_applications(circuit);
  r.outcome = y;
  r.outcome_probability = p[y];
  const double total = static_cast<double>(r.total);
  r.estimate = count_from_outcome(y, total, t);
  r.error_bound = counting_error_bound(r.estimate, total, t);
  r.distribution = std::move(p);
  return r;
}

CountResult quantum_count(const EnergyTable& table, const FixedPointSpec& spec, int t, OracleMode mode) {
  return count_marked(phase_oracle_g(table, spec, mode), table.n_index_qubits() + spec.b, t);
}

MeanEstimate estimate_mean(const EnergyTable& table, const FixedPointSpec& spec, int t, OracleMode mode) {
  MeanEstimate e;
  e.count = quantum_count(table, spec, t, mode);
  const double n = static_cast<double>(table.size());
  e.mean = spec.step() * (e.count.estimate - n) / n;
  e.error_bound = spec.step() * e.count.error_bound / n;
  return e;
}

}  // namespace qrf::qint
