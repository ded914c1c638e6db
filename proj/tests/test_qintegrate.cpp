#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "qrf/errors.hpp"
#include "qrf/qintegrate/study.hpp"
#include "support/matrix_oracle.hpp"

using namespace qrf;
using namespace qrf::qint;
using std::numbers::pi;

namespace {

EnergyTable random_table(std::mt19937_64& rng, int n, const FixedPointSpec& spec) {
  std::uniform_real_distribution<double> u(0.0, std::ldexp(1.0, spec.b0) * 1.1);
  std::vector<double> f(std::size_t{1} << n);
  for (auto& x : f) x = u(rng);
  return EnergyTable(f);
}

Statevector basis_state(int n, std::uint64_t index) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  a(static_cast<Eigen::Index>(index)) = 1.0;
  return Statevector::from_amplitudes(a);
}

Statevector uniform_over(int n, int first_qubits) {
  auto s = zero_state(n);
  for (int q = 0; q < first_qubits; ++q) apply_gate(s, gates::h(q));
  return s;
}

// Probability that any qubit at or above `first` reads 1.
double high_register_weight(const Statevector& s, int first) {
  double w = 0.0;
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    if (i >> first) w += std::norm(s[i]);
  }
  return w;
}

}  // namespace

TEST_CASE("fixed point") {
  const FixedPointSpec s44(4, 4), s24(2, 4);
  CHECK(quantize(0.0, s44) == 0);
  CHECK(quantize(3.0, s44) == 3);
  CHECK(quantize(1.5, s24) == 6);
  CHECK(quantize(100.0, s24) == 15);
  CHECK(quantize(3.99, s24) == 15);
  CHECK(s24.step() == 0.25);
  CHECK_THROWS_AS(quantize(-0.1, s44), InvalidArgument);
  CHECK_THROWS_AS(FixedPointSpec(0, 4), InvalidArgument);
  CHECK_THROWS_AS(FixedPointSpec(5, 4), InvalidArgument);
  CHECK_THROWS_AS(FixedPointSpec(4, 11), InvalidArgument);
  CHECK_THROWS_AS(EnergyTable({1.0, 2.0, 3.0}), InvalidArgument);
  CHECK_THROWS_AS(EnergyTable({1.0}), InvalidArgument);
  CHECK_THROWS_AS(EnergyTable({1.0, -1.0}), InvalidArgument);
  CHECK_THROWS_AS(EnergyTable({1.0, std::nan("")}), InvalidArgument);
  CHECK(EnergyTable({1, 2, 3, 4}).n_index_qubits() == 2);
}

TEST_CASE("threshold predicate and counting identity") {
  const FixedPointSpec spec(4, 4);
  const EnergyTable t({3.0, 0.0});
  CHECK(g(0, 0, t, spec));
  CHECK(g(1, 0, t, spec));
  CHECK(g(0, 3, t, spec));
  CHECK(!g(0, 4, t, spec));
  CHECK_THROWS_AS(g(2, 0, t, spec), InvalidArgument);
  CHECK_THROWS_AS(g(0, 16, t, spec), InvalidArgument);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const FixedPointSpec s(1 + trial % 3, 3 + trial % 2);
    const auto table = random_table(rng, 1 + trial % 3, s);
    std::uint64_t sum_q = 0;
    for (std::size_t j = 0; j < table.size(); ++j) {
      std::uint32_t per_j = 0;
      for (std::uint32_t k = 0; k <= s.max_code(); ++k) per_j += g(j, k, table, s);
      CHECK(per_j == quantize(table[j], s) + 1);
      sum_q += quantize(table[j], s);
    }
    CHECK(count_marked_bruteforce(table, s) == sum_q + table.size());
  }
}

TEST_CASE("oracle f") {
  const FixedPointSpec spec(2, 2);
  const auto zero = build_oracle_f(EnergyTable({0.0, 0.0}), spec);
  CHECK(zero.empty());

  const auto of = build_oracle_f(EnergyTable({1.0, 3.0}), spec);
  CHECK(of.n_qubits() == 3);
  // |j>|0>: j on qubit 0, value on qubits 1-2.
  auto s0 = basis_state(3, 0);
  apply_circuit(s0, of);
  CHECK(std::norm(s0[0b010]) == doctest::Approx(1.0));
  auto s1 = basis_state(3, 1);
  apply_circuit(s1, of);
  CHECK(std::norm(s1[0b111]) == doctest::Approx(1.0));

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const FixedPointSpec s(2, 3);
    const auto table = random_table(rng, 1 + trial % 3, s);
    const int n = table.n_index_qubits();
    const auto circuit = build_oracle_f(table, s);
    auto state = uniform_over(n + s.b, n);
    const auto before = state;
    apply_circuit(state, circuit);
    for (Eigen::Index i = 0; i < state.dim(); ++i) {
      const std::size_t j = static_cast<std::size_t>(i) & ((std::size_t{1} << n) - 1);
      const bool expected = static_cast<std::uint32_t>(i >> n) == quantize(table[j], s);
      CHECK((std::norm(state[i]) > 1e-12) == expected);
    }
    apply_circuit(state, circuit);
    CHECK((state.amplitudes() - before.amplitudes()).norm() < 1e-12);
  }
}

TEST_CASE("phase oracle matches the classical predicate on basis states") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + trial % 2;
    const FixedPointSpec s(1 + trial % 2, 2 + trial % 2);
    const auto table = random_table(rng, n, s);
    const OracleLayout l{n, s.b};
    const auto gate_level = phase_oracle_g(table, s, OracleMode::GateLevel);
    const auto compiled = phase_oracle_g(table, s, OracleMode::Compiled);
    CHECK(gate_level.n_qubits() == l.total_qubits());
    for (std::size_t j = 0; j < table.size(); ++j) {
      for (std::uint32_t k = 0; k <= s.max_code(); ++k) {
        const std::uint64_t idx = j + (static_cast<std::uint64_t>(k) << n);
        const double sign = g(j, k, table, s) ? -1.0 : 1.0;
        auto a = basis_state(l.total_qubits(), idx);
        apply_circuit(a, gate_level);
        CHECK(std::abs(a[static_cast<Eigen::Index>(idx)] - sign) < 1e-15);
        auto c = basis_state(n + s.b, idx);
        apply_circuit(c, compiled);
        CHECK(std::abs(c[static_cast<Eigen::Index>(idx)] - sign) < 1e-15);
      }
    }
    // Ancilla hygiene and involution on a superposition.
    auto sup = uniform_over(l.total_qubits(), l.search_qubits());
    const auto start = sup;
    apply_circuit(sup, gate_level);
    CHECK(high_register_weight(sup, l.search_qubits()) < 1e-12);
    apply_circuit(sup, gate_level);
    CHECK((sup.amplitudes() - start.amplitudes()).norm() < 1e-10);
  }

  const FixedPointSpec s(2, 2);
  const auto zeros = phase_oracle_g(EnergyTable({0.0, 0.0, 0.0, 0.0}), s, OracleMode::GateLevel);
  for (std::uint64_t idx = 0; idx < 16; ++idx) {
    auto a = basis_state(OracleLayout{2, 2}.total_qubits(), idx);
    apply_circuit(a, zeros);
    CHECK(std::abs(a[static_cast<Eigen::Index>(idx)] - ((idx >> 2) == 0 ? -1.0 : 1.0)) < 1e-15);
  }
}

TEST_CASE("comparator borrow chain") {
  for (int b = 1; b <= 3; ++b) {
    const OracleLayout l{1, b};
    const auto comp = build_comparator(l);
    for (std::uint32_t v = 0; v < (1u << b); ++v) {
      for (std::uint32_t k = 0; k < (1u << b); ++k) {
        const std::uint64_t idx = (static_cast<std::uint64_t>(k) << l.threshold(0)) |
                                  (static_cast<std::uint64_t>(v) << l.value(0));
        auto s = basis_state(l.total_qubits(), idx);
        apply_circuit(s, comp);
        apply_gate(s, gates::z(l.flag()));
        apply_circuit(s, inverse(comp));
        CHECK(std::abs(s[static_cast<Eigen::Index>(idx)] - (v >= k ? -1.0 : 1.0)) < 1e-15);
      }
    }
  }
}

TEST_CASE("grover operator") {
  // No marked states: G is the diffusion, which fixes the uniform state.
  const int w = 3;
  auto s = uniform_over(w, w);
  apply_circuit(s, grover_operator(QuantumCircuit(w), w));
  CHECK((s.amplitudes() - uniform_over(w, w).amplitudes()).norm() < 1e-12);

  // Every state marked: G|s> = -|s>.
  const FixedPointSpec spec(2, 2);
  const EnergyTable full({4.0, 4.0});
  CHECK(count_marked_bruteforce(full, spec) == 8);
  auto u = uniform_over(3, 3);
  apply_circuit(u, grover_operator(full, spec));
  CHECK((u.amplitudes() + uniform_over(3, 3).amplitudes()).norm() < 1e-12);

  // n = 1, b = 1, M = 2 of T = 4: restricted eigenphase.
  const FixedPointSpec s11(1, 1);
  const EnergyTable half({0.0, 0.0});
  CHECK(count_marked_bruteforce(half, s11) == 2);
  const auto gm = oracle::circuit_matrix(grover_operator(half, s11));
  Eigen::VectorXcd marked = Eigen::VectorXcd::Zero(4), unmarked = Eigen::VectorXcd::Zero(4);
  for (std::uint64_t i = 0; i < 4; ++i) {
    const bool m = g(i & 1, static_cast<std::uint32_t>(i >> 1), half, s11);
    (m ? marked : unmarked)(static_cast<Eigen::Index>(i)) = 1.0;
  }
  marked.normalize();
  unmarked.normalize();
  Eigen::Matrix2cd r;
  r << marked.dot(gm * marked), marked.dot(gm * unmarked), unmarked.dot(gm * marked), unmarked.dot(gm * unmarked);
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(r);
  for (int i = 0; i < 2; ++i) {
    const double theta = std::arg(es.eigenvalues()(i));
    CHECK(std::abs(std::pow(std::sin(theta / 2), 2) - 0.5) < 1e-9);
  }
}

TEST_CASE("qft matches the discrete Fourier matrix") {
  for (int t = 1; t <= 4; ++t) {
    std::vector<int> q(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) q[static_cast<std::size_t>(i)] = i;
    const auto m = oracle::circuit_matrix(qft(t, q));
    const double dim = std::ldexp(1.0, t);
    double err = 0.0;
    for (int y = 0; y < (1 << t); ++y)
      for (int x = 0; x < (1 << t); ++x)
        err = std::max(err, std::abs(m(y, x) - std::polar(1.0 / std::sqrt(dim), 2 * pi * x * y / dim)));
    CHECK(err < 1e-12);
    const auto inv = oracle::circuit_matrix(inverse_qft(t, q));
    CHECK((inv * m - oracle::MatrixC::Identity(1 << t, 1 << t)).norm() < 1e-12);
  }
}

TEST_CASE("quantum counting") {
  // M = 0 through an oracle that marks nothing.
  const auto none = count_marked(QuantumCircuit(3), 3, 4);
  CHECK(none.estimate == 0.0);
  CHECK(none.oracle_queries == 15);

  const FixedPointSpec spec(2, 2);
  const auto all = quantum_count(EnergyTable({4.0, 4.0}), spec, 3);
  CHECK(all.estimate == 8.0);

  const EnergyTable half({1.0, 1.0});
  CHECK(count_marked_bruteforce(half, spec) == 4);
  for (int t = 2; t <= 6; ++t) {
    const auto r = quantum_count(half, spec, t);
    CHECK(r.estimate == 4.0);
    CHECK(r.total == 8);
    CHECK(r.oracle_queries == (std::uint64_t{1} << t) - 1);
    CHECK(r.oracle_queries == count_body_applications(counting_circuit(phase_oracle_g(half, spec), 3, t)));
  }

  const auto gl = quantum_count(EnergyTable({0.5, 2.25}), spec, 4, OracleMode::GateLevel);
  const auto cp = quantum_count(EnergyTable({0.5, 2.25}), spec, 4, OracleMode::Compiled);
  CHECK(gl.outcome == cp.outcome);
  CHECK(gl.estimate == doctest::Approx(cp.estimate).epsilon(1e-12));
  CHECK(gl.outcome_probability == doctest::Approx(cp.outcome_probability).epsilon(1e-9));

  CHECK_THROWS_AS(quantum_count(half, spec, 1), InvalidArgument);
  CHECK_THROWS_AS(quantum_count(half, spec, 22), ResourceLimit);
}

TEST_CASE("counting error bound holds in most random trials") {
  std::mt19937_64 rng(4);
  int within = 0;
  const int trials = 40;
  for (int i = 0; i < trials; ++i) {
    const FixedPointSpec s(2, 2 + i % 2);
    const auto table = random_table(rng, 1 + i % 2, s);
    const auto r = quantum_count(table, s, 5);
    const double m = static_cast<double>(count_marked_bruteforce(table, s));
    within += std::abs(r.estimate - m) <= r.error_bound;
    double mass = 0.0;
    for (double p : r.distribution) mass += p;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(within >= 0.81 * trials);
}

TEST_CASE("mean estimation") {
  const FixedPointSpec s22(2, 2);
  const EnergyTable ramp({0.0, 1.0, 2.0, 3.0});
  CHECK(ramp.quantized_mean(s22) == 1.5);
  const double m = static_cast<double>(count_marked_bruteforce(ramp, s22));
  CHECK(m == 10.0);
  CHECK(s22.step() * (m - 4) / 4 == 1.5);
  const auto e = estimate_mean(ramp, s22, 6);
  CHECK(std::abs(e.mean - 1.5) <= e.error_bound);

  const FixedPointSpec s11(1, 1);
  CHECK(estimate_mean(EnergyTable({0.0, 0.0, 0.0, 0.0}), s11, 3).mean == 0.0);
  const FixedPointSpec s33(3, 3);
  const auto zeros = estimate_mean(EnergyTable({0.0, 0.0}), s33, 6);
  CHECK(std::abs(zeros.mean) <= zeros.error_bound);

  // Constant code q with q + 1 = 2^(b-1) puts the eigenphase at 1/4: exact.
  for (int b = 1; b <= 4; ++b) {
    const FixedPointSpec s(b, b);
    const double c = (std::ldexp(1.0, b - 1) - 1) * s.step();
    for (int t = 2; t <= 5; ++t) CHECK(estimate_mean(EnergyTable({c, c, c, c}), s, t).mean == c);
  }
}

TEST_CASE("monte carlo estimate") {
  const EnergyTable flat({2.5, 2.5, 2.5, 2.5});
  for (std::uint64_t nc : {1u, 7u, 100u}) CHECK(mc_estimate(flat, nc, 3).estimate == 2.5);
  const EnergyTable t({2, 15, 0, 9, 8, 0, 10, 6});
  CHECK(mc_estimate(t, 64, 9).estimate == mc_estimate(t, 64, 9).estimate);
  CHECK_THROWS_AS(mc_estimate(t, 0, 1), InvalidArgument);

  double var = 0.0;
  for (double f : t.energies()) var += (f - t.mean()) * (f - t.mean());
  var /= 8;
  for (std::uint64_t nc : {16u, 256u}) {
    double se = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const double d = mc_estimate(t, nc, 1000 + static_cast<std::uint64_t>(trial)).estimate - t.mean();
      se += d * d;
    }
    CHECK(std::sqrt(se / 200) == doctest::Approx(std::sqrt(var / nc)).epsilon(0.2));
  }
}

TEST_CASE("convergence study") {
  CHECK(loglog_slope({1, 10, 100}, {1, 0.1, 0.01}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(loglog_slope({1}, {1}), InvalidArgument);

  StudyOptions opt;
  opt.qpe_bits = {2, 3, 4, 5};
  opt.mc_samples = {16, 64};
  opt.trials = 20;
  const FixedPointSpec s(4, 4);
  const auto flat = convergence_study(EnergyTable({7, 7, 7, 7}), s, opt);
  for (const auto& p : flat.quantum) {
    CHECK(p.error == 0.0);
    CHECK(p.envelope == 0.0);
  }
  for (const auto& p : flat.monte_carlo) CHECK(p.rmse == 0.0);
  CHECK(std::isnan(flat.quantum_slope));

  const EnergyTable t({2, 15, 0, 9, 8, 0, 10, 6});
  const auto a = convergence_study(t, s, opt);
  const auto b = convergence_study(t, s, opt);
  CHECK(a.mc_slope == b.mc_slope);
  CHECK(a.quantum_slope == b.quantum_slope);
  for (std::size_t i = 0; i < a.quantum.size(); ++i) {
    CHECK(a.quantum[i].queries == (std::uint64_t{1} << a.quantum[i].t) - 1);
    CHECK(a.quantum[i].envelope >= a.quantum[i].error);
  }
}
