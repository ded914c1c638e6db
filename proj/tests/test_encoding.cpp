#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qrf/encoding.hpp"

using namespace qrf;
using std::numbers::pi;
using Cd = std::complex<double>;

namespace {

FeatureVector fv(std::vector<double> v, FeatureDomain d = FeatureDomain::Raw) { return {std::move(v), d}; }

Statevector run(const QuantumCircuit& c) {
  auto s = zero_state(c.n_qubits());
  apply_circuit(s, c);
  return s;
}

// Number of gate layers when gates on disjoint qubits share a layer.
int circuit_depth(const QuantumCircuit& c) {
  std::vector<int> level(static_cast<std::size_t>(c.n_qubits()), 0);
  int depth = 0;
  for (const auto& op : c.ops()) {
    int l = 0;
    for (int q : op.targets) l = std::max(l, level[static_cast<std::size_t>(q)]);
    for (int q : op.controls) l = std::max(l, level[static_cast<std::size_t>(q)]);
    ++l;
    for (int q : op.targets) level[static_cast<std::size_t>(q)] = l;
    for (int q : op.controls) level[static_cast<std::size_t>(q)] = l;
    depth = std::max(depth, l);
  }
  return depth;
}

bool equal_up_to_phase(const Statevector& s, const Eigen::VectorXcd& ref, double tol) {
  const Cd overlap = ref.dot(s.amplitudes());
  return std::abs(std::abs(overlap) - 1.0) < tol;
}

}  // namespace

TEST_CASE("angle_encode") {
  auto s00 = run(angle_encode(fv({0, 0})));
  CHECK(std::abs(s00[0] - Cd(1, 0)) < 1e-15);

  auto s1 = run(angle_encode(fv({pi / 2})));
  CHECK(std::abs(s1[1] - Cd(1, 0)) < 1e-15);

  auto quarter = run(angle_encode(fv({pi / 4, pi / 4})));
  for (int i = 0; i < 4; ++i) CHECK(std::abs(quarter[i] - Cd(0.5, 0)) < 1e-15);

  CHECK_THROWS_AS(angle_encode(fv({4.0})), InvalidArgument);
  CHECK_THROWS_AS(angle_encode(fv({-3.2})), InvalidArgument);

  // Amplitudes match the tensor product of (cos theta_k, sin theta_k).
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-pi, pi);
  std::vector<double> th{u(rng), u(rng), u(rng)};
  auto s = run(angle_encode(fv(th)));
  for (int i = 0; i < 8; ++i) {
    double ref = 1;
    for (int k = 0; k < 3; ++k) ref *= ((i >> k) & 1) ? std::sin(th[k]) : std::cos(th[k]);
    CHECK(std::abs(s[i] - Cd(ref, 0)) < 1e-14);
  }
}

TEST_CASE("angle encoding is a single layer") {
  for (std::size_t n = 1; n <= 16; ++n) {
    std::vector<double> x(n, 0.3);
    CHECK(circuit_depth(angle_encode(fv(x))) == 1);
  }
}

TEST_CASE("dense_angle_encode") {
  auto s0 = run(dense_angle_encode(fv({0, 0})));
  CHECK(equal_up_to_phase(s0, Eigen::Vector2cd(1, 0), 1e-14));

  auto s1 = run(dense_angle_encode(fv({0.5, 0})));
  CHECK(equal_up_to_phase(s1, Eigen::Vector2cd(0, 1), 1e-14));

  // (1/4, 1/2): cos(pi/4)|0> + e^{i pi} sin(pi/4)|1>.
  auto s2 = run(dense_angle_encode(fv({0.25, 0.5})));
  const double r = 1 / std::sqrt(2.0);
  CHECK(equal_up_to_phase(s2, Eigen::Vector2cd(r, -r), 1e-14));

  // General pair against direct amplitude construction.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 20; ++t) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    auto s = run(dense_angle_encode(fv({a, b, c, d})));
    Eigen::VectorXcd q0(2), q1(2);
    q0 << std::cos(pi * a), std::exp(Cd(0, 2 * pi * b)) * std::sin(pi * a);
    q1 << std::cos(pi * c), std::exp(Cd(0, 2 * pi * d)) * std::sin(pi * c);
    Eigen::VectorXcd ref(4);
    for (int i = 0; i < 4; ++i) ref(i) = q0(i & 1) * q1((i >> 1) & 1);
    CHECK(equal_up_to_phase(s, ref, 1e-13));
  }

  CHECK_THROWS_AS(dense_angle_encode(fv({1.2, 0})), InvalidArgument);
  CHECK_THROWS_AS(dense_angle_encode(fv({0.2, -0.1})), InvalidArgument);
  CHECK(dense_angle_encode(fv({0.1, 0.2, 0.3})).n_qubits() == 2);
}

TEST_CASE("wavefunction_encode") {
  auto s = wavefunction_encode(fv({1, 0, 0, 0}));
  CHECK(s.n_qubits() == 2);
  CHECK(s[0] == Cd(1, 0));

  auto s34 = wavefunction_encode(fv({3, 4}));
  CHECK(s34.n_qubits() == 1);
  CHECK(std::abs(s34[0] - Cd(0.6, 0)) < 1e-15);
  CHECK(std::abs(s34[1] - Cd(0.8, 0)) < 1e-15);

  auto uni = wavefunction_encode(fv({1, 1, 1, 1}));
  for (int i = 0; i < 4; ++i) CHECK(std::abs(uni[i] - Cd(0.5, 0)) < 1e-15);

  CHECK_THROWS_AS(wavefunction_encode(fv({0, 0, 0})), InvalidArgument);

  // Round trip: amplitudes reproduce x / |x|, zero padding beyond N.
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (std::size_t n = 1; n <= 16; ++n) {
    std::vector<double> x(n);
    for (double& v : x) v = g(rng);
    auto w = wavefunction_encode(fv(x));
    double norm = 0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w.dim()); ++i) {
      const double ref = i < n ? x[i] / norm : 0.0;
      CHECK(std::abs(w[static_cast<Eigen::Index>(i)] - Cd(ref, 0)) < 1e-12);
    }
  }
}

TEST_CASE("general_qubit_encode") {
  auto s10 = general_qubit_encode(fv({1, 0}));
  CHECK(s10[0] == Cd(1, 0));
  auto s11 = general_qubit_encode(fv({1, 1}));
  CHECK(std::abs(s11[0] - Cd(1 / std::sqrt(2.0), 0)) < 1e-15);
  CHECK(std::abs(s11[1] - Cd(1 / std::sqrt(2.0), 0)) < 1e-15);
  auto s34 = general_qubit_encode(fv({3, 4}));
  CHECK(std::abs(s34[0] - Cd(0.6, 0)) < 1e-15);
  CHECK(std::abs(s34[1] - Cd(0.8, 0)) < 1e-15);
  CHECK_THROWS_AS(general_qubit_encode(fv({1, 2, 0, 0})), InvalidArgument);

  // Two qubits: product of per-qubit normalized pairs.
  auto s = general_qubit_encode(fv({3, 4, 1, 1}));
  const double r = 1 / std::sqrt(2.0);
  CHECK(std::abs(s[0b11] - Cd(0.8 * r, 0)) < 1e-15);
  CHECK(std::abs(s[0b10] - Cd(0.6 * r, 0)) < 1e-15);
}

TEST_CASE("every encoder outputs unit-norm states") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto kind : {EncoderKind::GeneralQubit, EncoderKind::Wavefunction, EncoderKind::Angle,
                    EncoderKind::DenseAngle}) {
    for (std::size_t n = 1; n <= 12; ++n) {
      std::vector<double> x(n);
      for (double& v : x) v = u(rng);
      auto s = encode(kind, scale_features(kind, x), qubit_demand(kind, n));
      CHECK(std::abs(s.norm_squared() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("dense scaling keeps sign-flipped features apart") {
  auto state = [](std::vector<double> x) {
    auto s = zero_state(1);
    apply_circuit(s, dense_angle_encode(scale_features(EncoderKind::DenseAngle, x)));
    return s;
  };
  // (x + 1) / 2 on both slots maps these two to the same state up to global phase.
  const auto a = state({0.5, 0.5}), b = state({-0.5, -0.5});
  CHECK(std::abs(a.amplitudes().dot(b.amplitudes())) < 0.99);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  for (int i = 0; i < 200; ++i) {
    const double x0 = u(rng), x1 = u(rng);
    const auto p = state({x0, x1}), q = state({-x0, x1});
    if (std::abs(x0) > 0.05) CHECK(std::abs(p.amplitudes().dot(q.amplitudes())) < 1.0 - 1e-6);
  }
}

TEST_CASE("qubit demand table for 1..16 features") {
  for (std::size_t n = 1; n <= 16; ++n) {
    CHECK(qubit_demand(EncoderKind::Angle, n) == static_cast<int>(n));
    CHECK(qubit_demand(EncoderKind::DenseAngle, n) == static_cast<int>((n + 1) / 2));
    CHECK(qubit_demand(EncoderKind::GeneralQubit, n) == static_cast<int>((n + 1) / 2));
    const int log2n = static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
    CHECK(qubit_demand(EncoderKind::Wavefunction, n) == std::max(1, log2n));

    // The encoders actually produce registers of that width.
    std::vector<double> x(n, 0.5);
    CHECK(angle_encode(scale_features(EncoderKind::Angle, x)).n_qubits() ==
          qubit_demand(EncoderKind::Angle, n));
    CHECK(dense_angle_encode(scale_features(EncoderKind::DenseAngle, x)).n_qubits() ==
          qubit_demand(EncoderKind::DenseAngle, n));
    CHECK(wavefunction_encode(fv(x)).n_qubits() == qubit_demand(EncoderKind::Wavefunction, n));
    CHECK(general_qubit_encode(fv(x)).n_qubits() == qubit_demand(EncoderKind::GeneralQubit, n));
  }
}

TEST_CASE("encoder names") {
  CHECK(parse_encoder("dense") == EncoderKind::DenseAngle);
  CHECK(parse_encoder("general") == EncoderKind::GeneralQubit);
  CHECK(to_string(parse_encoder("wavefunction")) == "wavefunction");
  CHECK_THROWS_AS(parse_encoder("amplitude"), InvalidArgument);
}

TEST_CASE("encoding onto a wider register leaves extra qubits in |0>") {
  auto s = encode(EncoderKind::Angle, fv({pi / 2}), 3);
  CHECK(s.n_qubits() == 3);
  CHECK(std::abs(s[1] - Cd(1, 0)) < 1e-15);
  CHECK_THROWS_AS(encode(EncoderKind::Angle, fv({0.1, 0.2}), 1), InvalidArgument);
}
