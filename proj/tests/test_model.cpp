#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qrf/errors.hpp"
#include "qrf/model/train.hpp"
#include "support/matrix_oracle.hpp"

using namespace qrf;
using std::numbers::pi;

namespace {

QrfConfig small_3d() {
  QrfConfig c;
  c.encoder = EncoderKind::DenseAngle;
  c.template_kind = TemplateKind::Circuit16;
  c.layers_position = 1;
  c.layers_color = 1;
  c.freq_position = 0;
  c.freq_direction = 0;
  c.position_dim = 3;
  return c;
}

QrfConfig small_2d() {
  QrfConfig c;
  c.encoder = EncoderKind::DenseAngle;
  c.template_kind = TemplateKind::LayeredRotCnot;
  c.layers_position = 1;
  c.layers_color = 1;
  c.freq_position = 1;
  c.position_dim = 2;
  return c;
}

Eigen::VectorXd random_point(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd p(dim);
  for (int i = 0; i < dim; ++i) p(i) = u(rng);
  return p;
}

Eigen::Vector3d random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
}

// Dense-angle product state written out per qubit from the sinusoidal features.
oracle::VectorC dense_product_state(const Eigen::VectorXd& x, int frequencies, int n_qubits) {
  std::vector<double> f;
  if (frequencies == 0) {
    for (Eigen::Index i = 0; i < x.size(); ++i) f.push_back(x(i));
  } else {
    for (int l = 0; l < frequencies; ++l)
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        f.push_back(std::sin(std::pow(2.0, l) * pi * x(i)));
        f.push_back(std::cos(std::pow(2.0, l) * pi * x(i)));
      }
  }
  std::vector<oracle::MatrixC> factors;
  for (int q = 0; q < n_qubits; ++q) {
    const std::size_t i = 2 * static_cast<std::size_t>(q);
    const double a = i < f.size() ? (f[i] + 1) / 4 : 0.0;
    const double b = i + 1 < f.size() ? (f[i + 1] + 1) / 2 : 0.0;
    oracle::MatrixC v(2, 1);
    v(0, 0) = std::cos(pi * a);
    v(1, 0) = std::polar(1.0, 2 * pi * b) * std::sin(pi * a);
    factors.push_back(v);
  }
  return oracle::kron_all(factors);
}

double z_expectation(const oracle::VectorC& psi, int q) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) e += ((i >> q) & 1 ? -1.0 : 1.0) * std::norm(psi(i));
  return e;
}

double fd_relative_error(const Eigen::VectorXd& analytic, const std::function<double(const ParamVector&)>& f,
                         ParamVector params) {
  const double h = 1e-5;
  Eigen::VectorXd fd(params.size());
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double keep = params(i);
    params(i) = keep + h;
    const double up = f(params);
    params(i) = keep - h;
    const double down = f(params);
    params(i) = keep;
    fd(i) = (up - down) / (2 * h);
  }
  return (analytic - fd).norm() / std::max(fd.norm(), 1e-8);
}

}  // namespace

TEST_CASE("positional_encode") {
  const auto a = positional_encode(Eigen::VectorXd::Zero(1), 2);
  REQUIRE(a.size() == 4);
  CHECK(a(0) == 0.0);
  CHECK(a(1) == 1.0);
  CHECK(a(2) == 0.0);
  CHECK(a(3) == 1.0);
  CHECK(positional_encode(Eigen::Vector3d(0.1, -0.2, 0.3), 4).size() == 24);
  const auto half = positional_encode(Eigen::VectorXd::Constant(1, 0.5), 1);
  CHECK(std::abs(half(0) - 1.0) < 1e-12);
  CHECK(std::abs(half(1)) < 1e-12);
  const Eigen::Vector2d p(0.3, -0.7);
  CHECK(positional_encode(p, 0) == p);
  CHECK_THROWS_AS(positional_encode(Eigen::Vector2d(1.5, 0), 1), InvalidArgument);
  CHECK_THROWS_AS(positional_encode(p, -1), InvalidArgument);
}

TEST_CASE("activations") {
  CHECK(activate(ActivationKind::QReLU, 5.0) == 5.0);
  CHECK(activate(ActivationKind::QReLU, 0.0) == 0.0);
  CHECK(activate(ActivationKind::QReLU, -2.0) == doctest::Approx(1.98).epsilon(1e-15));
  CHECK(activate(ActivationKind::ReLU, -1.0) == 0.0);
  CHECK(activate(ActivationKind::ELU, -1.0) == doctest::Approx(std::exp(-1.0) - 1.0));
  CHECK(activate(ActivationKind::Softplus, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(activate(ActivationKind::Sine, 0.01) == doctest::Approx(std::sin(0.3)));
  CHECK(activate_derivative(ActivationKind::QReLU, 0.0) == 1.0);
  CHECK(activate_derivative(ActivationKind::QReLU, -1.0) == -0.99);
  CHECK(activate_derivative(ActivationKind::QReLU, 2.0) == 1.0);
  CHECK(softplus(800.0) == 800.0);
  CHECK(softplus(-800.0) >= 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double z = u(rng);
    CHECK(activate(ActivationKind::QReLU, std::abs(z)) == activate(ActivationKind::ReLU, std::abs(z)));
    if (std::abs(z) < 1e-3) continue;
    for (auto kind : {ActivationKind::ReLU, ActivationKind::ELU, ActivationKind::Softplus, ActivationKind::Sine,
                      ActivationKind::QReLU}) {
      const double h = 1e-6;
      const double fd = (activate(kind, z + h) - activate(kind, z - h)) / (2 * h);
      CHECK(activate_derivative(kind, z) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  for (auto name : {"relu", "elu", "softplus", "sine", "qrelu"}) CHECK(to_string(parse_activation(name)) == name);
  CHECK_THROWS_AS(parse_activation("tanh"), InvalidArgument);
}

TEST_CASE("model configuration") {
  QrfConfig c = small_3d();
  QrfModel m(c);
  CHECK(m.position_qubits() == 2);
  CHECK(m.direction_qubits() == 2);
  const auto& l = m.layout();
  CHECK(l.n_pqc_a == 5);
  CHECK(l.n_pqc_b == 11);
  CHECK(l.n_sigma_head == 3);
  CHECK(l.n_color_head == 15);
  CHECK(m.param_count() == 34);

  QrfModel flat(small_2d());
  CHECK(flat.position_qubits() == 2);
  CHECK(flat.direction_qubits() == 0);
  CHECK(flat.layout().n_sigma_head == 0);
  CHECK(flat.param_count() == 6 + 6 + 9);

  c.position_qubits = 1;
  CHECK_THROWS_AS(QrfModel{c}, InvalidArgument);
  c = small_3d();
  c.encoder = EncoderKind::Angle;
  c.freq_position = 4;
  c.freq_direction = 0;
  CHECK_THROWS_AS(QrfModel{c}, ResourceLimit);
  c = small_3d();
  c.encoder = EncoderKind::Wavefunction;
  CHECK_THROWS_AS(QrfModel{c}, InvalidArgument);
  c.freq_position = 1;
  c.freq_direction = 1;
  CHECK(QrfModel(c).position_qubits() == 3);

  const ParamVector p = m.init_params(1);
  CHECK(p == m.init_params(1));
  CHECK_THROWS_AS(m.evaluate(p, Eigen::Vector3d(0, 1.01, 0)), InvalidArgument);
  CHECK_THROWS_AS(m.evaluate(p, Eigen::Vector2d(0, 0)), InvalidArgument);
  CHECK_THROWS_AS(m.evaluate(ParamVector::Zero(3), Eigen::Vector3d::Zero()), InvalidArgument);
}

TEST_CASE("density does not depend on the view direction") {
  std::mt19937_64 rng(11);
  for (auto enc : {EncoderKind::DenseAngle, EncoderKind::Angle, EncoderKind::GeneralQubit, EncoderKind::Wavefunction}) {
    QrfConfig c = small_3d();
    c.encoder = enc;
    c.freq_position = 1;
    c.freq_direction = 1;
    c.template_kind = TemplateKind::Circuit5;
    QrfModel m(c);
    const ParamVector params = m.init_params(5);
    for (int i = 0; i < 100; ++i) {
      const Eigen::VectorXd p = random_point(rng, 3);
      const double s1 = m.evaluate(params, p, random_direction(rng)).sigma;
      const double s2 = m.evaluate(params, p, random_direction(rng)).sigma;
      CHECK(s1 == s2);
    }
  }
}

TEST_CASE("field outputs stay in range") {
  std::mt19937_64 rng(12);
  const auto kinds = {ActivationKind::ReLU, ActivationKind::ELU, ActivationKind::Softplus, ActivationKind::Sine,
                      ActivationKind::QReLU};
  for (auto act : kinds) {
    QrfConfig c = small_3d();
    c.activation = act;
    QrfModel m(c);
    for (int i = 0; i < 200; ++i) {
      ParamVector params = m.init_params(static_cast<std::uint64_t>(i));
      params.tail(m.layout().n_sigma_head + m.layout().n_color_head) *= 40.0;
      const auto s = m.evaluate_angles(params, random_point(rng, 3), pi * (i % 7) / 7, 0.3 * i);
      CHECK(s.sigma >= 0.0);
      CHECK((s.color.array() >= 0.0).all());
      CHECK((s.color.array() <= 1.0).all());
    }
  }
}

TEST_CASE("field matches a composed dense-matrix evaluation") {
  std::mt19937_64 rng(13);
  QrfConfig c = small_3d();
  c.freq_position = 1;
  c.freq_direction = 0;
  c.template_kind = TemplateKind::Circuit6;
  c.activation = ActivationKind::ELU;
  QrfModel m(c);
  const int np = m.position_qubits(), nd = m.direction_qubits(), n = np + nd;
  for (int trial = 0; trial < 10; ++trial) {
    const ParamVector params = m.init_params(static_cast<std::uint64_t>(100 + trial));
    const Eigen::VectorXd p = random_point(rng, 3);
    const Eigen::Vector3d d = random_direction(rng);
    const auto got = m.evaluate(params, p, d);

    const auto& l = m.layout();
    const oracle::VectorC pos = dense_product_state(p, 1, np);
    const oracle::VectorC a_out = oracle::circuit_matrix(m.density_circuit(params)) * pos;
    double pre = params(l.sigma_head + np);
    for (int q = 0; q < np; ++q) pre += params(l.sigma_head + q) * activate(ActivationKind::ELU, z_expectation(a_out, q));
    CHECK(got.sigma == doctest::Approx(std::log1p(std::exp(pre))).epsilon(1e-9));

    const oracle::VectorC full = oracle::kron(dense_product_state(d, 0, nd), pos);
    const oracle::VectorC b_out = oracle::circuit_matrix(m.color_circuit(params)) * full;
    for (int ch = 0; ch < 3; ++ch) {
      double u = params(l.color_head + 3 * n + ch);
      for (int q = 0; q < n; ++q) {
        u += params(l.color_head + ch * n + q) * activate(ActivationKind::ELU, z_expectation(b_out, q));
      }
      CHECK(std::abs(got.color(ch) - 1.0 / (1.0 + std::exp(-u))) < 1e-9);
    }
  }
}

TEST_CASE("pixel loss") {
  QrfModel m(small_2d());
  ParamVector params = m.init_params(2);
  const Eigen::Vector2d p(0.2, -0.4);
  std::vector<PixelSample> exact{{p, m.evaluate(params, p).color}};
  CHECK(loss(m, params, exact) == 0.0);

  ParamVector neutral = ParamVector::Zero(m.param_count());
  std::vector<PixelSample> one{{p, Eigen::Vector3d::Ones()}};
  CHECK(loss(m, neutral, one) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(loss(m, params, std::span<const PixelSample>{}), InvalidArgument);

  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PixelSample> batch;
    for (int i = 0; i < 1 + trial; ++i) batch.push_back({random_point(rng, 2), Eigen::Vector3d(u(rng), u(rng), u(rng))});
    double total = 0.0;
    int count = 0;
    for (const auto& s : batch) {
      const auto c = m.evaluate(params, s.position).color;
      for (int ch = 0; ch < 3; ++ch) {
        total += (c(ch) - s.target(ch)) * (c(ch) - s.target(ch));
        ++count;
      }
    }
    CHECK(loss(m, params, batch) == doctest::Approx(total / count).epsilon(1e-14));
  }
}

TEST_CASE("end-to-end gradient matches finite differences") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto act : {ActivationKind::QReLU, ActivationKind::ELU, ActivationKind::Sine}) {
    QrfConfig c = small_2d();
    c.activation = act;
    QrfModel m(c);
    CHECK(m.param_count() <= 30);
    const ParamVector params = m.init_params(7);
    std::vector<PixelSample> batch;
    for (int i = 0; i < 4; ++i) batch.push_back({random_point(rng, 2), Eigen::Vector3d(u(rng), u(rng), u(rng))});
    const auto lg = loss_gradient(m, params, batch);
    CHECK(lg.loss == doctest::Approx(loss(m, params, batch)).epsilon(1e-14));
    CHECK(fd_relative_error(lg.gradient, [&](const ParamVector& q) { return loss(m, q, batch); }, params) <= 1e-4);
  }

  QrfModel scene(small_3d());
  ParamVector params = scene.init_params(8);
  params(scene.layout().sigma_head + scene.position_qubits()) = 1.0;
  std::vector<RaySample> rays;
  for (int i = 0; i < 3; ++i) {
    Ray r;
    r.origin = Eigen::Vector3d(0.1 * i, -0.2, 2.5);
    r.direction = Eigen::Vector3d(0.05 * i, 0.1, -1.0).normalized();
    r.near = 1.0;
    r.far = 4.0;
    rays.push_back({r, Eigen::Vector3d(u(rng), u(rng), u(rng))});
  }
  MarchOptions march;
  march.samples_per_ray = 6;
  march.background = Eigen::Vector3d(0.2, 0.3, 0.4);
  const auto lg = loss_gradient(scene, params, rays, march);
  CHECK(lg.gradient.segment(scene.layout().sigma_head, scene.layout().n_sigma_head).norm() > 0.0);
  CHECK(fd_relative_error(lg.gradient, [&](const ParamVector& q) { return loss(scene, q, rays, march); }, params) <= 1e-4);
}

TEST_CASE("train_step") {
  QrfModel m(small_2d());
  std::vector<PixelSample> batch{{Eigen::Vector2d(0.1, 0.2), Eigen::Vector3d(0.9, 0.2, 0.6)},
                                 {Eigen::Vector2d(-0.5, 0.7), Eigen::Vector3d(0.9, 0.2, 0.6)}};
  TrainState frozen(m.init_params(3));
  const ParamVector before = frozen.params;
  OptimizerOptions still;
  still.learning_rate = 0.0;
  train_step(m, frozen, batch, still);
  CHECK(frozen.params == before);
  CHECK(frozen.iteration == 1);

  // Plain descent on a constant target decreases the loss every step.
  TrainState s(m.init_params(4));
  OptimizerOptions gd;
  gd.learning_rate = 0.5;
  gd.momentum = 0.0;
  double prev = train_step(m, s, batch, gd);
  for (int i = 0; i < 20; ++i) {
    const double cur = train_step(m, s, batch, gd);
    CHECK(cur < prev);
    prev = cur;
  }

  std::vector<PixelSample> poisoned = batch;
  poisoned[0].target(0) = std::nan("");
  TrainState d(m.init_params(4));
  CHECK_THROWS_AS(train_step(m, d, poisoned, gd), TrainingDiverged);
}

TEST_CASE("training is deterministic and thread-count independent") {
  QrfConfig c = small_2d();
  c.template_kind = TemplateKind::Circuit17;
  QrfModel m(c);
  std::mt19937_64 rng(16);
  std::vector<PixelSample> data;
  for (int i = 0; i < 20; ++i) data.push_back({random_point(rng, 2), Eigen::Vector3d::Constant(0.5 + 0.02 * i)});
  auto run = [&](int threads) {
    TrainState s(m.init_params(9));
    OptimizerOptions opt;
    opt.threads = threads;
    for (int it = 0; it < 5; ++it) {
      std::vector<PixelSample> batch;
      for (auto i : minibatch_indices(9, s.iteration, data.size(), 6)) batch.push_back(data[i]);
      train_step(m, s, batch, opt);
    }
    return s.params;
  };
  const auto a = run(1);
  CHECK(a == run(1));
  CHECK(a == run(3));
}

TEST_CASE("minibatch_indices") {
  const auto a = minibatch_indices(1, 0, 50, 10);
  CHECK(a.size() == 10);
  std::vector<bool> seen(50);
  for (auto i : a) {
    CHECK(i < 50);
    CHECK(!seen[i]);
    seen[i] = true;
  }
  CHECK(a == minibatch_indices(1, 0, 50, 10));
  CHECK(a != minibatch_indices(1, 1, 50, 10));
  CHECK(minibatch_indices(1, 0, 5, 10).size() == 5);
}

TEST_CASE("scene field closure is empty outside the unit box") {
  QrfModel m(small_3d());
  const ParamVector params = m.init_params(1);
  const auto f = field_function(m, params);
  const auto outside = f(Eigen::Vector3d(0, 0, 1.5), Eigen::Vector3d::UnitZ());
  CHECK(outside.sigma == 0.0);
  CHECK(outside.color.isZero());
  const Eigen::Vector3d p(0.1, 0.2, 0.3);
  CHECK(f(p, Eigen::Vector3d::UnitX()).sigma == m.density(params, p));
}
