#include "qrf/pqc.hpp"

#include "qrf/errors.hpp"

namespace qrf {

TemplateKind parse_template(std::string_view name) {
  if (name == "layered") return TemplateKind::LayeredRotCnot;
  if (name == "c5") return TemplateKind::Circuit5;
  if (name == "c6") return TemplateKind::Circuit6;
  if (name == "c16") return TemplateKind::Circuit16;
  if (name == "c17") return TemplateKind::Circuit17;
  throw InvalidArgument("unknown circuit '" + std::string(name) +
                        "' (expected layered|c5|c6|c16|c17)");
}

std::string to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::LayeredRotCnot: return "layered";
    case TemplateKind::Circuit5: return "c5";
    case TemplateKind::Circuit6: return "c6";
    case TemplateKind::Circuit16: return "c16";
    case TemplateKind::Circuit17: return "c17";
  }
  return "?";
}

PqcTemplate::PqcTemplate(TemplateKind kind_, int n_qubits_, int n_layers_)
    : kind(kind_), n_qubits(n_qubits_), n_layers(n_layers_) {
  detail::require(n_qubits >= 1, "PqcTemplate: n_qubits must be >= 1");
  detail::require(n_layers >= 1, "PqcTemplate: n_layers must be >= 1");
}

namespace {

std::size_t per_layer(TemplateKind kind, std::size_t n) {
  switch (kind) {
    case TemplateKind::LayeredRotCnot: return 3 * n;
    case TemplateKind::Circuit5:
    case TemplateKind::Circuit6: return 4 * n + n * (n - 1);
    case TemplateKind::Circuit16:
    case TemplateKind::Circuit17: return 2 * n + (n - 1);
  }
  return 0;
}

// Staggered nearest-neighbour pairs (control, target): (1,0), (3,2), ... then (2,1), (4,3), ...
std::vector<std::pair<int, int>> staggered_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int start : {0, 1}) {
    for (int q = start; q + 1 < n; q += 2) pairs.emplace_back(q + 1, q);
  }
  return pairs;
}

}  // namespace

std::size_t param_count(const PqcTemplate& t) {
  return per_layer(t.kind, static_cast<std::size_t>(t.n_qubits)) * static_cast<std::size_t>(t.n_layers);
}

QuantumCircuit build_circuit(const PqcTemplate& t, const ParamVector& params, int param_offset) {
  const std::size_t count = param_count(t);
  if (static_cast<std::size_t>(params.size()) != count) {
    throw InvalidArgument("build_circuit: " + to_string(t.kind) + " with " + std::to_string(t.n_qubits) +
                          " qubits and " + std::to_string(t.n_layers) + " layers takes " +
                          std::to_string(count) + " parameters, got " + std::to_string(params.size()));
  }
  const int n = t.n_qubits;
  QuantumCircuit c(n);
  int next = 0;
  auto take = [&]() {
    const int i = next++;
    return std::pair<double, int>{params(i), param_offset + i};
  };
  auto rx = [&](int q) { auto [v, i] = take(); c.add(gates::rx(q, v, i)); };
  auto ry = [&](int q) { auto [v, i] = take(); c.add(gates::ry(q, v, i)); };
  auto rz = [&](int q) { auto [v, i] = take(); c.add(gates::rz(q, v, i)); };
  auto controlled = [&](bool z_axis, int ctrl, int tgt) {
    auto [v, i] = take();
    c.add(z_axis ? gates::crz(ctrl, tgt, v, i) : gates::crx(ctrl, tgt, v, i));
  };
  auto rot_block = [&]() {
    for (int q = 0; q < n; ++q) {
      rx(q);
      rz(q);
    }
  };

  for (int layer = 0; layer < t.n_layers; ++layer) {
    switch (t.kind) {
      case TemplateKind::LayeredRotCnot:
        for (int q = 0; q < n; ++q) {
          rx(q);
          ry(q);
          rz(q);
        }
        for (int q = 0; q + 1 < n; ++q) c.add(gates::cnot(q, q + 1));
        break;
      case TemplateKind::Circuit5:
      case TemplateKind::Circuit6: {
        const bool z_axis = t.kind == TemplateKind::Circuit5;
        rot_block();
        for (int ctrl = n - 1; ctrl >= 0; --ctrl) {
          for (int tgt = n - 1; tgt >= 0; --tgt) {
            if (tgt != ctrl) controlled(z_axis, ctrl, tgt);
          }
        }
        rot_block();
        break;
      }
      case TemplateKind::Circuit16:
      case TemplateKind::Circuit17: {
        const bool z_axis = t.kind == TemplateKind::Circuit16;
        rot_block();
        for (auto [ctrl, tgt] : staggered_pairs(n)) controlled(z_axis, ctrl, tgt);
        break;
      }
    }
  }
  return c;
}

Eigen::VectorXd readout_z(const Statevector& state, std::span<const int> readout_qubits) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(readout_qubits.size()));
  for (std::size_t r = 0; r < readout_qubits.size(); ++r) {
    z(static_cast<Eigen::Index>(r)) = expectation_z(state, readout_qubits[r]);
  }
  return z;
}

Eigen::VectorXd forward(const PqcTemplate& t, const ParamVector& params, const Statevector& input_state,
                        std::span<const int> readout_qubits) {
  if (input_state.n_qubits() != t.n_qubits) {
    throw InvalidArgument("forward: input state has " + std::to_string(input_state.n_qubits()) +
                          " qubits, template has " + std::to_string(t.n_qubits));
  }
  for (int q : readout_qubits) {
    if (q < 0 || q >= t.n_qubits) throw InvalidArgument("forward: readout qubit " + std::to_string(q) + " out of range");
  }
  Statevector s = input_state;
  apply_circuit(s, build_circuit(t, params));
  return readout_z(s, readout_qubits);
}

Eigen::MatrixXd parameter_shift_gradient(const PqcTemplate& t, const ParamVector& params,
                                         const Statevector& input_state,
                                         std::span<const int> readout_qubits) {
  if (input_state.n_qubits() != t.n_qubits) {
    throw InvalidArgument("parameter_shift_gradient: input width does not match template");
  }
  return circuit_jacobian(build_circuit(t, params), static_cast<int>(param_count(t)), input_state,
                          readout_qubits);
}

}  // namespace qrf
