#include "qrf/model/activation.hpp"

#include <cmath>

#include "qrf/errors.hpp"

namespace qrf {

ActivationKind parse_activation(std::string_view name) {
  if (name == "relu") return ActivationKind::ReLU;
  if (name == "elu") return ActivationKind::ELU;
  if (name == "softplus") return ActivationKind::Softplus;
  if (name == "sine") return ActivationKind::Sine;
  if (name == "qrelu") return ActivationKind::QReLU;
  throw InvalidArgument("unknown activation '" + std::string(name) + "' (expected relu|elu|softplus|sine|qrelu)");
}

std::string to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::ELU: return "elu";
    case ActivationKind::Softplus: return "softplus";
    case ActivationKind::Sine: return "sine";
    case ActivationKind::QReLU: return "qrelu";
  }
  return "?";
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double activate(ActivationKind kind, double z) {
  switch (kind) {
    case ActivationKind::ReLU: return z > 0 ? z : 0.0;
    case ActivationKind::ELU: return z > 0 ? z : std::expm1(z);
    case ActivationKind::Softplus: return softplus(z);
    case ActivationKind::Sine: return std::sin(kSineOmega * z);
    case ActivationKind::QReLU: return z > 0 ? z : 0.01 * z - z;
  }
  return z;
}

double activate_derivative(ActivationKind kind, double z) {
  switch (kind) {
    case ActivationKind::ReLU: return z >= 0 ? 1.0 : 0.0;
    case ActivationKind::ELU: return z > 0 ? 1.0 : std::exp(z);
    case ActivationKind::Softplus: return sigmoid(z);
    case ActivationKind::Sine: return kSineOmega * std::cos(kSineOmega * z);
    case ActivationKind::QReLU: return z >= 0 ? 1.0 : -0.99;
  }
  return 1.0;
}

}  // namespace qrf
