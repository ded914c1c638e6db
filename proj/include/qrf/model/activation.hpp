#pragma once

#include <string>
#include <string_view>

namespace qrf {

enum class ActivationKind { ReLU, ELU, Softplus, Sine, QReLU };

/// CLI spellings: relu | elu | softplus | sine | qrelu.
ActivationKind parse_activation(std::string_view name);
std::string to_string(ActivationKind kind);

/// Frequency of the sine activation.
inline constexpr double kSineOmega = 30.0;

/// ReLU max(z, 0); ELU z or e^z - 1; Softplus ln(1 + e^z); Sine sin(30 z);
/// QReLU z for z > 0, else 0.01 z - z.
double activate(ActivationKind kind, double z);

/// d activate / dz. At the ReLU and QReLU kink (z = 0) the derivative is taken as 1.
double activate_derivative(ActivationKind kind, double z);

double sigmoid(double z);
double softplus(double z);

}  // namespace qrf
