#pragma once

#include <cstdint>
#include <vector>

#include "qrf/qintegrate/counting.hpp"

namespace qrf::qint {

struct MCResult {
  double estimate = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Mean of f(j) over n_samples uniform draws of j with replacement.
MCResult mc_estimate(const EnergyTable& table, std::uint64_t n_samples, std::uint64_t seed);

struct StudyOptions {
  std::vector<int> qpe_bits{3, 4, 5, 6, 7, 8};
  std::vector<std::uint64_t> mc_samples{16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
  int trials = 200;
  std::uint64_t seed = 0;
  OracleMode mode = OracleMode::Compiled;
};

struct QuantumPoint {
  int t = 0;
  std::uint64_t queries = 0;  // N_q = 2^t - 1
  double estimate = 0.0;
  double error = 0.0;         // |mean-hat - quantized mean| at the modal outcome
  double envelope = 0.0;      // worst error over confident_outcomes()
  double error_bound = 0.0;
};

struct MonteCarloPoint {
  std::uint64_t samples = 0;
  double rmse = 0.0;          // against the exact table mean
  double predicted_rmse = 0.0;  // sqrt(Var f / N_c)
};

struct StudyReport {
  double true_mean = 0.0;
  double quantized_mean = 0.0;
  std::vector<QuantumPoint> quantum;
  std::vector<MonteCarloPoint> monte_carlo;
  double quantum_slope = 0.0;  // log envelope vs log N_q; NaN with under two nonzero errors
  double mc_slope = 0.0;       // log RMSE vs log N_c; NaN likewise
};

/// Least-squares slope of log y against log x. Points with y <= 0 are skipped;
/// throws InvalidArgument when fewer than two remain.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Quantum counting error per t and Monte Carlo RMSE per N_c with fitted slopes.
/// Trials for each N_c draw seeds from (seed, N_c, trial), so the report does not
/// depend on evaluation order.
StudyReport convergence_study(const EnergyTable& table, const FixedPointSpec& spec, const StudyOptions& options);

}  // namespace qrf::qint
