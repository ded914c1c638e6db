#include "qrf/qintegrate/study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qrf/errors.hpp"

namespace qrf::qint {

namespace {

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t n_samples, int trial) {
  std::uint64_t z = seed ^ (n_samples * 0x9e3779b97f4a7c15ULL) ^ (static_cast<std::uint64_t>(trial) << 32);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

MCResult mc_estimate(const EnergyTable& table, std::uint64_t n_samples, std::uint64_t seed) {
  detail::require(n_samples >= 1, "mc_estimate: need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, table.size() - 1);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < n_samples; ++i) sum += table[pick(rng)];
  return {sum / static_cast<double>(n_samples), n_samples, seed};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  detail::require(x.size() == y.size(), "loglog_slope: length mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0 && y[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  detail::require(lx.size() >= 2, "loglog_slope: need two positive points");
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  detail::require(sxx > 0, "loglog_slope: x values must differ");
  return sxy / sxx;
}

StudyReport convergence_study(const EnergyTable& table, const FixedPointSpec& spec, const StudyOptions& options) {
  detail::require(!options.qpe_bits.empty() && !options.mc_samples.empty(), "convergence_study: empty range");
  detail::require(options.trials >= 1, "convergence_study: trials must be >= 1");
  StudyReport r;
  r.true_mean = table.mean();
  r.quantized_mean = table.quantized_mean(spec);

  for (int t : options.qpe_bits) {
    const auto e = estimate_mean(table, spec, t, options.mode);
    QuantumPoint p;
    p.t = t;
    p.queries = e.count.oracle_queries;
    p.estimate = e.mean;
    p.error = std::abs(e.mean - r.quantized_mean);
    p.error_bound = e.error_bound;
    const double n = static_cast<double>(table.size());
    for (auto y : confident_outcomes(e.count.distribution)) {
      const double mean_y = spec.step() * (count_from_outcome(y, static_cast<double>(e.count.total), t) - n) / n;
      p.envelope = std::max(p.envelope, std::abs(mean_y - r.quantized_mean));
    }
    r.quantum.push_back(p);
  }

  double var = 0.0;
  for (double f : table.energies()) var += (f - r.true_mean) * (f - r.true_mean);
  var /= static_cast<double>(table.size());
  for (std::uint64_t nc : options.mc_samples) {
    double se = 0.0;
    for (int trial = 0; trial < options.trials; ++trial) {
      const double d = mc_estimate(table, nc, trial_seed(options.seed, nc, trial)).estimate - r.true_mean;
      se += d * d;
    }
    r.monte_carlo.push_back({nc, std::sqrt(se / options.trials), std::sqrt(var / static_cast<double>(nc))});
  }

  std::vector<double> qx, qy, mx, my;
  for (const auto& p : r.quantum) {
    qx.push_back(static_cast<double>(p.queries));
    qy.push_back(p.envelope);
  }
  for (const auto& p : r.monte_carlo) {
    mx.push_back(static_cast<double>(p.samples));
    my.push_back(p.rmse);
  }
  auto fit = [](const std::vector<double>& x, const std::vector<double>& y) {
    const auto positive = std::count_if(y.begin(), y.end(), [](double v) { return v > 0; });
    return positive >= 2 ? loglog_slope(x, y) : std::numeric_limits<double>::quiet_NaN();
  };
  r.quantum_slope = fit(qx, qy);
  r.mc_slope = fit(mx, my);
  return r;
}

}  // namespace qrf::qint
