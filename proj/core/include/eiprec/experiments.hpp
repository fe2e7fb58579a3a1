#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eiprec/link_sim.hpp"

namespace eiprec::experiments {

enum class ExperimentKind { eta_cdf, mse_vs_antennas, ber_vs_snr, ber_vs_eta, spectrum_check };

struct ExperimentConfig {
  link::SimConfig sim;
  std::vector<double> etas{0.3};
  std::vector<double> snrs_db{-4, -2, 0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  std::vector<int> antennas{32, 64, 128, 256};
  // Empty runs sim.dac.bits only.
  std::vector<int> bits_list;
  int histogram_bins = 50;
  double cdf_max = 0.2;
  int cdf_points = 201;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::spectrum_check;
  Table table;
  // Ordered key/value pairs; values are preformatted numbers or strings.
  std::vector<std::pair<std::string, std::string>> headline;
};

ExperimentResult run_experiment(ExperimentKind kind, const ExperimentConfig& cfg);

struct SpectrumHistogram {
  std::vector<double> centers;
  std::vector<double> empirical;
  std::vector<double> analytic;
  double l1 = 0.0;
  std::vector<int> zero_counts;
};

// Pooled histogram of nonzero augmented-matrix eigenvalues over [-b, b].
SpectrumHistogram spectrum_histogram(const SystemDims& dims, int trials, int bins, std::uint64_t seed, int threads);

// SNR where log10(BER) crosses log10(target), by linear interpolation; NaN when never reached.
double crossing_snr(const std::vector<double>& snr_db, const std::vector<double>& ber, double target);

std::string format_number(double x);
std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(std::string_view name);

}  // namespace eiprec::experiments
