#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "eiprec/channel.hpp"
#include "eiprec/eta_estimator.hpp"
#include "eiprec/modulation.hpp"
#include "eiprec/precoder.hpp"
#include "eiprec/rie.hpp"

namespace eiprec::link {

enum class CsiMode { perfect, noisy_raw, ei_cleaned, ei_cleaned_known_eta };

// per_antenna: sigma^2 = P_total / (A * snr), i.e. SNR referred to unit-variance channel entries.
// total: sigma^2 = P_total / snr.
enum class SnrReference { per_antenna, total };

struct SimConfig {
  SystemDims dims{20, 128};
  double eta = 0.3;
  channel::CorruptionMode corruption = channel::CorruptionMode::additive;
  double c = 1.0;
  precode::PrecoderKind precoder = precode::PrecoderKind::wfq;
  CsiMode csi = CsiMode::ei_cleaned;
  precode::DacConfig dac;
  Modulation modulation = Modulation::qpsk;
  double snr_db = 10.0;
  SnrReference snr_reference = SnrReference::per_antenna;
  double p_total = 1.0;
  int trials = 100;
  int symbols_per_trial = 200;
  std::uint64_t seed = 1;
  int threads = 1;
  // Extra batches of `trials` run until min_errors is reached or max_bits is exceeded.
  bool adaptive = false;
  long long min_errors = 100;
  long long max_bits = 10'000'000;
  // 0 selects the order policy from the dimensions.
  int estimator_order = 0;
  rmt::TheoryMode estimator_mode = rmt::TheoryMode::gaussian_equivalent;
  rie::CleanerConfig cleaner;

  double noise_variance() const;
  eta::EstimatorConfig estimator() const;
  rie::CleanerConfig cleaner_config() const;
  void validate() const;
};

struct TrialMetrics {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  long long bit_errors = 0;
  long long bits = 0;
  double mse = std::numeric_limits<double>::quiet_NaN();
  double eta_hat = std::numeric_limits<double>::quiet_NaN();
  double delta_eta = std::numeric_limits<double>::quiet_NaN();
  bool precoder_converged = true;
  int precoder_iterations = 0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

Interval wilson_interval(long long successes, long long n, double z = 1.959963984540054);

struct CdfPoint {
  double x = 0.0;
  double cdf = 0.0;
};

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples, const std::vector<double>& grid);

struct Aggregate {
  int trials = 0;
  long long bit_errors = 0;
  long long bits = 0;
  double ber = 0.0;
  Interval ber_ci;
  bool below_resolution = false;
  double mse_mean = std::numeric_limits<double>::quiet_NaN();
  double mse_p10 = std::numeric_limits<double>::quiet_NaN();
  double mse_p50 = std::numeric_limits<double>::quiet_NaN();
  double mse_p90 = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> delta_eta;
  int unconverged = 0;
  std::vector<TrialMetrics> per_trial;
};

class TrialFailure : public std::runtime_error {
 public:
  TrialFailure(std::uint64_t trial, const std::string& what, std::vector<TrialMetrics> completed)
      : std::runtime_error("trial " + std::to_string(trial) + ": " + what),
        trial_(trial),
        completed_(std::move(completed)) {}

  std::uint64_t trial() const noexcept { return trial_; }
  const std::vector<TrialMetrics>& completed() const noexcept { return completed_; }

 private:
  std::uint64_t trial_;
  std::vector<TrialMetrics> completed_;
};

// Stream ids under derive_seed(master, trial, id).
enum class Stream : std::uint64_t { channel = 0, csi_error = 1, payload = 2, noise = 3 };

// Channel estimate handed to the precoder, plus estimator output when applicable.
struct CsiResult {
  ComplexMatrix H_hat;
  double eta_hat = std::numeric_limits<double>::quiet_NaN();
};
CsiResult process_csi(const SimConfig& cfg, const ComplexMatrix& H, const ComplexMatrix& H_obs);

TrialMetrics downlink_trial(const SimConfig& cfg, std::uint64_t trial);

Aggregate monte_carlo(const SimConfig& cfg);

// Runs fn(i) for i in [begin, end) on up to `threads` workers; results are stored by index.
template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, int threads, Fn&& fn);

std::string_view to_string(CsiMode m);
CsiMode csi_from_string(std::string_view name);

}  // namespace eiprec::link

#include "eiprec/detail/parallel.hpp"
