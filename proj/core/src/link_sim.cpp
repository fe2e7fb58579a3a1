#include "eiprec/link_sim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace eiprec::link {

double SimConfig::noise_variance() const {
  const double snr = std::pow(10.0, snr_db / 10.0);
  if (snr_reference == SnrReference::total) return p_total / snr;
  return p_total / (static_cast<double>(dims.antennas) * snr);
}

eta::EstimatorConfig SimConfig::estimator() const {
  eta::EstimatorConfig e;
  e.order = estimator_order > 0 ? estimator_order : eta::default_order(dims);
  e.mode = estimator_mode;
  e.data_mode = corruption;
  e.c = c;
  return e;
}

rie::CleanerConfig SimConfig::cleaner_config() const {
  rie::CleanerConfig r = cleaner;
  r.observation = corruption;
  r.c = c;
  return r;
}

void SimConfig::validate() const {
  if (dims.users <= 0 || dims.users >= dims.antennas) throw DomainError("users must be positive and below antennas");
  channel::CorruptionModel{eta, corruption, c}.validate();
  if (trials < 1) throw DomainError("trials must be at least 1");
  if (symbols_per_trial < 1) throw DomainError("symbols_per_trial must be at least 1");
  if (threads < 1) throw DomainError("threads must be at least 1");
  if (!dac.bypass && (dac.bits < 1 || dac.bits > quant::kMaxBits)) throw DomainError("bits must lie in 1..8");
  if (!(p_total > 0.0)) throw DomainError("p_total must be positive");
  if (min_errors < 0 || max_bits < 1) throw DomainError("error budget must be nonnegative");
  if (estimator_order < 0 || estimator_order > 3) throw DomainError("estimator order must be 0..3");
}

Interval wilson_interval(long long successes, long long n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double den = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / den;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / den;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples, const std::vector<double>& grid) {
  std::sort(samples.begin(), samples.end());
  std::vector<CdfPoint> out;
  out.reserve(grid.size());
  const double n = static_cast<double>(samples.size());
  for (double x : grid) {
    const auto k = std::upper_bound(samples.begin(), samples.end(), x) - samples.begin();
    out.push_back({x, n > 0 ? static_cast<double>(k) / n : 0.0});
  }
  return out;
}

CsiResult process_csi(const SimConfig& cfg, const ComplexMatrix& H, const ComplexMatrix& H_obs) {
  switch (cfg.csi) {
    case CsiMode::perfect:
      return {H};
    case CsiMode::noisy_raw:
      return {H_obs};
    case CsiMode::ei_cleaned: {
      const auto est = eta::estimate_eta(H_obs, cfg.estimator());
      return {rie::clean_channel(H_obs, est.eta_hat, cfg.cleaner_config()), est.eta_hat};
    }
    case CsiMode::ei_cleaned_known_eta:
      return {rie::clean_channel(H_obs, cfg.eta, cfg.cleaner_config())};
  }
  return {H};
}

namespace {

RandomStream stream_for(const SimConfig& cfg, std::uint64_t trial, Stream s) {
  return RandomStream(derive_seed(cfg.seed, trial, static_cast<std::uint64_t>(s)));
}

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

TrialMetrics downlink_trial(const SimConfig& cfg, std::uint64_t trial) {
  TrialMetrics m;
  m.trial = trial;
  m.seed = derive_seed(cfg.seed, trial);

  auto ch_rng = stream_for(cfg, trial, Stream::channel);
  const ComplexMatrix H = channel::gen_channel(cfg.dims, ch_rng);
  auto err_rng = stream_for(cfg, trial, Stream::csi_error);
  const ComplexMatrix H_obs = channel::corrupt(H, {cfg.eta, cfg.corruption, cfg.c}, err_rng);

  const CsiResult csi = process_csi(cfg, H, H_obs);
  if (cfg.csi != CsiMode::perfect) m.mse = rie::mse(H, csi.H_hat);
  if (std::isfinite(csi.eta_hat)) {
    m.eta_hat = csi.eta_hat;
    m.delta_eta = std::abs(cfg.eta - csi.eta_hat);
  }

  const double sigma2 = cfg.noise_variance();
  precode::PrecodeOutput out;
  if (cfg.precoder == precode::PrecoderKind::wfq) {
    auto res = precode::wfq_precode(csi.H_hat, sigma2, cfg.p_total, cfg.dac);
    m.precoder_converged = res.converged;
    m.precoder_iterations = res.iterations;
    out = std::move(res.output);
  } else {
    out = precode::baseline_precode(cfg.precoder, csi.H_hat, sigma2, cfg.p_total, cfg.dac);
  }
  const auto model = precode::link_model(out, cfg.dac, sigma2, cfg.p_total);
  const double beta = precode::receiver_scaling(H, out, model, sigma2);

  const int k = bits_per_symbol(cfg.modulation);
  const int u = cfg.dims.users;
  const int t = cfg.symbols_per_trial;
  auto payload_rng = stream_for(cfg, trial, Stream::payload);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(u) * t * k);
  for (std::size_t i = 0; i < bits.size(); i += 64) {
    const std::uint64_t word = payload_rng.next_bits();
    for (std::size_t j = 0; j < 64 && i + j < bits.size(); ++j) bits[i + j] = static_cast<std::uint8_t>((word >> j) & 1u);
  }
  const auto symbols = modulate(bits, cfg.modulation);
  // Column-major: symbol vector j holds users 0..U-1.
  const ComplexMatrix S = Eigen::Map<const ComplexMatrix>(symbols.data(), u, t);

  const ComplexMatrix Z = precode::transmit(out, S, cfg.dac, cfg.p_total);
  auto noise_rng = stream_for(cfg, trial, Stream::noise);
  const ComplexMatrix N = channel::gaussian_matrix(u, t, sigma2, noise_rng);
  const ComplexMatrix S_hat = beta * (H * Z + N);

  const auto detected = demodulate(std::span<const Complex>(S_hat.data(), static_cast<std::size_t>(S_hat.size())),
                                   cfg.modulation);
  long long errors = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) errors += detected[i] != bits[i];
  m.bit_errors = errors;
  m.bits = static_cast<long long>(bits.size());
  return m;
}

Aggregate monte_carlo(const SimConfig& cfg) {
  cfg.validate();
  Aggregate agg;
  std::size_t done = 0;
  const auto batch = static_cast<std::size_t>(cfg.trials);
  for (;;) {
    std::vector<TrialMetrics> results(batch);
    std::vector<std::optional<std::string>> failures(batch);
    parallel_for(done, done + batch, cfg.threads, [&](std::size_t i) {
      try {
        results[i - done] = downlink_trial(cfg, i);
      } catch (const std::exception& e) {
        failures[i - done] = e.what();
      }
    });
    for (std::size_t j = 0; j < batch; ++j) {
      if (failures[j]) throw TrialFailure(done + j, *failures[j], agg.per_trial);
      agg.bit_errors += results[j].bit_errors;
      agg.bits += results[j].bits;
      agg.per_trial.push_back(results[j]);
    }
    done += batch;
    if (!cfg.adaptive || agg.bit_errors >= cfg.min_errors || agg.bits >= cfg.max_bits) break;
  }

  agg.trials = static_cast<int>(agg.per_trial.size());
  agg.ber = agg.bits > 0 ? static_cast<double>(agg.bit_errors) / static_cast<double>(agg.bits) : 0.0;
  agg.ber_ci = wilson_interval(agg.bit_errors, agg.bits);
  agg.below_resolution = agg.bit_errors < cfg.min_errors;
  std::vector<double> mses;
  for (const auto& t : agg.per_trial) {
    if (std::isfinite(t.mse)) mses.push_back(t.mse);
    if (std::isfinite(t.delta_eta)) agg.delta_eta.push_back(t.delta_eta);
    if (!t.precoder_converged) ++agg.unconverged;
  }
  if (!mses.empty()) {
    double sum = 0.0;
    for (double v : mses) sum += v;
    agg.mse_mean = sum / static_cast<double>(mses.size());
    agg.mse_p10 = quantile(mses, 0.1);
    agg.mse_p50 = quantile(mses, 0.5);
    agg.mse_p90 = quantile(mses, 0.9);
  }
  return agg;
}

std::string_view to_string(CsiMode m) {
  switch (m) {
    case CsiMode::perfect: return "perfect";
    case CsiMode::noisy_raw: return "noisy_raw";
    case CsiMode::ei_cleaned: return "ei_cleaned";
    case CsiMode::ei_cleaned_known_eta: return "ei_cleaned_known_eta";
  }
  return "unknown";
}

CsiMode csi_from_string(std::string_view name) {
  for (auto m : {CsiMode::perfect, CsiMode::noisy_raw, CsiMode::ei_cleaned, CsiMode::ei_cleaned_known_eta})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown csi mode '" + std::string(name) + "'");
}

}  // namespace eiprec::link
