#include "eiprec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Eigenvalues>

#include "eiprec/rmt.hpp"

namespace eiprec::experiments {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::eta_cdf: return "eta_cdf";
    case ExperimentKind::mse_vs_antennas: return "mse_vs_antennas";
    case ExperimentKind::ber_vs_snr: return "ber_vs_snr";
    case ExperimentKind::ber_vs_eta: return "ber_vs_eta";
    case ExperimentKind::spectrum_check: return "spectrum_check";
  }
  return "unknown";
}

ExperimentKind experiment_from_string(std::string_view name) {
  for (auto k : {ExperimentKind::eta_cdf, ExperimentKind::mse_vs_antennas, ExperimentKind::ber_vs_snr,
                 ExperimentKind::ber_vs_eta, ExperimentKind::spectrum_check})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

double crossing_snr(const std::vector<double>& snr_db, const std::vector<double>& ber, double target) {
  if (snr_db.size() != ber.size()) throw std::invalid_argument("snr and ber lists differ in length");
  const auto lg = [](double b) { return std::log10(std::max(b, 1e-12)); };
  for (std::size_t i = 0; i < ber.size(); ++i) {
    if (ber[i] > target) continue;
    if (i == 0) return snr_db[0];
    const double y0 = lg(ber[i - 1]);
    const double y1 = lg(ber[i]);
    const double t = (y0 - lg(target)) / (y0 - y1);
    return snr_db[i - 1] + t * (snr_db[i] - snr_db[i - 1]);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SpectrumHistogram spectrum_histogram(const SystemDims& dims, int trials, int bins, std::uint64_t seed, int threads) {
  if (trials < 1 || bins < 1) throw DomainError("spectrum check needs trials and bins");
  const AspectRatio q = dims.q();
  const auto support = rmt::bsca_support(q);
  const double lo = -support.b;
  const double width = 2.0 * support.b / bins;

  std::vector<std::vector<double>> eigs(static_cast<std::size_t>(trials));
  link::parallel_for(0, static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    RandomStream rng(derive_seed(seed, t, static_cast<std::uint64_t>(link::Stream::channel)));
    const ComplexMatrix B = channel::build_bsca(channel::gen_channel(dims, rng));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(B, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    eigs[t].assign(ev.data(), ev.data() + ev.size());
  });

  SpectrumHistogram out;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  double outside = 0.0;
  double total = 0.0;
  for (const auto& ev : eigs) {
    double scale = 0.0;
    for (double l : ev) scale = std::max(scale, std::abs(l));
    int zeros = 0;
    for (double l : ev) {
      total += 1.0;
      if (std::abs(l) < 1e-10 * std::max(scale, 1.0)) {
        ++zeros;
        continue;
      }
      const double pos = (l - lo) / width;
      if (pos < 0.0 || pos >= bins) {
        outside += 1.0;
        continue;
      }
      counts[static_cast<std::size_t>(pos)] += 1.0;
    }
    out.zero_counts.push_back(zeros);
  }

  constexpr int kSub = 64;
  out.l1 = outside / total;
  for (int i = 0; i < bins; ++i) {
    const double a = lo + i * width;
    double avg = 0.0;
    for (int s = 0; s < kSub; ++s) avg += rmt::bsca_density(a + (s + 0.5) * width / kSub, q);
    avg /= kSub;
    const double emp = counts[static_cast<std::size_t>(i)] / (total * width);
    out.centers.push_back(a + 0.5 * width);
    out.empirical.push_back(emp);
    out.analytic.push_back(avg);
    out.l1 += std::abs(emp - avg) * width;
  }
  return out;
}

namespace {

using link::SimConfig;

std::string seed_str(std::uint64_t s) { return std::to_string(s); }

std::vector<double> uniform_grid(double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = n > 1 ? hi * i / (n - 1) : hi;
  return g;
}

ExperimentResult run_spectrum(const ExperimentConfig& cfg) {
  const auto& sim = cfg.sim;
  const auto h = spectrum_histogram(sim.dims, sim.trials, cfg.histogram_bins, sim.seed, sim.threads);
  ExperimentResult r;
  r.kind = ExperimentKind::spectrum_check;
  r.table.columns = {"bin_center", "empirical_density", "analytic_density"};
  for (std::size_t i = 0; i < h.centers.size(); ++i)
    r.table.rows.push_back({format_number(h.centers[i]), format_number(h.empirical[i]), format_number(h.analytic[i])});
  const int expected = sim.dims.antennas - sim.dims.users;
  const bool exact = std::all_of(h.zero_counts.begin(), h.zero_counts.end(), [&](int z) { return z == expected; });
  const auto support = rmt::bsca_support(sim.dims.q());
  r.headline = {{"l1_distance", format_number(h.l1)},
                {"zero_eigenvalues_expected", std::to_string(expected)},
                {"zero_eigenvalues_exact", exact ? "true" : "false"},
                {"support_a", format_number(support.a)},
                {"support_b", format_number(support.b)},
                {"zero_atom", format_number(support.zero_atom)},
                {"trials", std::to_string(sim.trials)}};
  return r;
}

ExperimentResult run_eta_cdf(const ExperimentConfig& cfg) {
  ExperimentResult r;
  r.kind = ExperimentKind::eta_cdf;
  r.table.columns = {"eta", "delta_eta", "cdf"};
  const auto grid = uniform_grid(cfg.cdf_max, cfg.cdf_points);
  for (double eta : cfg.etas) {
    SimConfig sim = cfg.sim;
    sim.eta = eta;
    sim.validate();
    const auto est_cfg = sim.estimator();
    std::vector<double> deltas(static_cast<std::size_t>(sim.trials));
    link::parallel_for(0, deltas.size(), sim.threads, [&](std::size_t t) {
      RandomStream ch(derive_seed(sim.seed, t, static_cast<std::uint64_t>(link::Stream::channel)));
      RandomStream er(derive_seed(sim.seed, t, static_cast<std::uint64_t>(link::Stream::csi_error)));
      const ComplexMatrix H = channel::gen_channel(sim.dims, ch);
      const ComplexMatrix Ht = channel::corrupt(H, {eta, sim.corruption, sim.c}, er);
      deltas[t] = eta::delta_eta(eta, eta::estimate_eta(Ht, est_cfg));
    });
    for (const auto& p : link::empirical_cdf(deltas, grid))
      r.table.rows.push_back({format_number(eta), format_number(p.x), format_number(p.cdf)});
    std::vector<double> sorted = deltas;
    std::sort(sorted.begin(), sorted.end());
    const double below = static_cast<double>(std::count_if(deltas.begin(), deltas.end(), [](double d) { return d < 0.05; })) /
                         static_cast<double>(deltas.size());
    const std::string tag = "eta_" + format_number(eta) + "_";
    r.headline.push_back({tag + "p_below_0.05", format_number(below)});
    r.headline.push_back({tag + "median", format_number(sorted[sorted.size() / 2])});
    r.headline.push_back({tag + "max", format_number(sorted.back())});
    r.headline.push_back({tag + "order", std::to_string(est_cfg.order)});
  }
  r.headline.push_back({"theory_mode", cfg.sim.estimator_mode == rmt::TheoryMode::paper ? "paper" : "gaussian_equivalent"});
  r.headline.push_back({"trials", std::to_string(cfg.sim.trials)});
  return r;
}

ExperimentResult run_mse(const ExperimentConfig& cfg) {
  ExperimentResult r;
  r.kind = ExperimentKind::mse_vs_antennas;
  r.table.columns = {"eta",       "users",       "antennas",  "mse_cleaned", "mse_noisy",
                     "mse_printed", "mse_floor", "win_rate", "trials",      "seed"};
  for (double eta : cfg.etas) {
    for (int a : cfg.antennas) {
      SimConfig sim = cfg.sim;
      sim.eta = eta;
      sim.dims = SystemDims(cfg.sim.dims.users, a);
      sim.validate();
      const auto est_cfg = sim.estimator();
      auto clean_cfg = sim.cleaner_config();
      auto printed_cfg = clean_cfg;
      printed_cfg.variant = rie::ShrinkVariant::printed;
      const auto n = static_cast<std::size_t>(sim.trials);
      std::vector<double> cleaned(n), noisy(n), printed(n);
      link::parallel_for(0, n, sim.threads, [&](std::size_t t) {
        RandomStream ch(derive_seed(sim.seed, t, static_cast<std::uint64_t>(link::Stream::channel)));
        RandomStream er(derive_seed(sim.seed, t, static_cast<std::uint64_t>(link::Stream::csi_error)));
        const ComplexMatrix H = channel::gen_channel(sim.dims, ch);
        const ComplexMatrix Ht = channel::corrupt(H, {eta, sim.corruption, sim.c}, er);
        const double eta_used =
            sim.csi == link::CsiMode::ei_cleaned_known_eta ? eta : eta::estimate_eta(Ht, est_cfg).eta_hat;
        cleaned[t] = rie::mse(H, rie::clean_channel(Ht, eta_used, clean_cfg));
        printed[t] = rie::mse(H, rie::clean_channel(Ht, eta_used, printed_cfg));
        noisy[t] = rie::mse(H, Ht);
      });
      double mc = 0, mn = 0, mp = 0;
      int wins = 0;
      for (std::size_t t = 0; t < n; ++t) {
        mc += cleaned[t];
        mn += noisy[t];
        mp += printed[t];
        wins += cleaned[t] <= noisy[t];
      }
      const double dn = static_cast<double>(n);
      r.table.rows.push_back({format_number(eta), std::to_string(sim.dims.users), std::to_string(a),
                              format_number(mc / dn), format_number(mn / dn), format_number(mp / dn),
                              format_number(eta / a), format_number(wins / dn), std::to_string(n),
                              seed_str(sim.seed)});
    }
  }
  r.headline.push_back({"cells", std::to_string(r.table.rows.size())});
  r.headline.push_back({"csi_mode", std::string(link::to_string(cfg.sim.csi))});
  return r;
}

std::vector<std::string> ber_row(const SimConfig& sim, const link::Aggregate& agg) {
  return {format_number(sim.snr_db),
          format_number(sim.eta),
          std::string(precode::to_string(sim.precoder)),
          std::string(link::to_string(sim.csi)),
          sim.dac.bypass ? "inf" : std::to_string(sim.dac.bits),
          format_number(agg.ber),
          format_number(agg.ber_ci.lo),
          format_number(agg.ber_ci.hi),
          std::to_string(agg.bit_errors),
          std::to_string(agg.bits),
          std::to_string(agg.trials),
          agg.below_resolution ? "true" : "false",
          seed_str(sim.seed)};
}

const std::vector<std::string> kBerColumns = {"snr_db", "eta",        "precoder", "csi_mode", "bits",
                                              "ber",    "ber_lo",     "ber_hi",   "bit_errors",
                                              "bits_sent", "trials", "below_resolution", "seed"};

std::vector<int> bits_to_run(const ExperimentConfig& cfg) {
  if (!cfg.bits_list.empty()) return cfg.bits_list;
  return {cfg.sim.dac.bits};
}

ExperimentResult run_ber_snr(const ExperimentConfig& cfg) {
  ExperimentResult r;
  r.kind = ExperimentKind::ber_vs_snr;
  r.table.columns = kBerColumns;
  for (int bits : bits_to_run(cfg)) {
    std::vector<double> bers;
    for (double snr : cfg.snrs_db) {
      SimConfig sim = cfg.sim;
      sim.snr_db = snr;
      sim.dac.bits = bits;
      const auto agg = link::monte_carlo(sim);
      bers.push_back(agg.ber);
      r.table.rows.push_back(ber_row(sim, agg));
    }
    const std::string tag = cfg.sim.dac.bypass ? "bits_inf" : "bits_" + std::to_string(bits);
    r.headline.push_back({tag + "_snr_at_ber_1e-3", format_number(crossing_snr(cfg.snrs_db, bers, 1e-3))});
  }
  return r;
}

ExperimentResult run_ber_eta(const ExperimentConfig& cfg) {
  ExperimentResult r;
  r.kind = ExperimentKind::ber_vs_eta;
  r.table.columns = kBerColumns;
  for (int bits : bits_to_run(cfg)) {
    double max_eta_ok = -1.0;
    for (double eta : cfg.etas) {
      SimConfig sim = cfg.sim;
      sim.eta = eta;
      sim.dac.bits = bits;
      const auto agg = link::monte_carlo(sim);
      if (agg.ber <= 1e-3) max_eta_ok = std::max(max_eta_ok, eta);
      r.table.rows.push_back(ber_row(sim, agg));
    }
    const std::string tag = cfg.sim.dac.bypass ? "bits_inf" : "bits_" + std::to_string(bits);
    r.headline.push_back({tag + "_largest_eta_with_ber_below_1e-3", format_number(max_eta_ok)});
  }
  return r;
}

}  // namespace

ExperimentResult run_experiment(ExperimentKind kind, const ExperimentConfig& cfg) {
  cfg.sim.validate();
  switch (kind) {
    case ExperimentKind::spectrum_check: return run_spectrum(cfg);
    case ExperimentKind::eta_cdf: return run_eta_cdf(cfg);
    case ExperimentKind::mse_vs_antennas: return run_mse(cfg);
    case ExperimentKind::ber_vs_snr: return run_ber_snr(cfg);
    case ExperimentKind::ber_vs_eta: return run_ber_eta(cfg);
  }
  throw std::invalid_argument("unknown experiment");
}

}  // namespace eiprec::experiments
