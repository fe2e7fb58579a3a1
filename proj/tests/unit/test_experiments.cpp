#include <doctest.h>

#include <map>

#include "eiprec/experiments.hpp"
#include "helpers.hpp"

using namespace eiprec;
using namespace eiprec::experiments;

namespace {

std::map<std::string, std::string> headline_map(const ExperimentResult& r) {
  return {r.headline.begin(), r.headline.end()};
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("spectrum histogram at 128 x 256") {
  const auto h = spectrum_histogram(SystemDims(128, 256), 10, 50, 1, 1);
  CHECK(h.l1 < 0.05);
  REQUIRE(h.zero_counts.size() == 10);
  for (int z : h.zero_counts) CHECK(z == 128);
  CHECK(h.centers.size() == 50);
  double mass = 0.0;
  const double width = h.centers[1] - h.centers[0];
  for (double d : h.empirical) mass += d * width;
  // The continuous part carries 1 - (A - U) / (U + A) of the mass.
  CHECK(mass == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  for (std::size_t i = 0; i < h.centers.size(); ++i) CHECK(h.analytic[i] >= 0.0);
}

TEST_CASE("spectrum experiment table and headline") {
  ExperimentConfig cfg;
  cfg.sim.dims = SystemDims(128, 256);
  cfg.sim.trials = 10;
  const auto r = run_experiment(ExperimentKind::spectrum_check, cfg);
  CHECK(r.table.columns == std::vector<std::string>{"bin_center", "empirical_density", "analytic_density"});
  CHECK(r.table.rows.size() == 50);
  const auto h = headline_map(r);
  CHECK(std::stod(h.at("l1_distance")) < 0.05);
  CHECK(h.at("zero_eigenvalues_expected") == "128");
  CHECK(h.at("zero_eigenvalues_exact") == "true");
}

TEST_CASE("reconstruction MSE falls strictly with the antenna count") {
  ExperimentConfig cfg;
  cfg.sim.dims = SystemDims(20, 256);
  cfg.sim.trials = 20;
  cfg.etas = {0.1};
  const auto r = run_experiment(ExperimentKind::mse_vs_antennas, cfg);
  REQUIRE(r.table.rows.size() == 4);
  const auto col = std::find(r.table.columns.begin(), r.table.columns.end(), "mse_cleaned") - r.table.columns.begin();
  for (std::size_t i = 1; i < r.table.rows.size(); ++i)
    CHECK(std::stod(r.table.rows[i][static_cast<std::size_t>(col)]) <
          std::stod(r.table.rows[i - 1][static_cast<std::size_t>(col)]));
}

TEST_CASE("estimation-error CDF at 30 x 256 and eta = 0.5") {
  ExperimentConfig cfg;
  cfg.sim.dims = SystemDims(30, 256);
  cfg.sim.trials = 200;
  cfg.sim.estimator_order = 3;
  cfg.etas = {0.5};
  const auto r = run_experiment(ExperimentKind::eta_cdf, cfg);
  const auto h = headline_map(r);
  CHECK(std::stod(h.at("eta_0.5_p_below_0.05")) >= 0.95);
  CHECK(h.at("eta_0.5_order") == "3");
  CHECK(h.at("theory_mode") == "gaussian_equivalent");
  REQUIRE(r.table.rows.size() == 201);
  for (std::size_t i = 1; i < r.table.rows.size(); ++i) CHECK(std::stod(r.table.rows[i][2]) >= std::stod(r.table.rows[i - 1][2]));
  CHECK(r.table.rows.back()[2] == "1");
}

TEST_CASE("BER table shape") {
  ExperimentConfig cfg;
  cfg.sim.dims = SystemDims(4, 32);
  cfg.sim.trials = 2;
  cfg.sim.symbols_per_trial = 20;
  cfg.snrs_db = {0.0, 10.0};
  cfg.bits_list = {2, 3};
  const auto r = run_experiment(ExperimentKind::ber_vs_snr, cfg);
  CHECK(r.table.rows.size() == 4);
  CHECK(r.table.columns.front() == "snr_db");
  for (const auto& row : r.table.rows) CHECK(row.size() == r.table.columns.size());
  const auto h = headline_map(r);
  CHECK(h.count("bits_2_snr_at_ber_1e-3") == 1);
  CHECK(h.count("bits_3_snr_at_ber_1e-3") == 1);
}

TEST_CASE("crossing SNR interpolation") {
  CHECK(crossing_snr({0.0, 10.0}, {1e-2, 1e-4}, 1e-3) == doctest::Approx(5.0));
  CHECK(crossing_snr({0.0, 4.0, 8.0}, {1e-1, 1e-2, 1e-3}, 1e-3) == doctest::Approx(8.0));
  CHECK(crossing_snr({2.0, 4.0}, {1e-4, 0.0}, 1e-3) == 2.0);
  CHECK(std::isnan(crossing_snr({0.0, 4.0}, {0.1, 0.05}, 1e-3)));
  CHECK(crossing_snr({0.0, 2.0}, {1e-2, 0.0}, 1e-3) > 0.0);
}

TEST_CASE("number formatting and names") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(256) == "256");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  for (auto k : {ExperimentKind::eta_cdf, ExperimentKind::mse_vs_antennas, ExperimentKind::ber_vs_snr,
                 ExperimentKind::ber_vs_eta, ExperimentKind::spectrum_check})
    CHECK(experiment_from_string(to_string(k)) == k);
}

}  // TEST_SUITE
