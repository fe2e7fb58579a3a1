#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "eiprec/channel.hpp"
#include "eiprec/eta_estimator.hpp"
#include "eiprec/precoder.hpp"
#include "eiprec/rie.hpp"
#include "eiprec_version.hpp"

namespace eiprec::cli {

namespace fs = std::filesystem;

std::string version_string() { return EIPREC_GIT_DESCRIBE; }

namespace {

std::string snr_definition(const link::SimConfig& sim) {
  if (sim.snr_reference == link::SnrReference::total) return "snr_db = 10*log10(p_total / sigma2)";
  return "snr_db = 10*log10(p_total / (antennas * sigma2))";
}

json headline_json(const experiments::ExperimentResult& r) {
  json h = json::object();
  for (const auto& [k, v] : r.headline) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (!v.empty() && end == v.c_str() + v.size() && std::isfinite(x))
      h[k] = x;
    else
      h[k] = v;
  }
  return h;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string csv_text(const experiments::ExperimentResult& r, const json& cfg, const link::SimConfig& sim) {
  std::string s;
  s += "# eiprec " + version_string() + "\n";
  s += "# experiment: " + std::string(experiments::to_string(r.kind)) + "\n";
  s += "# seed: " + std::to_string(sim.seed) + "\n";
  s += "# " + snr_definition(sim) + "\n";
  s += "# config: " + cfg.dump() + "\n";
  for (std::size_t i = 0; i < r.table.columns.size(); ++i) s += (i ? "," : "") + r.table.columns[i];
  s += "\n";
  for (const auto& row : r.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
    s += "\n";
  }
  return s;
}

json summary_base(const Invocation& inv, const json& cfg, const link::SimConfig& sim) {
  return {{"version", version_string()},
          {"subcommand", std::string(to_string(inv.subcommand))},
          {"seed", sim.seed},
          {"snr_definition", snr_definition(sim)},
          {"config", cfg}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_timing(const fs::path& path, double seconds) {
  write_file(path, json{{"wall_seconds", seconds}}.dump(2) + "\n");
}

// Estimate eta, clean, precode with WFQ, on a user-supplied observation.
int run_pipeline(const Invocation& inv, const json& cfg, const experiments::ExperimentConfig& ex, std::ostream& out) {
  ComplexMatrix H_obs;
  try {
    H_obs = channel::load_matrix(*inv.input);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--input: ") + e.what());
  }
  if (H_obs.rows() < 1 || H_obs.rows() >= H_obs.cols())
    throw ConfigError("--input: matrix must have fewer rows (users) than columns (antennas)");

  link::SimConfig sim = ex.sim;
  sim.dims = SystemDims(static_cast<int>(H_obs.rows()), static_cast<int>(H_obs.cols()));
  const auto t0 = std::chrono::steady_clock::now();
  const auto est = eta::estimate_eta(H_obs, sim.estimator());
  const ComplexMatrix H_hat = rie::clean_channel(H_obs, est.eta_hat, sim.cleaner_config());
  const double sigma2 = sim.noise_variance();
  const auto wfq = precode::wfq_precode(H_hat, sigma2, sim.p_total, sim.dac);
  const double elapsed = seconds_since(t0);

  fs::create_directories(inv.out_dir);
  channel::save_matrix(inv.out_dir / "clean_csi.H_hat.bin", H_hat);
  channel::save_matrix(inv.out_dir / "clean_csi.P.bin", wfq.output.P);
  json summary = summary_base(inv, cfg, sim);
  summary["input"] = inv.input->string();
  summary["users"] = sim.dims.users;
  summary["antennas"] = sim.dims.antennas;
  summary["eta_hat"] = est.eta_hat;
  summary["alpha_hat"] = est.alpha_hat;
  summary["estimator_order"] = sim.estimator().order;
  summary["identifiable"] = est.identifiable;
  summary["beta"] = wfq.output.beta;
  summary["wfq_converged"] = wfq.converged;
  summary["wfq_iterations"] = wfq.iterations;
  summary["bussgang_gain"] = std::vector<double>(wfq.model.F.data(), wfq.model.F.data() + wfq.model.F.size());
  write_file(inv.out_dir / "clean_csi.json", summary.dump(2) + "\n");
  write_timing(inv.out_dir / "clean_csi.timing.json", elapsed);
  out << "eta_hat " << experiments::format_number(est.eta_hat) << "\n";
  out << "wrote " << (inv.out_dir / "clean_csi.json").string() << "\n";
  return kOk;
}

int run_checked(const Invocation& inv, const std::map<std::string, std::string>& env, std::ostream& out) {
  const json cfg = resolve(inv, env);
  const auto ex = to_experiment(inv.subcommand, cfg);
  const auto kind = experiment_for(inv.subcommand);
  const std::string stem = inv.input ? "clean_csi" : std::string(experiments::to_string(kind));

  if (inv.dry_run) {
    json plan = {{"subcommand", std::string(to_string(inv.subcommand))},
                 {"experiment", inv.input ? "pipeline" : std::string(experiments::to_string(kind))},
                 {"out_dir", inv.out_dir.string()},
                 {"seed", ex.sim.seed},
                 {"threads", ex.sim.threads},
                 {"snr_definition", snr_definition(ex.sim)},
                 {"config", cfg}};
    if (inv.input) plan["input"] = inv.input->string();
    out << plan.dump(2) << "\n";
    return kOk;
  }
  if (inv.input) {
    if (inv.subcommand != Subcommand::clean_csi) throw ConfigError("--input is only accepted by clean-csi");
    return run_pipeline(inv, cfg, ex, out);
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto result = experiments::run_experiment(kind, ex);
  const double elapsed = seconds_since(t0);

  fs::create_directories(inv.out_dir);
  write_file(inv.out_dir / (stem + ".csv"), csv_text(result, cfg, ex.sim));
  json summary = summary_base(inv, cfg, ex.sim);
  summary["experiment"] = std::string(experiments::to_string(kind));
  summary["columns"] = result.table.columns;
  summary["rows"] = result.table.rows.size();
  summary["headline"] = headline_json(result);
  write_file(inv.out_dir / (stem + ".json"), summary.dump(2) + "\n");
  write_timing(inv.out_dir / (stem + ".timing.json"), elapsed);

  for (const auto& [k, v] : result.headline) out << k << " " << v << "\n";
  out << "wrote " << (inv.out_dir / (stem + ".csv")).string() << "\n";
  return kOk;
}

void dump_partial(const Invocation& inv, const link::TrialFailure& e, std::ostream& err) {
  json trials = json::array();
  for (const auto& t : e.completed())
    trials.push_back({{"trial", t.trial}, {"seed", t.seed}, {"bit_errors", t.bit_errors}, {"bits", t.bits},
                      {"mse", std::isfinite(t.mse) ? json(t.mse) : json()},
                      {"eta_hat", std::isfinite(t.eta_hat) ? json(t.eta_hat) : json()}});
  try {
    fs::create_directories(inv.out_dir);
    const auto path = inv.out_dir / "partial_trials.json";
    write_file(path, json{{"failed_trial", e.trial()}, {"error", e.what()}, {"completed", trials}}.dump(2) + "\n");
    err << "partial results in " << path.string() << "\n";
  } catch (const std::exception& io) {
    err << "could not write partial results: " << io.what() << "\n";
  }
}

}  // namespace

int run(const Invocation& inv, const std::map<std::string, std::string>& env, std::ostream& out, std::ostream& err) {
  try {
    return run_checked(inv, env, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const link::TrialFailure& e) {
    err << "numerical failure in " << e.what() << " (" << e.completed().size() << " trials completed)\n";
    dump_partial(inv, e, err);
    return kNumerical;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const DomainError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace eiprec::cli
