#include "config.hpp"

#include <charconv>
#include <fstream>

namespace eiprec::cli {

namespace {

const std::vector<std::pair<Subcommand, std::string_view>> kNames = {
    {Subcommand::spectra, "spectra"}, {Subcommand::estimate_eta, "estimate-eta"},
    {Subcommand::clean_csi, "clean-csi"}, {Subcommand::ber, "ber"}, {Subcommand::sweep, "sweep"}};

json snr_grid() {
  json g = json::array();
  for (int s = -4; s <= 20; s += 2) g.push_back(static_cast<double>(s));
  return g;
}

json eta_grid() {
  json g = json::array();
  for (int i = 0; i <= 12; ++i) g.push_back(0.05 * i);
  return g;
}

std::string type_name(const json& v) {
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  return v.type_name();
}

const json& at_path(const json& cfg, const std::string& path) {
  const json* node = &cfg;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (!node->is_object() || !node->contains(key)) throw ConfigError(path + ": missing required field");
    node = &(*node)[key];
    if (dot == std::string::npos) return *node;
    start = dot + 1;
  }
}

int get_int(const json& cfg, const std::string& path) {
  const json& v = at_path(cfg, path);
  if (!v.is_number_integer()) throw ConfigError(path + ": expected integer, got " + type_name(v) + " " + v.dump());
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(path + ": integer out of range");
  return static_cast<int>(x);
}

long long get_long(const json& cfg, const std::string& path) {
  const json& v = at_path(cfg, path);
  if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>()) && std::abs(v.get<double>()) < 9e18)
    return static_cast<long long>(v.get<double>());
  if (!v.is_number_integer()) throw ConfigError(path + ": expected integer, got " + type_name(v) + " " + v.dump());
  return v.get<long long>();
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected number, got " + type_name(v) + " " + v.dump());
  return v.get<double>();
}

double get_double(const json& cfg, const std::string& path) { return as_double(at_path(cfg, path), path); }

bool get_bool(const json& cfg, const std::string& path) {
  const json& v = at_path(cfg, path);
  if (!v.is_boolean()) throw ConfigError(path + ": expected boolean, got " + type_name(v) + " " + v.dump());
  return v.get<bool>();
}

std::string get_string(const json& cfg, const std::string& path) {
  const json& v = at_path(cfg, path);
  if (!v.is_string()) throw ConfigError(path + ": expected string, got " + type_name(v) + " " + v.dump());
  return v.get<std::string>();
}

// Scalar or nonempty list of numbers.
std::vector<double> get_double_list(const json& cfg, const std::string& path) {
  const json& v = at_path(cfg, path);
  if (!v.is_array()) return {as_double(v, path)};
  if (v.empty()) throw ConfigError(path + ": list must not be empty");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> get_int_list(const json& cfg, const std::string& path) {
  const json& v = at_path(cfg, path);
  json arr = v.is_array() ? v : json::array({v});
  if (arr.empty()) throw ConfigError(path + ": list must not be empty");
  std::vector<int> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    json wrapper = {{"x", arr[i]}};
    try {
      out.push_back(get_int(wrapper, "x"));
    } catch (const ConfigError& e) {
      throw ConfigError(path + (v.is_array() ? "[" + std::to_string(i) + "]" : "") + std::string(e.what()).substr(1));
    }
  }
  return out;
}

template <class T>
T single(const std::vector<T>& values, const std::string& path, Subcommand s) {
  if (values.size() != 1)
    throw ConfigError(path + ": '" + std::string(to_string(s)) + "' takes a single value, got a list of " +
                      std::to_string(values.size()));
  return values.front();
}

template <class Fn>
auto parse_enum(const json& cfg, const std::string& path, Fn&& fn) {
  const std::string v = get_string(cfg, path);
  try {
    return fn(v);
  } catch (const std::invalid_argument&) {
    throw ConfigError(path + ": unknown value '" + v + "'");
  }
}

}  // namespace

Subcommand subcommand_from_string(std::string_view name) {
  for (const auto& [s, n] : kNames)
    if (n == name) return s;
  throw ConfigError("unknown subcommand '" + std::string(name) + "'");
}

std::string_view to_string(Subcommand s) {
  for (const auto& [k, n] : kNames)
    if (k == s) return n;
  return "unknown";
}

experiments::ExperimentKind experiment_for(Subcommand s) {
  using experiments::ExperimentKind;
  switch (s) {
    case Subcommand::spectra: return ExperimentKind::spectrum_check;
    case Subcommand::estimate_eta: return ExperimentKind::eta_cdf;
    case Subcommand::clean_csi: return ExperimentKind::mse_vs_antennas;
    case Subcommand::ber: return ExperimentKind::ber_vs_snr;
    case Subcommand::sweep: return ExperimentKind::ber_vs_eta;
  }
  return ExperimentKind::spectrum_check;
}

json default_config(Subcommand s) {
  json cfg = {
      {"users", 20},
      {"antennas", 128},
      {"eta", 0.3},
      {"corruption", "additive"},
      {"c", 1.0},
      {"precoder", "wfq"},
      {"csi", "ei_cleaned"},
      {"dac", {{"bits", 4}, {"bypass", false}, {"step", 0.0}}},
      {"modulation", "qpsk"},
      {"snr_db", 10.0},
      {"snr_reference", "per_antenna"},
      {"p_total", 1.0},
      {"trials", 100},
      {"symbols_per_trial", 200},
      {"seed", 1},
      {"threads", 1},
      {"adaptive", {{"enabled", false}, {"min_errors", 100}, {"max_bits", 10'000'000}}},
      {"estimator", {{"order", 0}, {"mode", "gaussian_equivalent"}}},
      {"cleaner", {{"variant", "anchored"}, {"bandwidth", "adaptive"}, {"hilbert", "resolvent"}}},
      {"spectrum", {{"bins", 50}}},
      {"cdf", {{"max", 0.2}, {"points", 201}}},
  };
  switch (s) {
    case Subcommand::spectra:
      cfg["users"] = 128;
      cfg["antennas"] = 256;
      cfg["trials"] = 10;
      break;
    case Subcommand::estimate_eta:
      cfg["users"] = 30;
      cfg["antennas"] = 256;
      cfg["eta"] = 0.5;
      cfg["trials"] = 200;
      break;
    case Subcommand::clean_csi:
      cfg["antennas"] = json::array({32, 64, 128, 256});
      cfg["eta"] = json::array({0.1, 0.5, 0.9});
      break;
    case Subcommand::ber:
      cfg["snr_db"] = snr_grid();
      break;
    case Subcommand::sweep:
      cfg["users"] = 30;
      cfg["antennas"] = 256;
      cfg["eta"] = eta_grid();
      cfg["snr_db"] = 5.0;
      break;
  }
  return cfg;
}

void merge_config(json& base, const json& layer, const std::string& origin) {
  if (!layer.is_object()) throw ConfigError(origin + ": top level must be an object");
  for (const auto& [key, value] : layer.items()) {
    if (!base.contains(key)) throw ConfigError(origin + ": unknown key '" + key + "'");
    json& slot = base[key];
    if (slot.is_object()) {
      if (!value.is_object()) throw ConfigError(origin + ": '" + key + "' must be an object");
      merge_config(slot, value, origin + ": " + key);
    } else {
      if (value.is_object()) throw ConfigError(origin + ": '" + key + "' must not be an object");
      slot = value;
    }
  }
}

void apply_override(json& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json layer = value;
  std::size_t end = key.size();
  for (;;) {
    const auto dot = key.rfind('.', end - 1);
    const std::size_t start = dot == std::string::npos ? 0 : dot + 1;
    const std::string part = key.substr(start, end - start);
    if (part.empty()) throw ConfigError("override '" + key + "' has an empty key segment");
    layer = json{{part, layer}};
    if (dot == std::string::npos) break;
    end = dot;
  }
  merge_config(cfg, layer, "--set " + key);
}

std::uint64_t parse_seed(std::string_view text, std::string_view field) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || text.empty())
    throw ConfigError(std::string(field) + ": expected unsigned integer, got '" + std::string(text) + "'");
  return v;
}

int parse_threads(std::string_view text, std::string_view field) {
  int v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || text.empty() || v < 1)
    throw ConfigError(std::string(field) + ": expected positive integer, got '" + std::string(text) + "'");
  return v;
}

json resolve(const Invocation& inv, const std::map<std::string, std::string>& env) {
  json cfg = default_config(inv.subcommand);
  if (inv.config_file) {
    std::ifstream in(*inv.config_file);
    if (!in) throw ConfigError("cannot read config file " + inv.config_file->string());
    json file = json::parse(in, nullptr, false, true);
    if (file.is_discarded()) throw ConfigError(inv.config_file->string() + ": not valid JSON");
    merge_config(cfg, file, inv.config_file->string());
  }
  if (auto it = env.find("EIPREC_SEED"); it != env.end()) cfg["seed"] = parse_seed(it->second, "EIPREC_SEED");
  if (auto it = env.find("EIPREC_THREADS"); it != env.end())
    cfg["threads"] = parse_threads(it->second, "EIPREC_THREADS");
  for (const auto& o : inv.overrides) apply_override(cfg, o);
  if (inv.seed) cfg["seed"] = *inv.seed;
  if (inv.threads) cfg["threads"] = *inv.threads;
  to_experiment(inv.subcommand, cfg);
  return cfg;
}

experiments::ExperimentConfig to_experiment(Subcommand s, const json& cfg) {
  experiments::ExperimentConfig ex;
  auto& sim = ex.sim;

  const int users = get_int(cfg, "users");
  ex.antennas = get_int_list(cfg, "antennas");
  ex.etas = get_double_list(cfg, "eta");
  ex.snrs_db = get_double_list(cfg, "snr_db");
  const auto bits = get_int_list(cfg, "dac.bits");

  const bool sweeps_antennas = s == Subcommand::clean_csi;
  const bool sweeps_eta = s == Subcommand::clean_csi || s == Subcommand::estimate_eta || s == Subcommand::sweep;
  const bool sweeps_snr = s == Subcommand::ber;
  const bool sweeps_bits = s == Subcommand::ber || s == Subcommand::sweep;
  const int antennas = sweeps_antennas ? ex.antennas.front() : single(ex.antennas, "antennas", s);
  sim.eta = sweeps_eta ? ex.etas.front() : single(ex.etas, "eta", s);
  sim.snr_db = sweeps_snr ? ex.snrs_db.front() : single(ex.snrs_db, "snr_db", s);
  sim.dac.bits = sweeps_bits ? bits.front() : single(bits, "dac.bits", s);
  if (sweeps_bits && bits.size() > 1) ex.bits_list = bits;

  for (int a : ex.antennas)
    if (users <= 0 || users >= a)
      throw ConfigError("users/antennas: need 0 < users < antennas, got " + std::to_string(users) + " and " +
                        std::to_string(a));
  sim.dims = SystemDims(users, antennas);

  sim.corruption = parse_enum(cfg, "corruption", [](const std::string& v) {
    if (v == "additive") return channel::CorruptionMode::additive;
    if (v == "damped") return channel::CorruptionMode::damped;
    throw std::invalid_argument(v);
  });
  sim.c = get_double(cfg, "c");
  sim.precoder = parse_enum(cfg, "precoder", [](const std::string& v) { return precode::precoder_from_string(v); });
  sim.csi = parse_enum(cfg, "csi", [](const std::string& v) { return link::csi_from_string(v); });
  sim.dac.bypass = get_bool(cfg, "dac.bypass");
  sim.dac.step = get_double(cfg, "dac.step");
  sim.modulation = parse_enum(cfg, "modulation", [](const std::string& v) { return link::modulation_from_string(v); });
  sim.snr_reference = parse_enum(cfg, "snr_reference", [](const std::string& v) {
    if (v == "per_antenna") return link::SnrReference::per_antenna;
    if (v == "total") return link::SnrReference::total;
    throw std::invalid_argument(v);
  });
  sim.p_total = get_double(cfg, "p_total");
  sim.trials = get_int(cfg, "trials");
  sim.symbols_per_trial = get_int(cfg, "symbols_per_trial");
  {
    const json& seed = at_path(cfg, "seed");
    if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
      throw ConfigError("seed: expected unsigned integer, got " + type_name(seed) + " " + seed.dump());
    sim.seed = seed.get<std::uint64_t>();
  }
  sim.threads = get_int(cfg, "threads");
  sim.adaptive = get_bool(cfg, "adaptive.enabled");
  sim.min_errors = get_long(cfg, "adaptive.min_errors");
  sim.max_bits = get_long(cfg, "adaptive.max_bits");
  sim.estimator_order = get_int(cfg, "estimator.order");
  sim.estimator_mode = parse_enum(cfg, "estimator.mode", [](const std::string& v) {
    if (v == "paper") return rmt::TheoryMode::paper;
    if (v == "gaussian_equivalent") return rmt::TheoryMode::gaussian_equivalent;
    throw std::invalid_argument(v);
  });
  sim.cleaner.variant = parse_enum(cfg, "cleaner.variant", [](const std::string& v) {
    if (v == "anchored") return rie::ShrinkVariant::anchored;
    if (v == "printed") return rie::ShrinkVariant::printed;
    throw std::invalid_argument(v);
  });
  sim.cleaner.bandwidth = parse_enum(cfg, "cleaner.bandwidth", [](const std::string& v) {
    if (v == "adaptive") return rie::Bandwidth::adaptive;
    if (v == "local_law") return rie::Bandwidth::local_law;
    throw std::invalid_argument(v);
  });
  sim.cleaner.hilbert = parse_enum(cfg, "cleaner.hilbert", [](const std::string& v) {
    if (v == "resolvent") return rie::HilbertSign::resolvent;
    if (v == "paper") return rie::HilbertSign::paper;
    throw std::invalid_argument(v);
  });
  ex.histogram_bins = get_int(cfg, "spectrum.bins");
  ex.cdf_max = get_double(cfg, "cdf.max");
  ex.cdf_points = get_int(cfg, "cdf.points");
  if (ex.histogram_bins < 1) throw ConfigError("spectrum.bins: must be positive");
  if (ex.cdf_points < 2 || !(ex.cdf_max > 0.0)) throw ConfigError("cdf: need points >= 2 and max > 0");

  for (double eta : ex.etas) {
    try {
      channel::CorruptionModel{eta, sim.corruption, sim.c}.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("eta: ") + e.what());
    }
  }
  for (int b : bits)
    if (!sim.dac.bypass && (b < 1 || b > quant::kMaxBits)) throw ConfigError("dac.bits: must lie in 1..8");
  try {
    sim.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return ex;
}

}  // namespace eiprec::cli
