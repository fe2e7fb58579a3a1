#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cli/runner.hpp"

namespace {

std::map<std::string, std::string> read_env() {
  std::map<std::string, std::string> env;
  for (const char* name : {"EIPREC_SEED", "EIPREC_THREADS"})
    if (const char* v = std::getenv(name)) env[name] = v;
  return env;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace eiprec::cli;

  CLI::App app{"Spectral CSI cleaning and quantized precoding experiments"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  Invocation inv;
  std::string config_file, out_dir = ".", seed, input;
  int threads = 0;
  std::string trials, precoder, csi, bits, eta;

  const std::pair<const char*, const char*> commands[] = {
      {"spectra", "Augmented-matrix eigenvalue histogram against the analytic density"},
      {"estimate-eta", "CDF of the CSI-noise estimation error"},
      {"clean-csi", "Reconstruction MSE versus antenna count, or clean one matrix with --input"},
      {"ber", "BER versus SNR"},
      {"sweep", "BER versus CSI-noise level"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_file, "JSON config file");
    sub->add_option("--set", inv.overrides, "Override a config key, e.g. --set dac.bits=3 (repeatable)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--dry-run", inv.dry_run, "Print the resolved plan without computing");
    sub->add_option("--trials", trials, "Shorthand for --set trials=N");
    sub->add_option("--eta", eta, "Shorthand for --set eta=X");
    sub->add_option("--bits", bits, "Shorthand for --set dac.bits=B");
    sub->add_option("--precoder", precoder, "Shorthand for --set precoder=NAME");
    sub->add_option("--csi", csi, "Shorthand for --set csi=MODE");
    if (std::string(name) == "clean-csi")
      sub->add_option("--input", input, "Observed channel matrix to clean end to end");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    inv.subcommand = subcommand_from_string(app.get_subcommands().front()->get_name());
    if (!config_file.empty()) inv.config_file = config_file;
    if (!input.empty()) inv.input = input;
    inv.out_dir = out_dir;
    if (!seed.empty()) inv.seed = parse_seed(seed, "--seed");
    if (threads > 0) inv.threads = threads;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  }
  // Shorthands apply after --set so they take precedence.
  const std::pair<const char*, std::string*> shorthands[] = {
      {"trials", &trials}, {"eta", &eta}, {"dac.bits", &bits}, {"precoder", &precoder}, {"csi", &csi}};
  for (const auto& [key, value] : shorthands)
    if (!value->empty()) inv.overrides.push_back(std::string(key) + "=" + *value);

  return run(inv, read_env(), std::cout, std::cerr);
}
