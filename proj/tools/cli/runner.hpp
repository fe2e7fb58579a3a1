#pragma once

#include <map>
#include <ostream>
#include <string>

#include "config.hpp"

namespace eiprec::cli {

enum ExitCode : int { kOk = 0, kNumerical = 1, kConfig = 2 };

std::string version_string();

// Resolves the configuration, runs the subcommand and writes its files under inv.out_dir.
int run(const Invocation& inv, const std::map<std::string, std::string>& env, std::ostream& out, std::ostream& err);

}  // namespace eiprec::cli
