#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace epsim::cli {

struct CommandResult {
  json extra;                        // command-specific metadata fields
  std::vector<std::string> outputs;  // file names written inside the out dir
};

CommandResult cmd_spectrum(const ConfigView& config, const std::string& out_dir);
CommandResult cmd_evolve(const ConfigView& config, const std::string& out_dir);
CommandResult cmd_postselect(const ConfigView& config, const std::string& out_dir);
CommandResult cmd_sense(const ConfigView& config, const std::string& out_dir);
CommandResult cmd_fock_graph(const ConfigView& config, const std::string& out_dir);
CommandResult cmd_prep_check(const ConfigView& config, const std::string& out_dir);

}  // namespace epsim::cli
