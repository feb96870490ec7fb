#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sbeam/run_config.hpp"

namespace sbeam {

struct CommandResult {
  std::vector<std::string> files;  // paths written, in order
  nlohmann::json summary;
};

CommandResult cmd_simulate(const RunConfig& c);
CommandResult cmd_phase_diagram(const RunConfig& c);
CommandResult cmd_stationary(const RunConfig& c);
CommandResult cmd_stability(const RunConfig& c);
CommandResult cmd_pulling(const RunConfig& c);
CommandResult cmd_spectrum(const RunConfig& c);

const std::vector<std::string>& command_names();
CommandResult run_command(const std::string& name, const RunConfig& c);

// '#'-prefixed provenance lines written at the top of every CSV file.
std::string csv_preamble(const RunConfig& c);

}  // namespace sbeam
