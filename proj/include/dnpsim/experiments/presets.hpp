#pragma once

#include "dnpsim/experiments/config.hpp"

#include <string>
#include <vector>

namespace dnpsim::experiments {

std::vector<std::string> preset_names();

/// YAML source of a shipped preset. Throws ConfigError for an unknown name.
const std::string& preset_text(const std::string& name);

ExperimentConfig load_preset(const std::string& name);

}  // namespace dnpsim::experiments
