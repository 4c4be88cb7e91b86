#pragma once

#include <iosfwd>

#include "risim/experiment.hpp"

namespace risim {

// Flat key=value text; # starts a comment, blank lines ignored, keys applied
// in file order (so a setup preset line can be refined by later keys).
// Unknown keys are rejected.
void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void apply_config_text(ExperimentConfig& cfg, std::istream& is);
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

// Complete key=value echo of a config; parsing it back reproduces the config.
std::string config_echo(const ExperimentConfig& cfg);

}  // namespace risim
