// config.hpp -- experiment configuration and JSON round-trip.
//
// One versioned JSON document drives every CLI subcommand: macro geometry
// and widths, boundary table, analog/timing/energy parameters, run mode,
// fixture paths, seed, and output directory.  Unknown keys are rejected so
// typos fail loudly.  default_experiment_config() carries the shipped
// calibrated numbers; fixtures/default_config.json mirrors it and a test
// pins the two together.
#pragma once

#include <cstdint>
#include <string>

#include "hcim/macro.hpp"

namespace hcim {

struct FixturePaths {
  std::string net;
  std::string test_images, test_labels;
  std::string calib_images, calib_labels;
};

struct ExperimentConfig {
  int schema_version = 1;
  uint64_t seed = 1;
  MacroConfig macro;
  FixturePaths fixtures;
  std::string out_dir = "out";
};

void validate(const ExperimentConfig& cfg);

// Shipped defaults: geometry from the macro, sigma from fit-sigma, energy
// costs from fit-energy, thresholds from calibrate (regeneration recipe in
// the README).
ExperimentConfig default_experiment_config();

ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

// Throws ConfigError with file context on parse or validation failure.
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

}  // namespace hcim
