#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hcps/learner.hpp"

namespace hcps::cli {

enum ExitCode { kOk = 0, kUsage = 1, kUnrealizable = 2, kValidationFailed = 3 };

struct RunConfig {
  std::string scenario_path;  // empty = built-in default scenario
  std::string driver_path;    // empty = default driver parameters
  std::string out;
  std::uint64_t seed = 1;
  EqOracleConfig oracle;
  std::string variant = "full";

  std::size_t max_rounds = 100;
  std::size_t max_states = 0;
  std::size_t state_cap = 2'000'000;
  std::size_t runs = 25;
  std::size_t max_iterations = 10;
  std::string expand_variant;

  std::string hm_path;
  std::string strategy_path;
  std::string policy = "strategy";
};

int cmd_learn(const RunConfig& cfg);
int cmd_synth(const RunConfig& cfg);
int cmd_validate(const RunConfig& cfg);
int cmd_refine(const RunConfig& cfg);
int cmd_demo(const RunConfig& cfg);

}  // namespace hcps::cli
