#pragma once

#include <string>
#include <vector>

#include "fbrl/harness/config.hpp"

namespace fbrl {

struct RunResult {
  uint64_t seed = 0;
  std::string run_dir;
  double final_success = 0.0;
  long long env_steps = 0;
  long long episodes = 0;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  double mean_final_success = 0.0;
};

/// One seeded training run; writes metrics.jsonl, feedback.jsonl, trace.jsonl,
/// runinfo.json and checkpoints under <out_dir>/<variant>/seed_<seed>/.
RunResult run_single(const ExperimentConfig& cfg, uint64_t seed);

/// Runs every seed in the config sequentially.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace fbrl
