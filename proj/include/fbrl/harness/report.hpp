#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fbrl {

struct RunSummary {
  std::string variant;
  uint64_t seed = 0;
  std::string dir;
  double final_success = 0.0;
  long long env_steps = 0;
};

struct VariantSummary {
  std::string variant;
  int runs = 0;
  double mean_success = 0.0;
  double std_success = 0.0;  // sample std (n-1); 0 when n < 2
};

/// Sample mean / sample standard deviation (n-1 denominator).
double sample_mean(const std::vector<double>& xs);
double sample_std(const std::vector<double>& xs);

/// Scans `root` recursively for run directories (identified by runinfo.json).
std::vector<RunSummary> scan_runs(const std::string& root);

std::vector<VariantSummary> summarize(const std::vector<RunSummary>& runs);

/// Writes summary.csv, success_curve.csv and gap_curve.csv into `out_dir`.
/// Re-running over the same inputs reproduces the files byte for byte.
void write_report(const std::string& root, const std::string& out_dir);

}  // namespace fbrl
