#include "fbrl/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include <nlohmann/json.hpp>

namespace fbrl {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Shortest round-trip decimal form, stable across runs.
std::string csv_num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  double back = 0.0;
  std::sscanf(buf, "%lf", &back);
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[64];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, x);
    std::sscanf(shorter, "%lf", &back);
    if (back == x) return shorter;
  }
  return buf;
}

struct EvalPoint {
  long long step = 0;
  double success = 0.0;
};

struct GapPoint {
  long long step = 0;
  double gap = 0.0;
};

void read_metrics(const fs::path& dir, std::vector<EvalPoint>& evals, std::vector<GapPoint>& gaps) {
  std::ifstream in(dir / "metrics.jsonl");
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    const std::string type = j.value("type", "");
    if (type == "eval") {
      evals.push_back({j.at("step").get<long long>(), j.at("success_rate").get<double>()});
    } else if (type == "align" && j.contains("gap") && !j.at("gap").is_null()) {
      gaps.push_back({j.at("step").get<long long>(), j.at("gap").get<double>()});
    }
  }
}

}  // namespace

double sample_mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = sample_mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::vector<RunSummary> scan_runs(const std::string& root) {
  std::vector<fs::path> infos;
  if (fs::exists(root)) {
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file() && entry.path().filename() == "runinfo.json")
        infos.push_back(entry.path());
    }
  }
  std::sort(infos.begin(), infos.end());

  std::vector<RunSummary> runs;
  for (const auto& path : infos) {
    std::ifstream in(path);
    json j = json::parse(in);
    RunSummary r;
    r.variant = j.at("variant").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    r.dir = path.parent_path().string();
    r.final_success = j.at("final_success").get<double>();
    r.env_steps = j.at("env_steps").get<long long>();
    runs.push_back(std::move(r));
  }
  return runs;
}

std::vector<VariantSummary> summarize(const std::vector<RunSummary>& runs) {
  std::map<std::string, std::vector<double>> by_variant;
  for (const auto& r : runs) by_variant[r.variant].push_back(r.final_success);

  std::vector<VariantSummary> out;
  for (const auto& [variant, finals] : by_variant) {
    VariantSummary s;
    s.variant = variant;
    s.runs = static_cast<int>(finals.size());
    s.mean_success = sample_mean(finals);
    s.std_success = sample_std(finals);
    out.push_back(std::move(s));
  }
  return out;
}

void write_report(const std::string& root, const std::string& out_dir) {
  const auto runs = scan_runs(root);
  if (runs.empty()) throw std::runtime_error("no runs found under " + root);

  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "summary.csv", std::ios::trunc);
    out << "variant,runs,mean_final_success,std_final_success\n";
    for (const auto& s : summarize(runs))
      out << s.variant << ',' << s.runs << ',' << csv_num(s.mean_success) << ','
          << csv_num(s.std_success) << '\n';
  }

  // (variant, step) -> success rates across seeds; (variant, seed) gap series.
  std::map<std::pair<std::string, long long>, std::vector<double>> curve;
  std::map<std::pair<std::string, uint64_t>, std::vector<GapPoint>> gap_series;
  std::vector<RunSummary> ordered = runs;
  std::sort(ordered.begin(), ordered.end(), [](const RunSummary& a, const RunSummary& b) {
    return std::tie(a.variant, a.seed) < std::tie(b.variant, b.seed);
  });
  for (const auto& r : ordered) {
    std::vector<EvalPoint> evals;
    std::vector<GapPoint> gaps;
    read_metrics(r.dir, evals, gaps);
    for (const auto& e : evals) curve[{r.variant, e.step}].push_back(e.success);
    auto& gs = gap_series[{r.variant, r.seed}];
    gs.insert(gs.end(), gaps.begin(), gaps.end());
  }

  {
    std::ofstream out(fs::path(out_dir) / "success_curve.csv", std::ios::trunc);
    out << "variant,step,n,mean_success,std_success\n";
    for (const auto& [key, vals] : curve)
      out << key.first << ',' << key.second << ',' << vals.size() << ','
          << csv_num(sample_mean(vals)) << ',' << csv_num(sample_std(vals)) << '\n';
  }
  {
    std::ofstream out(fs::path(out_dir) / "gap_curve.csv", std::ios::trunc);
    out << "variant,seed,step,gap\n";
    for (const auto& [key, points] : gap_series)
      for (const auto& p : points)
        out << key.first << ',' << key.second << ',' << p.step << ',' << csv_num(p.gap) << '\n';
  }
}

}  // namespace fbrl
