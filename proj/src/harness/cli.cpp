#include "fbrl/harness/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fbrl/feedback/feedback.hpp"
#include "fbrl/harness/config.hpp"
#include "fbrl/harness/experiment.hpp"
#include "fbrl/harness/report.hpp"

namespace fbrl {
namespace {

using ordered_json = nlohmann::ordered_json;

void emit_error(const std::string& kind, const std::string& message,
                const std::vector<std::string>& details = {}) {
  ordered_json err;
  err["error"]["type"] = kind;
  err["error"]["message"] = message;
  if (!details.empty()) err["error"]["details"] = details;
  std::cerr << err.dump() << std::endl;
}

std::string read_file_or_stdin(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    buf << in.rdbuf();
  }
  return buf.str();
}

struct TrainOpts {
  std::string config_path;
  std::string task;
  std::string variant;
  std::string out_dir;
  std::string feedback_mode;
  std::string goal_mode;
  std::vector<uint64_t> seeds;
  long long steps = -1;
  bool frozen_shaping = false;
};

ExperimentConfig build_config(const TrainOpts& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = ExperimentConfig::from_file(o.config_path);
  if (!o.task.empty()) cfg.task = o.task;
  if (!o.variant.empty()) {
    auto v = parse_variant(o.variant);
    if (!v) throw ConfigError({"unknown variant '" + o.variant + "'"});
    cfg.variant = *v;
  }
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  if (o.steps >= 0) cfg.total_steps = o.steps;
  if (!o.feedback_mode.empty()) {
    if (o.feedback_mode == "structured") cfg.feedback_mode = FeedbackMode::structured;
    else if (o.feedback_mode == "freeform") cfg.feedback_mode = FeedbackMode::freeform;
    else throw ConfigError({"unknown feedback mode '" + o.feedback_mode + "'"});
  }
  if (!o.goal_mode.empty()) {
    if (o.goal_mode == "fixed") cfg.goal_mode = GoalMode::fixed;
    else if (o.goal_mode == "random") cfg.goal_mode = GoalMode::random;
    else throw ConfigError({"unknown goal mode '" + o.goal_mode + "'"});
  }
  if (o.frozen_shaping) cfg.frozen_shaping = true;
  // The freeform variant and explicit freeform mode are the same switch.
  if (cfg.variant == Variant::freeform_feedback) cfg.feedback_mode = FeedbackMode::freeform;
  return cfg;
}

void add_train_flags(CLI::App* cmd, TrainOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--task", o.task, "task id (push, drawer, press)");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seeds, "seed list (overrides config)");
  cmd->add_option("--steps", o.steps, "total environment steps");
  cmd->add_option("--feedback-mode", o.feedback_mode, "structured or freeform");
  cmd->add_option("--goal-mode", o.goal_mode, "fixed or random");
  cmd->add_flag("--frozen-shaping", o.frozen_shaping, "reuse collection-time shaped rewards");
}

void print_run(const ExperimentConfig& cfg, const RunResult& r) {
  ordered_json line;
  line["variant"] = std::string(to_string(cfg.variant));
  line["seed"] = r.seed;
  line["final_success"] = r.final_success;
  line["env_steps"] = r.env_steps;
  line["episodes"] = r.episodes;
  line["dir"] = r.run_dir;
  std::cout << line.dump() << std::endl;
}

int cmd_train(const TrainOpts& opts) {
  ExperimentConfig cfg = build_config(opts);
  for (uint64_t seed : cfg.seeds) print_run(cfg, run_single(cfg, seed));
  return 0;
}

int cmd_ablate(const TrainOpts& opts, const std::vector<std::string>& variant_names) {
  std::vector<Variant> variants;
  if (variant_names.empty()) {
    variants = all_variants();
  } else {
    for (const auto& name : variant_names) {
      auto v = parse_variant(name);
      if (!v) throw ConfigError({"unknown variant '" + name + "'"});
      variants.push_back(*v);
    }
  }
  for (Variant v : variants) {
    TrainOpts per = opts;
    per.variant = std::string(to_string(v));
    ExperimentConfig cfg = build_config(per);
    for (uint64_t seed : cfg.seeds) print_run(cfg, run_single(cfg, seed));
  }
  return 0;
}

int cmd_validate_config(const std::string& path) {
  const std::string text = read_file_or_stdin(path);
  ExperimentConfig cfg = ExperimentConfig::from_json_text(text);  // throws ConfigError
  std::cout << cfg.to_json_text() << std::endl;
  return 0;
}

int cmd_validate_feedback(const std::string& path, std::optional<int> episode_len) {
  const std::string text = read_file_or_stdin(path);
  ValidationResult res = validate_feedback(text, episode_len);
  ordered_json out;
  out["valid"] = res.ok();
  if (!res.ok()) {
    out["errors"] = ordered_json::array();
    for (const auto& e : res.errors) {
      ordered_json item;
      item["field"] = e.field;
      item["message"] = e.message;
      out["errors"].push_back(item);
    }
  }
  std::cout << out.dump() << std::endl;
  return res.ok() ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"feedback-shaped reinforcement learning pipeline"};
  app.require_subcommand(1);

  TrainOpts train_opts;
  CLI::App* train = app.add_subcommand("train", "run one variant across its seeds");
  add_train_flags(train, train_opts);
  train->add_option("--variant", train_opts.variant, "pipeline variant");

  TrainOpts ablate_opts;
  std::vector<std::string> ablate_variants;
  CLI::App* ablate = app.add_subcommand("ablate", "run a set of variants across seeds");
  add_train_flags(ablate, ablate_opts);
  ablate->add_option("--variants", ablate_variants, "variant list (default: all)");

  std::string report_root = "runs", report_out = "report";
  CLI::App* report = app.add_subcommand("report", "aggregate finished runs into CSV tables");
  report->add_option("--runs", report_root, "directory scanned for runs");
  report->add_option("--out", report_out, "report output directory");

  std::string vc_path;
  CLI::App* vconfig = app.add_subcommand("validate-config", "check a config file, print normalized form");
  vconfig->add_option("--config", vc_path, "config path or - for stdin")->required();

  std::string vf_path;
  int vf_len = -1;
  CLI::App* vfeedback = app.add_subcommand("validate-feedback", "check a feedback JSON document");
  vfeedback->add_option("--file", vf_path, "feedback path or - for stdin")->required();
  vfeedback->add_option("--episode-len", vf_len, "bound for key frame indices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (train->parsed()) return cmd_train(train_opts);
    if (ablate->parsed()) return cmd_ablate(ablate_opts, ablate_variants);
    if (report->parsed()) {
      write_report(report_root, report_out);
      std::cout << ordered_json{{"report", report_out}}.dump() << std::endl;
      return 0;
    }
    if (vconfig->parsed()) return cmd_validate_config(vc_path);
    if (vfeedback->parsed())
      return cmd_validate_feedback(vf_path,
                                   vf_len >= 0 ? std::optional<int>(vf_len) : std::nullopt);
  } catch (const ConfigError& e) {
    emit_error("config", "invalid configuration", e.problems);
    return 2;
  } catch (const std::exception& e) {
    emit_error("runtime", e.what());
    return 1;
  }
  return 0;
}

}  // namespace fbrl
