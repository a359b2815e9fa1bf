#include "fbrl/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fbrl {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::no_keyframes: return "no_keyframes";
    case Variant::freeform_feedback: return "freeform_feedback";
    case Variant::fixed_rho: return "fixed_rho";
    case Variant::drop_deltas_keep_rho: return "drop_deltas_keep_rho";
    case Variant::no_goal_delta: return "no_goal_delta";
    case Variant::no_fb_delta: return "no_fb_delta";
    case Variant::sparse_only: return "sparse_only";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view s) {
  for (Variant v : all_variants())
    if (s == to_string(v)) return v;
  return std::nullopt;
}

std::vector<Variant> all_variants() {
  return {Variant::full,      Variant::no_keyframes, Variant::freeform_feedback,
          Variant::fixed_rho, Variant::drop_deltas_keep_rho, Variant::no_goal_delta,
          Variant::no_fb_delta, Variant::sparse_only};
}

VariantFlags flags_for(Variant v) {
  VariantFlags f;
  switch (v) {
    case Variant::full: break;
    case Variant::no_keyframes: f.uniform_weights = true; break;
    case Variant::freeform_feedback: f.freeform = true; break;
    case Variant::fixed_rho: f.fixed_rho = true; break;
    case Variant::drop_deltas_keep_rho: f.zero_deltas = true; break;
    case Variant::no_goal_delta: f.no_goal_delta = true; break;
    case Variant::no_fb_delta: f.no_fb_delta = true; break;
    case Variant::sparse_only: f.shaping_off = true; break;
  }
  return f;
}

ShapingToggles toggles_for(const VariantFlags& f) {
  ShapingToggles t;
  t.use_goal_delta = !f.no_goal_delta;
  t.use_fb_delta = !f.no_fb_delta;
  t.adaptive_rho = !f.fixed_rho;
  t.zero_deltas = f.zero_deltas;
  return t;
}

ConfigError::ConfigError(std::vector<std::string> p)
    : std::runtime_error(p.empty() ? "invalid config"
                                   : "invalid config: " + p.front() +
                                         (p.size() > 1 ? " (+" + std::to_string(p.size() - 1) +
                                                             " more)"
                                                       : "")),
      problems(std::move(p)) {}

namespace {

// Field-by-field reader that records every problem instead of bailing out.
class Reader {
 public:
  Reader(const json& j, std::string prefix, std::vector<std::string>& problems)
      : j_(j), prefix_(std::move(prefix)), problems_(problems) {}

  void known(std::initializer_list<const char*> names) {
    std::set<std::string> known(names.begin(), names.end());
    for (const auto& [key, _] : j_.items())
      if (!known.count(key)) problem(key, "unknown key");
  }

  template <typename T>
  void get(const char* name, T& out) {
    if (!j_.contains(name)) return;
    try {
      out = j_.at(name).get<T>();
    } catch (const json::exception&) {
      problem(name, "wrong type");
    }
  }

  void get_string_enum(const char* name, const std::vector<std::string>& allowed,
                       std::string& out) {
    if (!j_.contains(name)) return;
    std::string s;
    try {
      s = j_.at(name).get<std::string>();
    } catch (const json::exception&) {
      problem(name, "wrong type");
      return;
    }
    for (const auto& a : allowed)
      if (s == a) {
        out = s;
        return;
      }
    problem(name, "must be one of the documented values, got \"" + s + "\"");
  }

  bool has(const char* name) const { return j_.contains(name); }
  const json& sub(const char* name) const { return j_.at(name); }

  void problem(const std::string& field, const std::string& msg) {
    problems_.push_back(prefix_ + field + ": " + msg);
  }

 private:
  const json& j_;
  std::string prefix_;
  std::vector<std::string>& problems_;
};

void read_keyframe(const json& j, KeyframeConfig& c, std::vector<std::string>& problems) {
  Reader r(j, "keyframe.", problems);
  r.known({"omega_s", "omega_v", "omega_a", "max_keyframes", "gap", "halfwidth", "floor"});
  r.get("omega_s", c.omega_s);
  r.get("omega_v", c.omega_v);
  r.get("omega_a", c.omega_a);
  r.get("max_keyframes", c.max_keyframes);
  r.get("gap", c.gap);
  r.get("halfwidth", c.halfwidth);
  r.get("floor", c.floor);
}

void read_align(const json& j, AlignConfig& c, std::vector<std::string>& problems) {
  Reader r(j, "align.", problems);
  r.known({"tau_bce", "tau_nce", "lambda_bce", "lambda_nce", "lambda_align", "lambda_uni",
           "label_smoothing", "contrastive_start_step", "lr"});
  r.get("tau_bce", c.tau_bce);
  r.get("tau_nce", c.tau_nce);
  r.get("lambda_bce", c.lambda_bce);
  r.get("lambda_nce", c.lambda_nce);
  r.get("lambda_align", c.lambda_align);
  r.get("lambda_uni", c.lambda_uni);
  r.get("label_smoothing", c.label_smoothing);
  r.get("contrastive_start_step", c.contrastive_start_step);
  r.get("lr", c.lr);
}

void read_reward(const json& j, RewardConfig& c, std::vector<std::string>& problems) {
  Reader r(j, "reward.", problems);
  r.known({"tau_goal", "tau_f", "gamma_shape", "alpha_base", "alpha_min", "alpha_max",
           "rho_min", "rho_max", "success_ema_beta", "progress_power", "per_step_clip",
           "shape_only_on_fail", "envelope_enabled", "warmup_steps", "anneal_end_step",
           "magnitude_normalizer", "target_ratio", "scale_floor", "scale_cap",
           "scale_ema_beta"});
  r.get("tau_goal", c.tau_goal);
  r.get("tau_f", c.tau_f);
  r.get("gamma_shape", c.gamma_shape);
  r.get("alpha_base", c.alpha_base);
  r.get("alpha_min", c.alpha_min);
  r.get("alpha_max", c.alpha_max);
  r.get("rho_min", c.rho_min);
  r.get("rho_max", c.rho_max);
  r.get("success_ema_beta", c.success_ema_beta);
  r.get("progress_power", c.progress_power);
  r.get("per_step_clip", c.per_step_clip);
  r.get("shape_only_on_fail", c.shape_only_on_fail);
  r.get("envelope_enabled", c.envelope_enabled);
  r.get("warmup_steps", c.warmup_steps);
  r.get("anneal_end_step", c.anneal_end_step);
  r.get("magnitude_normalizer", c.magnitude_normalizer);
  r.get("target_ratio", c.target_ratio);
  r.get("scale_floor", c.scale_floor);
  r.get("scale_cap", c.scale_cap);
  r.get("scale_ema_beta", c.scale_ema_beta);
}

void read_agent(const json& j, SacConfig& c, std::vector<std::string>& problems) {
  Reader r(j, "agent.", problems);
  r.known({"discount", "polyak_tau", "lr", "batch_size", "entropy_coef", "auto_entropy",
           "target_entropy_scale", "entropy_lr", "update_to_data", "start_steps", "hidden"});
  r.get("discount", c.discount);
  r.get("polyak_tau", c.polyak_tau);
  r.get("lr", c.lr);
  r.get("batch_size", c.batch_size);
  r.get("entropy_coef", c.entropy_coef);
  r.get("auto_entropy", c.auto_entropy);
  r.get("target_entropy_scale", c.target_entropy_scale);
  r.get("entropy_lr", c.entropy_lr);
  r.get("update_to_data", c.update_to_data);
  r.get("start_steps", c.start_steps);
  r.get("hidden", c.hidden);
}

void read_env(const json& j, EnvConfig& c, std::vector<std::string>& problems) {
  Reader r(j, "env.", problems);
  r.known({"move_step", "grasp_radius", "contact_radius", "goal_radius", "align_cos",
           "noise_sigma", "obs_dim"});
  r.get("move_step", c.move_step);
  r.get("grasp_radius", c.grasp_radius);
  r.get("contact_radius", c.contact_radius);
  r.get("goal_radius", c.goal_radius);
  r.get("align_cos", c.align_cos);
  r.get("noise_sigma", c.noise_sigma);
  r.get("obs_dim", c.obs_dim);
}

}  // namespace

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  const auto ids = builtin_task_ids();
  if (std::find(ids.begin(), ids.end(), task) == ids.end())
    problems.push_back("task: unknown task \"" + task + "\"");
  if (total_steps < 0) problems.push_back("total_steps: must be nonnegative");
  if (seeds.empty()) problems.push_back("seeds: must be nonempty");
  if (eval_every < 1) problems.push_back("eval_every: must be positive");
  if (eval_episodes < 1) problems.push_back("eval_episodes: must be positive");
  if (checkpoint_every < 0) problems.push_back("checkpoint_every: must be nonnegative");
  if (replay_capacity == 0) problems.push_back("replay_capacity: must be positive");
  if (embed_capacity == 0) problems.push_back("embed_capacity: must be positive");
  if (align_batch < 1) problems.push_back("align_batch: must be positive");
  if (feedback_dim < 16) problems.push_back("feedback_dim: too small for the slot layout");
  if (shared_dim < 2) problems.push_back("shared_dim: must be at least 2");
  if (instr_dim < 4) problems.push_back("instr_dim: must be at least 4");
  for (int h : projector_hidden)
    if (h < 1) problems.push_back("projector_hidden: widths must be positive");
  if (out_dir.empty()) problems.push_back("out_dir: must be nonempty");

  auto guard = [&](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      problems.push_back(std::string(what) + ": " + e.what());
    }
  };
  guard("align", [&] { align.validate(); });
  guard("reward", [&] { reward.validate(); });
  guard("agent", [&] { agent.validate(); });
  guard("keyframe", [&] {
    if (keyframe.omega_s < 0 || keyframe.omega_v < 0 || keyframe.omega_a < 0 ||
        std::abs(keyframe.omega_s + keyframe.omega_v + keyframe.omega_a - 1.0) > 1e-9)
      throw std::invalid_argument("saliency weights must be nonnegative and sum to 1");
    if (keyframe.max_keyframes < 0) throw std::invalid_argument("max_keyframes must be >= 0");
    if (keyframe.gap < 1) throw std::invalid_argument("gap must be >= 1");
    if (keyframe.halfwidth < 0) throw std::invalid_argument("halfwidth must be >= 0");
    if (keyframe.floor < 0.0 || keyframe.floor >= 1.0)
      throw std::invalid_argument("floor must lie in [0, 1)");
  });
  guard("env", [&] {
    if (env.move_step <= 0 || env.grasp_radius <= 0 || env.contact_radius <= 0 ||
        env.goal_radius <= 0)
      throw std::invalid_argument("geometry parameters must be positive");
    if (env.noise_sigma < 0) throw std::invalid_argument("noise_sigma must be >= 0");
    if (env.obs_dim != 32) throw std::invalid_argument("obs_dim must be 32");
  });
  return problems;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  std::vector<std::string> problems;
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ConfigError({"malformed JSON"});
  if (!j.is_object()) throw ConfigError({"top-level value must be an object"});

  ExperimentConfig c;
  Reader r(j, "", problems);
  r.known({"task", "goal_mode", "total_steps", "seeds", "variant", "out_dir", "feedback_mode",
           "eval_every", "eval_episodes", "checkpoint_every", "frozen_shaping",
           "keyframes_from_feedback", "replay_capacity", "embed_capacity", "align_batch",
           "feedback_dim", "shared_dim", "instr_dim", "projector_hidden", "keyframe", "align",
           "reward", "agent", "env"});
  r.get("task", c.task);
  {
    std::string mode = "fixed";
    r.get_string_enum("goal_mode", {"fixed", "random"}, mode);
    c.goal_mode = mode == "random" ? GoalMode::random : GoalMode::fixed;
  }
  r.get("total_steps", c.total_steps);
  r.get("seeds", c.seeds);
  if (j.contains("variant")) {
    std::string v;
    r.get("variant", v);
    if (auto parsed = parse_variant(v))
      c.variant = *parsed;
    else
      r.problem("variant", "unknown variant \"" + v + "\"");
  }
  r.get("out_dir", c.out_dir);
  {
    std::string mode = "structured";
    r.get_string_enum("feedback_mode", {"structured", "freeform"}, mode);
    c.feedback_mode = mode == "freeform" ? FeedbackMode::freeform : FeedbackMode::structured;
  }
  r.get("eval_every", c.eval_every);
  r.get("eval_episodes", c.eval_episodes);
  r.get("checkpoint_every", c.checkpoint_every);
  r.get("frozen_shaping", c.frozen_shaping);
  r.get("keyframes_from_feedback", c.keyframes_from_feedback);
  r.get("replay_capacity", c.replay_capacity);
  r.get("embed_capacity", c.embed_capacity);
  r.get("align_batch", c.align_batch);
  r.get("feedback_dim", c.feedback_dim);
  r.get("shared_dim", c.shared_dim);
  r.get("instr_dim", c.instr_dim);
  r.get("projector_hidden", c.projector_hidden);

  if (r.has("keyframe")) read_keyframe(r.sub("keyframe"), c.keyframe, problems);
  if (r.has("align")) read_align(r.sub("align"), c.align, problems);
  if (r.has("reward")) read_reward(r.sub("reward"), c.reward, problems);
  if (r.has("agent")) read_agent(r.sub("agent"), c.agent, problems);
  if (r.has("env")) read_env(r.sub("env"), c.env, problems);

  if (problems.empty())
    for (auto& p : c.validate()) problems.push_back(p);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path});
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  ordered_json j;
  j["task"] = task;
  j["goal_mode"] = goal_mode == GoalMode::random ? "random" : "fixed";
  j["total_steps"] = total_steps;
  j["seeds"] = seeds;
  j["variant"] = std::string(to_string(variant));
  j["out_dir"] = out_dir;
  j["feedback_mode"] = feedback_mode == FeedbackMode::freeform ? "freeform" : "structured";
  j["eval_every"] = eval_every;
  j["eval_episodes"] = eval_episodes;
  j["checkpoint_every"] = checkpoint_every;
  j["frozen_shaping"] = frozen_shaping;
  j["keyframes_from_feedback"] = keyframes_from_feedback;
  j["replay_capacity"] = replay_capacity;
  j["embed_capacity"] = embed_capacity;
  j["align_batch"] = align_batch;
  j["feedback_dim"] = feedback_dim;
  j["shared_dim"] = shared_dim;
  j["instr_dim"] = instr_dim;
  j["projector_hidden"] = projector_hidden;
  j["keyframe"] = {{"omega_s", keyframe.omega_s},
                   {"omega_v", keyframe.omega_v},
                   {"omega_a", keyframe.omega_a},
                   {"max_keyframes", keyframe.max_keyframes},
                   {"gap", keyframe.gap},
                   {"halfwidth", keyframe.halfwidth},
                   {"floor", keyframe.floor}};
  j["align"] = {{"tau_bce", align.tau_bce},
                {"tau_nce", align.tau_nce},
                {"lambda_bce", align.lambda_bce},
                {"lambda_nce", align.lambda_nce},
                {"lambda_align", align.lambda_align},
                {"lambda_uni", align.lambda_uni},
                {"label_smoothing", align.label_smoothing},
                {"contrastive_start_step", align.contrastive_start_step},
                {"lr", align.lr}};
  j["reward"] = {{"tau_goal", reward.tau_goal},
                 {"tau_f", reward.tau_f},
                 {"gamma_shape", reward.gamma_shape},
                 {"alpha_base", reward.alpha_base},
                 {"alpha_min", reward.alpha_min},
                 {"alpha_max", reward.alpha_max},
                 {"rho_min", reward.rho_min},
                 {"rho_max", reward.rho_max},
                 {"success_ema_beta", reward.success_ema_beta},
                 {"progress_power", reward.progress_power},
                 {"per_step_clip", reward.per_step_clip},
                 {"shape_only_on_fail", reward.shape_only_on_fail},
                 {"envelope_enabled", reward.envelope_enabled},
                 {"warmup_steps", reward.warmup_steps},
                 {"anneal_end_step", reward.anneal_end_step},
                 {"magnitude_normalizer", reward.magnitude_normalizer},
                 {"target_ratio", reward.target_ratio},
                 {"scale_floor", reward.scale_floor},
                 {"scale_cap", reward.scale_cap},
                 {"scale_ema_beta", reward.scale_ema_beta}};
  j["agent"] = {{"discount", agent.discount},
                {"polyak_tau", agent.polyak_tau},
                {"lr", agent.lr},
                {"batch_size", agent.batch_size},
                {"entropy_coef", agent.entropy_coef},
                {"auto_entropy", agent.auto_entropy},
                {"target_entropy_scale", agent.target_entropy_scale},
                {"entropy_lr", agent.entropy_lr},
                {"update_to_data", agent.update_to_data},
                {"start_steps", agent.start_steps},
                {"hidden", agent.hidden}};
  j["env"] = {{"move_step", env.move_step},
              {"grasp_radius", env.grasp_radius},
              {"contact_radius", env.contact_radius},
              {"goal_radius", env.goal_radius},
              {"align_cos", env.align_cos},
              {"noise_sigma", env.noise_sigma},
              {"obs_dim", env.obs_dim}};
  return j.dump(2);
}

}  // namespace fbrl
