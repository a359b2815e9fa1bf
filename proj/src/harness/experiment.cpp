#include "fbrl/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include <nlohmann/json.hpp>

#include "fbrl/agent/replay.hpp"
#include "fbrl/agent/sac.hpp"
#include "fbrl/align/align.hpp"
#include "fbrl/core/checkpoint.hpp"
#include "fbrl/env/gripper_world.hpp"
#include "fbrl/feedback/encode.hpp"
#include "fbrl/feedback/reflect.hpp"
#include "fbrl/keyframe/keyframe.hpp"
#include "fbrl/reward/reward.hpp"

namespace fbrl {
namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// FIFO ring of alignment training rows, overwriting the oldest when full.
class EmbedRing {
 public:
  explicit EmbedRing(size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("embed capacity must be positive");
  }

  void push(AlignSampleRow row) {
    if (rows_.size() < capacity_) {
      rows_.push_back(std::move(row));
    } else {
      rows_[cursor_] = std::move(row);
      cursor_ = (cursor_ + 1) % capacity_;
    }
  }

  size_t size() const { return rows_.size(); }

  /// Up to `batch` distinct rows drawn uniformly.
  std::vector<AlignSampleRow> sample(size_t batch, Rng& rng) const {
    std::vector<size_t> idx(rows_.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    const size_t k = std::min(batch, idx.size());
    for (size_t i = 0; i < k; ++i) {
      const size_t j = i + static_cast<size_t>(rng.uniform_int(static_cast<int>(idx.size() - i)));
      std::swap(idx[i], idx[j]);
    }
    std::vector<AlignSampleRow> out;
    out.reserve(k);
    for (size_t i = 0; i < k; ++i) out.push_back(rows_[idx[i]]);
    return out;
  }

 private:
  size_t capacity_;
  size_t cursor_ = 0;
  std::vector<AlignSampleRow> rows_;
};

// Projected-embedding caches, valid for a single projector version.
struct EmbedCache {
  long long version = -1;
  std::unordered_map<uint64_t, std::pair<Vec, Vec>> obs;  // serial -> (z_t, z_next)
  struct CtxEmbeds {
    Vec z_f, z_y, z_g;
  };
  std::unordered_map<const EpisodeContext*, CtxEmbeds> ctx;

  void sync(long long projector_version) {
    if (version != projector_version) {
      obs.clear();
      ctx.clear();
      version = projector_version;
    }
  }
};

struct CollectedEpisode {
  EpisodeRecord record;
  std::vector<Vec> obs;        // T noisy observations
  std::vector<Vec> clean_obs;  // T noise-free feature vectors
};

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, uint64_t seed)
      : cfg_(cfg),
        flags_(flags_for(cfg.variant)),
        toggles_(toggles_for(flags_)),
        seed_(seed),
        root_(seed),
        task_(task_by_id(cfg.task, cfg.goal_mode)),
        env_(task_, cfg.env, root_.substream("env").seed()),
        eval_env_(task_, cfg.env, root_.substream("eval").seed()),
        action_rng_(root_.substream("action")),
        eval_rng_(root_.substream("eval.act")),
        replay_rng_(root_.substream("replay.sample")),
        align_rng_(root_.substream("align.sample")),
        reflect_base_(root_.substream("reflect")),
        replay_(cfg.replay_capacity),
        embed_(cfg.embed_capacity) {
    Rng proj_rng = root_.substream("projector.init");
    trainer_ = std::make_unique<AlignTrainer>(
        Projectors::init(cfg.env.obs_dim, cfg.instr_dim, cfg.feedback_dim, cfg.shared_dim,
                         cfg.projector_hidden, proj_rng),
        cfg.align);
    Rng agent_rng = root_.substream("agent.init");
    agent_ = std::make_unique<SacAgent>(cfg.env.obs_dim, kNumActions, cfg.agent, agent_rng);
    instr_ = instruction_features(task_, cfg.instr_dim);
  }

  RunResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    open_outputs();

    if (cfg_.total_steps == 0) {  // valid empty run: files exist, no data rows
      save_checkpoint("checkpoint.json");
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      write_runinfo(0.0, wall);
      close_outputs();
      return RunResult{seed_, run_dir_.string(), 0.0, 0, 0};
    }

    long long next_eval = cfg_.eval_every;
    long long next_ckpt = cfg_.checkpoint_every > 0 ? cfg_.checkpoint_every : -1;
    while (step_ < cfg_.total_steps) {
      process_episode(collect_episode());
      ++episode_;
      while (next_eval <= step_ && next_eval <= cfg_.total_steps) {
        write_eval(next_eval, evaluate());
        next_eval += cfg_.eval_every;
      }
      while (next_ckpt > 0 && next_ckpt <= step_ && next_ckpt < cfg_.total_steps) {
        save_checkpoint("checkpoint_" + std::to_string(next_ckpt) + ".json");
        next_ckpt += cfg_.checkpoint_every;
      }
    }

    const double final_success = evaluate();
    ordered_json fin;
    fin["type"] = "final";
    fin["step"] = step_;
    fin["success_rate"] = final_success;
    fin["episodes"] = episode_;
    fin["s_bar"] = shaping_.s_bar;
    metrics_ << fin.dump() << '\n';

    save_checkpoint("checkpoint.json");
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_runinfo(final_success, wall);
    close_outputs();

    return RunResult{seed_, run_dir_.string(), final_success, step_, episode_};
  }

 private:
  void open_outputs() {
    run_dir_ = fs::path(cfg_.out_dir) / std::string(to_string(cfg_.variant)) /
               ("seed_" + std::to_string(seed_));
    fs::create_directories(run_dir_);
    metrics_.open(run_dir_ / "metrics.jsonl", std::ios::trunc);
    feedback_log_.open(run_dir_ / "feedback.jsonl", std::ios::trunc);
    trace_log_.open(run_dir_ / "trace.jsonl", std::ios::trunc);
    if (!metrics_ || !feedback_log_ || !trace_log_)
      throw std::runtime_error("cannot open output files under " + run_dir_.string());
  }

  void close_outputs() {
    metrics_.close();
    feedback_log_.close();
    trace_log_.close();
  }

  CollectedEpisode collect_episode() {
    CollectedEpisode ep;
    const WorldState& s0 = env_.reset(static_cast<uint64_t>(episode_));
    ep.record.states.push_back(s0);
    ep.obs.push_back(env_.observe(s0));
    ep.clean_obs.push_back(env_.observe_clean(s0));

    while (step_ < cfg_.total_steps) {
      int a;
      if (step_ < cfg_.agent.start_steps) {
        a = action_rng_.uniform_int(kNumActions);
      } else {
        a = agent_->act(ep.obs.back(), /*greedy=*/false, action_rng_);
      }
      StepResult sr = env_.step(static_cast<Action>(a));
      ++step_;
      ep.record.states.push_back(sr.next);
      ep.record.actions.push_back(a);
      ep.record.r_task.push_back(sr.r_task);
      ep.record.annotations.push_back(sr.annotations);
      ep.obs.push_back(env_.observe(sr.next));
      ep.clean_obs.push_back(env_.observe_clean(sr.next));
      if (sr.success) ep.record.success = true;
      if (sr.done) break;
    }
    return ep;
  }

  void process_episode(const CollectedEpisode& ep) {
    const int T = static_cast<int>(ep.record.states.size());
    if (T < 2) return;  // step budget exhausted before the first action

    const Vec goal_emb = env_.goal_embedding();
    const Vec s_trace = goal_similarity_trace(ep.clean_obs, goal_emb);
    const Diagnosis diag = diagnose(ep.record, task_);

    // Reflection + encoding (skipped when shaping is off entirely).
    Vec fb_vec;
    std::string reflect_raw;
    std::optional<Feedback> fb;
    int reflect_attempts = 0;
    if (!flags_.shaping_off) {
      EpisodeSynopsis syn;
      syn.task = task_.id;
      syn.success = ep.record.success;
      syn.code = diag.code;
      syn.secondary = diag.secondary;
      syn.decisive_steps = diag.decisive_steps;
      syn.episode_len = T;
      const uint64_t rseed = reflect_base_.substream(static_cast<uint64_t>(episode_)).seed();
      if (flags_.freeform) {
        reflect_raw = mock_vlm_reflect(syn, ReflectMode::freeform, rseed);
        fb_vec = encode_freeform(reflect_raw, cfg_.feedback_dim);
        reflect_attempts = 1;
      } else {
        ReflectOutcome out = reflect_validated(syn, rseed);
        if (!out.validation.ok())
          throw std::logic_error("reflection oracle produced invalid feedback");
        fb = out.validation.feedback;
        reflect_raw = out.raw;
        reflect_attempts = out.attempts;
        fb_vec = encode_feedback(*fb, cfg_.feedback_dim);
      }
      write_feedback_record(reflect_raw, reflect_attempts);
    }

    // Credit-assignment weights over the T states.
    KeyframeWeights kw;
    if (flags_.uniform_weights) {
      kw.frames = {0, T - 1};
      kw.w = Vec(static_cast<size_t>(T), 1.0);
      kw.w_hat = kw.w;
    } else if (cfg_.keyframes_from_feedback && fb.has_value()) {
      std::vector<int> frames = fb->key_frame_indices;
      frames.push_back(0);
      frames.push_back(T - 1);
      std::sort(frames.begin(), frames.end());
      frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
      kw = step_weights(frames, T, cfg_.keyframe.halfwidth, cfg_.keyframe.floor);
    } else {
      kw = compute_keyframes(ep.clean_obs, goal_emb, cfg_.keyframe);
    }

    // Alignment rows + one projector update per episode.
    Vec u(static_cast<size_t>(T), 1.0);
    if (!flags_.shaping_off) {
      u = weights_u(kw.w_hat, s_trace);
      const int label = ep.record.success ? 1 : 0;
      for (int t = 0; t < T; ++t)
        embed_.push(AlignSampleRow{ep.obs[static_cast<size_t>(t)], fb_vec, label,
                                   u[static_cast<size_t>(t)]});
      auto sample = embed_.sample(static_cast<size_t>(cfg_.align_batch), align_rng_);
      AlignUpdateMetrics m = trainer_->update(sample, step_);
      if (!m.skipped_empty) {
        ordered_json rec;
        rec["type"] = "align";
        rec["step"] = step_;
        rec["L_bce"] = m.l_bce;
        rec["L_nce"] = m.l_nce;
        rec["L_sym"] = m.l_sym ? ordered_json(*m.l_sym) : ordered_json(nullptr);
        rec["gap"] = m.gap ? ordered_json(*m.gap) : ordered_json(nullptr);
        metrics_ << rec.dump() << '\n';
      }
    }

    // Collection-time shaping under the just-updated projectors.
    const Projectors& proj = trainer_->projectors();
    Vec r_task(ep.record.r_task.begin(), ep.record.r_task.end());
    double ep_rho = 0.0, ep_P = 0.0, ep_alpha = 0.0;
    Vec frozen(r_task);
    if (!flags_.shaping_off) {
      std::vector<Vec> z_traj;
      z_traj.reserve(static_cast<size_t>(T));
      for (const Vec& o : ep.obs) z_traj.push_back(proj.embed_image(o));
      const Vec z_y = proj.embed_text(instr_);
      const Vec z_g = proj.embed_image(goal_emb);
      const Vec z_f = proj.embed_feedback(fb_vec);

      Vec deltas(static_cast<size_t>(T - 1));
      {
        Vec phis(static_cast<size_t>(T));
        for (int t = 0; t < T; ++t)
          phis[static_cast<size_t>(t)] =
              goal_potential(z_traj[static_cast<size_t>(t)], z_y, z_g, cfg_.reward.tau_goal);
        for (int t = 0; t + 1 < T; ++t)
          deltas[static_cast<size_t>(t)] =
              goal_delta(phis[static_cast<size_t>(t)], phis[static_cast<size_t>(t) + 1],
                         cfg_.reward.gamma_shape, cfg_.reward.tau_goal);
      }
      ep_P = progress(shaping_.s_bar, deltas, cfg_.reward.progress_power);
      const double rho_sched =
          toggles_.adaptive_rho ? rho_schedule(ep_P, cfg_.reward.rho_min, cfg_.reward.rho_max)
                                : cfg_.reward.rho_max;
      ep_rho = rho_sched * shaping_envelope(step_, cfg_.reward);
      ShapedRewardTrace trace =
          episode_shaping(z_traj, z_y, z_g, z_f, kw.w_hat, r_task, ep_rho, ep.record.success,
                          cfg_.reward, shaping_, toggles_);
      frozen = trace.r;
      ep_alpha = trace.alpha;
    } else {
      shaping_.update_success(ep.record.success, cfg_.reward.success_ema_beta);
    }

    write_trace(ep, frozen, kw.w_hat);

    // Replay push: terminal only on a success exit, never on truncation.
    auto ctx = std::make_shared<EpisodeContext>();
    ctx->fb_vec = fb_vec;
    ctx->instr = instr_;
    ctx->goal_obs = goal_emb;
    ctx->label = ep.record.success ? 1 : 0;
    ctx->episode_id = episode_;
    for (int t = 0; t + 1 < T; ++t) {
      ReplayEntry e;
      e.obs = ep.obs[static_cast<size_t>(t)];
      e.action = ep.record.actions[static_cast<size_t>(t)];
      e.next_obs = ep.obs[static_cast<size_t>(t) + 1];
      e.r_task = ep.record.r_task[static_cast<size_t>(t)];
      e.terminal = ep.record.success && t + 2 == T;
      e.w_hat = kw.w_hat[static_cast<size_t>(t)];
      e.u = u[static_cast<size_t>(t)];
      e.frozen_reward = frozen[static_cast<size_t>(t)];
      e.step_index = t;
      e.ctx = ctx;
      replay_.push(std::move(e));
    }

    SacUpdateStats last_stats{};
    const int n_updates = (T - 1) * cfg_.agent.update_to_data;
    bool updated = false;
    if (step_ >= cfg_.agent.start_steps &&
        replay_.size() >= static_cast<size_t>(cfg_.agent.batch_size)) {
      for (int i = 0; i < n_updates; ++i) {
        last_stats = agent_update();
        updated = true;
      }
    }

    const double ret_task = std::accumulate(r_task.begin(), r_task.end(), 0.0);
    ordered_json rec;
    rec["type"] = "episode";
    rec["episode"] = episode_;
    rec["step"] = step_;
    rec["len"] = T - 1;
    rec["success"] = ep.record.success;
    rec["code"] = std::string(to_string(diag.code));
    rec["return_task"] = ret_task;
    rec["rho"] = ep_rho;
    rec["P"] = ep_P;
    rec["alpha"] = ep_alpha;
    rec["s_bar"] = shaping_.s_bar;
    rec["entropy"] = updated ? ordered_json(last_stats.entropy) : ordered_json(nullptr);
    metrics_ << rec.dump() << '\n';
  }

  SacUpdateStats agent_update() {
    const auto idx = replay_.sample_indices(static_cast<size_t>(cfg_.agent.batch_size), replay_rng_);
    std::vector<SacBatchItem> batch(idx.size());
    Vec rewards(idx.size(), 0.0);

    if (flags_.shaping_off) {
      for (size_t i = 0; i < idx.size(); ++i) rewards[i] = replay_.at(idx[i]).r_task;
    } else if (cfg_.frozen_shaping) {
      for (size_t i = 0; i < idx.size(); ++i) rewards[i] = replay_.at(idx[i]).frozen_reward;
    } else {
      const Projectors& proj = trainer_->projectors();
      cache_.sync(proj.version);
      std::vector<ShapeInput> inputs(idx.size());
      for (size_t i = 0; i < idx.size(); ++i) {
        const ReplayEntry& e = replay_.at(idx[i]);
        auto it = cache_.obs.find(e.serial);
        if (it == cache_.obs.end()) {
          it = cache_.obs
                   .emplace(e.serial,
                            std::make_pair(proj.embed_image(e.obs), proj.embed_image(e.next_obs)))
                   .first;
        }
        auto ct = cache_.ctx.find(e.ctx.get());
        if (ct == cache_.ctx.end()) {
          EmbedCache::CtxEmbeds ce;
          ce.z_f = proj.embed_feedback(e.ctx->fb_vec);
          ce.z_y = proj.embed_text(e.ctx->instr);
          ce.z_g = proj.embed_image(e.ctx->goal_obs);
          ct = cache_.ctx.emplace(e.ctx.get(), std::move(ce)).first;
        }
        inputs[i] = ShapeInput{it->second.first, it->second.second, ct->second.z_f,
                               ct->second.z_y,  ct->second.z_g,    e.w_hat,
                               e.r_task};
      }
      BatchShapeResult bs = batch_shaping(inputs, step_, cfg_.reward, shaping_, toggles_);
      rewards = bs.rewards;
    }

    for (size_t i = 0; i < idx.size(); ++i) {
      const ReplayEntry& e = replay_.at(idx[i]);
      batch[i] = SacBatchItem{&e.obs, e.action, rewards[i], &e.next_obs, e.terminal};
    }
    return agent_->update(batch);
  }

  double evaluate() {
    int successes = 0;
    for (int e = 0; e < cfg_.eval_episodes; ++e) {
      const WorldState& s0 = eval_env_.reset(static_cast<uint64_t>(e));
      Vec obs = eval_env_.observe(s0);
      for (int t = 0; t < task_.episode_cap; ++t) {
        const int a = agent_->act(obs, /*greedy=*/true, eval_rng_);
        StepResult sr = eval_env_.step(static_cast<Action>(a));
        if (sr.done) {
          if (sr.success) ++successes;
          break;
        }
        obs = eval_env_.observe(sr.next);
      }
    }
    return static_cast<double>(successes) / static_cast<double>(cfg_.eval_episodes);
  }

  void write_eval(long long at_step, double rate) {
    ordered_json rec;
    rec["type"] = "eval";
    rec["step"] = at_step;
    rec["success_rate"] = rate;
    metrics_ << rec.dump() << '\n';
  }

  void write_feedback_record(const std::string& raw, int attempts) {
    ordered_json rec;
    rec["episode"] = episode_;
    rec["step"] = step_;
    rec["mode"] = flags_.freeform ? "freeform" : "structured";
    rec["attempts"] = attempts;
    rec["raw"] = raw;
    feedback_log_ << rec.dump() << '\n';
  }

  void write_trace(const CollectedEpisode& ep, const Vec& shaped, const Vec& w_hat) {
    const size_t n = ep.record.actions.size();
    for (size_t t = 0; t < n; ++t) {
      ordered_json rec;
      rec["episode"] = episode_;
      rec["t"] = t;
      rec["action"] = ep.record.actions[t];
      rec["r_task"] = ep.record.r_task[t];
      rec["r_shaped"] = shaped[t];
      rec["w_hat"] = w_hat[t];
      rec["annotations"] = ep.record.annotations[t];
      trace_log_ << rec.dump() << '\n';
    }
  }

  void save_checkpoint(const std::string& name) {
    Checkpoint ck;
    const Projectors& proj = trainer_->projectors();
    ck.put_mlp("projector.image", proj.image);
    ck.put_mlp("projector.text", proj.text);
    ck.put_mlp("projector.feedback", proj.feedback);
    agent_->save_into(ck, "agent");
    ck.save((run_dir_ / name).string());
  }

  void write_runinfo(double final_success, double wall_sec) {
    ordered_json info;
    info["format"] = "fbrl-runinfo";
    info["version"] = 1;
    info["task"] = cfg_.task;
    info["variant"] = std::string(to_string(cfg_.variant));
    info["feedback_mode"] = flags_.freeform ? "freeform" : "structured";
    info["seed"] = seed_;
    info["env_steps"] = step_;
    info["episodes"] = episode_;
    info["final_success"] = final_success;
    info["wall_clock_sec"] = wall_sec;
    info["config"] = ordered_json::parse(cfg_.to_json_text());
    std::ofstream out(run_dir_ / "runinfo.json", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write runinfo.json");
    out << info.dump(2) << '\n';
  }

  ExperimentConfig cfg_;
  VariantFlags flags_;
  ShapingToggles toggles_;
  uint64_t seed_;
  Rng root_;
  TaskSpec task_;
  GripperEnv env_;
  GripperEnv eval_env_;
  Rng action_rng_, eval_rng_, replay_rng_, align_rng_, reflect_base_;
  ReplayBuffer replay_;
  EmbedRing embed_;
  std::unique_ptr<AlignTrainer> trainer_;
  std::unique_ptr<SacAgent> agent_;
  Vec instr_;
  ShapingState shaping_;
  EmbedCache cache_;

  long long step_ = 0;
  long long episode_ = 0;
  fs::path run_dir_;
  std::ofstream metrics_, feedback_log_, trace_log_;
};

}  // namespace

RunResult run_single(const ExperimentConfig& cfg, uint64_t seed) {
  const auto problems = cfg.validate();
  if (!problems.empty()) throw ConfigError(problems);
  Runner runner(cfg, seed);
  return runner.run();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  double sum = 0.0;
  for (uint64_t seed : cfg.seeds) {
    result.runs.push_back(run_single(cfg, seed));
    sum += result.runs.back().final_success;
  }
  if (!result.runs.empty()) sum /= static_cast<double>(result.runs.size());
  result.mean_final_success = sum;
  return result;
}

}  // namespace fbrl
