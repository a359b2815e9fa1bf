#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fbrl/core/rng.hpp"
#include "fbrl/core/vec.hpp"

namespace fbrl {

// Per-episode context shared by the episode's transitions: raw feedback
// vector, instruction features and the layout's clean goal observation.
struct EpisodeContext {
  Vec fb_vec;
  Vec instr;
  Vec goal_obs;
  int label = 0;  // episode success -> per-step alignment label
  long long episode_id = 0;
};

struct ReplayEntry {
  Vec obs;
  int action = 0;
  Vec next_obs;
  double r_task = -1.0;
  bool terminal = false;       // true only on success (not on cap truncation)
  double w_hat = 1.0;          // keyframe weight of the source step
  double u = 1.0;              // alignment weight at collection time
  double frozen_reward = 0.0;  // shaped reward computed at collection
  int step_index = 0;
  std::shared_ptr<const EpisodeContext> ctx;
  uint64_t serial = 0;  // assigned by the buffer; keys embedding caches
};

// FIFO ring buffer with uniform without-replacement batch sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity);

  /// Returns the entry's serial number.
  uint64_t push(ReplayEntry e);

  size_t size() const { return entries_.size(); }
  size_t capacity() const { return capacity_; }
  uint64_t pushed_total() const { return next_serial_; }

  const ReplayEntry& at(size_t idx) const { return entries_[idx]; }

  /// `batch` distinct storage indices drawn uniformly; the whole buffer when
  /// batch >= size.
  std::vector<size_t> sample_indices(size_t batch, Rng& rng) const;

 private:
  size_t capacity_;
  size_t cursor_ = 0;
  uint64_t next_serial_ = 0;
  std::vector<ReplayEntry> entries_;
};

}  // namespace fbrl
