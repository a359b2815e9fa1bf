#include "fbrl/agent/replay.hpp"

#include <numeric>
#include <stdexcept>

namespace fbrl {

ReplayBuffer::ReplayBuffer(size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  entries_.reserve(capacity_);
}

uint64_t ReplayBuffer::push(ReplayEntry e) {
  e.serial = next_serial_++;
  const uint64_t serial = e.serial;
  if (entries_.size() < capacity_) {
    entries_.push_back(std::move(e));
  } else {
    entries_[cursor_] = std::move(e);  // overwrite oldest
    cursor_ = (cursor_ + 1) % capacity_;
  }
  return serial;
}

std::vector<size_t> ReplayBuffer::sample_indices(size_t batch, Rng& rng) const {
  if (entries_.empty()) throw std::logic_error("ReplayBuffer: sampling from empty buffer");
  std::vector<size_t> idx(entries_.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  const size_t k = std::min(batch, idx.size());
  // Partial Fisher-Yates: first k slots become the sample.
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + static_cast<size_t>(rng.uniform_int(static_cast<int>(idx.size() - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace fbrl
