#pragma once

#include <map>
#include <string>
#include <vector>

#include "fbrl/core/mlp.hpp"
#include "fbrl/core/vec.hpp"

namespace fbrl {

// Named-tensor checkpoint. On-disk layout (JSON):
//   { "format": "fbrl-checkpoint", "version": 1,
//     "tensors": { "<name>": { "shape": [..], "data": [..] }, ... } }
// Tensors are stored row-major as flat double arrays.
struct Checkpoint {
  static constexpr const char* kFormat = "fbrl-checkpoint";
  static constexpr int kVersion = 1;

  std::map<std::string, std::pair<std::vector<int>, Vec>> tensors;

  void put(const std::string& name, std::vector<int> shape, Vec data);
  const std::pair<std::vector<int>, Vec>& get(const std::string& name) const;
  bool has(const std::string& name) const { return tensors.count(name) > 0; }

  /// Store every tensor of `net` under "<prefix>.w<l>" / "<prefix>.b<l>".
  void put_mlp(const std::string& prefix, const Mlp& net);
  /// Load tensors saved by put_mlp back into `net` (shapes must match).
  void load_mlp(const std::string& prefix, Mlp& net) const;

  std::string to_json() const;
  static Checkpoint from_json(const std::string& text);

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace fbrl
