#include "fbrl/core/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fbrl {

using nlohmann::json;

void Checkpoint::put(const std::string& name, std::vector<int> shape, Vec data) {
  size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("Checkpoint::put: non-positive dim in shape");
    n *= static_cast<size_t>(d);
  }
  if (n != data.size())
    throw std::invalid_argument("Checkpoint::put: shape/data size mismatch for " + name);
  tensors[name] = {std::move(shape), std::move(data)};
}

const std::pair<std::vector<int>, Vec>& Checkpoint::get(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end())
    throw std::out_of_range("Checkpoint: missing tensor " + name);
  return it->second;
}

void Checkpoint::put_mlp(const std::string& prefix, const Mlp& net) {
  for (int l = 0; l < net.num_layers(); ++l) {
    const Matrix& w = net.weight(l);
    put(prefix + ".w" + std::to_string(l), {w.rows, w.cols}, w.data);
    const Vec& b = net.bias(l);
    put(prefix + ".b" + std::to_string(l), {static_cast<int>(b.size())}, b);
  }
}

void Checkpoint::load_mlp(const std::string& prefix, Mlp& net) const {
  for (int l = 0; l < net.num_layers(); ++l) {
    Matrix& w = net.weight(l);
    const auto& [wshape, wdata] = get(prefix + ".w" + std::to_string(l));
    if (wshape != std::vector<int>{w.rows, w.cols})
      throw std::runtime_error("Checkpoint::load_mlp: shape mismatch for " + prefix +
                               ".w" + std::to_string(l));
    w.data = wdata;
    Vec& b = net.bias(l);
    const auto& [bshape, bdata] = get(prefix + ".b" + std::to_string(l));
    if (bshape != std::vector<int>{static_cast<int>(b.size())})
      throw std::runtime_error("Checkpoint::load_mlp: shape mismatch for " + prefix +
                               ".b" + std::to_string(l));
    b = bdata;
  }
}

std::string Checkpoint::to_json() const {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  json jt = json::object();
  for (const auto& [name, sv] : tensors) {
    jt[name] = {{"shape", sv.first}, {"data", sv.second}};
  }
  j["tensors"] = jt;
  return j.dump();
}

Checkpoint Checkpoint::from_json(const std::string& text) {
  json j = json::parse(text);
  if (!j.contains("format") || j["format"].get<std::string>() != kFormat)
    throw std::runtime_error("Checkpoint: unrecognized format field");
  if (!j.contains("version") || j["version"].get<int>() != kVersion)
    throw std::runtime_error("Checkpoint: unsupported version");
  Checkpoint ck;
  for (const auto& [name, jt] : j.at("tensors").items()) {
    ck.put(name, jt.at("shape").get<std::vector<int>>(), jt.at("data").get<Vec>());
  }
  return ck;
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("Checkpoint::save: cannot open " + path);
  out << to_json();
  if (!out) throw std::runtime_error("Checkpoint::save: write failed for " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("Checkpoint::load: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace fbrl
