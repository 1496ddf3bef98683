#pragma once

#include <array>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "nvrpg/nvrpg.hpp"

namespace nvrpg {

inline constexpr const char* kCheckpointFormat = "nvrpg-checkpoint-v1";

/// Writes the resume state as versioned JSON. RNG words are emitted as
/// decimal strings so 64-bit values survive JSON number parsing unharmed.
inline void save_checkpoint(const RunState& state, const std::string& path) {
  nlohmann::json doc;
  doc["format"] = kCheckpointFormat;
  doc["next_t"] = state.next_t;
  doc["theta"] = state.theta;
  doc["theta_prev"] = state.theta_prev;
  doc["lambda"] = state.lambda;
  doc["d"] = state.d;
  doc["r_prev"] = state.r_prev;
  doc["r_prev2"] = state.r_prev2;
  doc["steps"] = state.steps;
  nlohmann::json rng = nlohmann::json::array();
  for (auto word : state.rng_state) rng.push_back(std::to_string(word));
  doc["rng_state"] = rng;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot write " + path);
  out << doc.dump(1) << "\n";
}

inline RunState load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  if (doc.value("format", "") != kCheckpointFormat)
    throw std::runtime_error("load_checkpoint: unsupported format tag");
  RunState state;
  state.next_t = doc.at("next_t").get<int>();
  state.theta = doc.at("theta").get<std::vector<double>>();
  state.theta_prev = doc.at("theta_prev").get<std::vector<double>>();
  state.lambda = doc.at("lambda").get<std::vector<double>>();
  state.d = doc.at("d").get<std::vector<double>>();
  state.r_prev = doc.at("r_prev").get<std::vector<double>>();
  state.r_prev2 = doc.at("r_prev2").get<std::vector<double>>();
  state.steps = doc.at("steps").get<long long>();
  const auto& rng = doc.at("rng_state");
  if (rng.size() != state.rng_state.size())
    throw std::runtime_error("load_checkpoint: bad rng state");
  for (std::size_t i = 0; i < state.rng_state.size(); ++i)
    state.rng_state[i] = std::stoull(rng[i].get<std::string>());
  return state;
}

}  // namespace nvrpg
