#pragma once

// Strict JSON <-> struct helpers shared by the checkpoint and run-config readers.

#include <set>
#include <string>

#include "holo/ctensor.hpp"
#include "holo/model.hpp"
#include <nlohmann/json.hpp>

namespace holo::cfgjson {

using nlohmann::json;

/// Throws ConfigError naming the first key of `obj` not in `allowed`.
inline void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": key '" + key + "' has the wrong type");
  }
}

json model_to_json(const ModelConfig& cfg);
/// Starts from `base` and overrides whatever keys are present.
ModelConfig model_from_json(const json& obj, ModelConfig base = {});

}  // namespace holo::cfgjson
