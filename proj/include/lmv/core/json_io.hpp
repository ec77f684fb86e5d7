#pragma once

#include "json.hpp"
#include "lmv/core/mlp.hpp"

namespace lmv {

using Json = nlohmann::json;

void to_json(Json& j, const MlpSpec& spec);
void from_json(const Json& j, MlpSpec& spec);

/// Reads `key` from `j` if present, otherwise keeps `value`.
template <typename T>
void read_optional(const Json& j, const char* key, T& value) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) value = it->template get<T>();
}

}  // namespace lmv
