#include "lmv/core/json_io.hpp"

namespace lmv {

void to_json(Json& j, const MlpSpec& spec) {
  j = Json{{"layer_sizes", spec.layer_sizes},
           {"hidden_activation", to_string(spec.hidden)},
           {"output_activation", to_string(spec.output)}};
}

void from_json(const Json& j, MlpSpec& spec) {
  spec.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  spec.hidden = activation_from_string(j.value("hidden_activation", std::string("tanh")));
  spec.output = activation_from_string(j.value("output_activation", std::string("identity")));
  spec.validate();
}

}  // namespace lmv
