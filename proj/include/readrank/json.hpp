#pragma once

#include <json.hpp>

namespace readrank {

// Insertion-ordered so emitted files keep their documented field order.
using Json = nlohmann::ordered_json;

}  // namespace readrank
