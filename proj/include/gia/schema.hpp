#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace gia {

// Structural validator for the JSON Schema subset our documents use:
// type (string or list), properties, required, items, enum,
// additionalProperties:false. Returns human-readable violations; empty means
// the document conforms.
std::vector<std::string> schema_violations(const nlohmann::json& document, const nlohmann::json& schema);

}  // namespace gia
