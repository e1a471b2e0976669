#include "gia/schema.hpp"

namespace gia {

namespace {

bool type_matches(const nlohmann::json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "integer") return value.is_number_integer();
    if (type == "number") return value.is_number();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

void check(const nlohmann::json& value, const nlohmann::json& schema, const std::string& path,
           std::vector<std::string>& out) {
    if (schema.contains("type")) {
        const auto& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(value, t.get<std::string>());
        } else {
            for (const auto& alt : t) ok = ok || type_matches(value, alt.get<std::string>());
        }
        if (!ok) {
            out.push_back(path + ": type mismatch, expected " + t.dump());
            return;
        }
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& alt : schema["enum"]) ok = ok || alt == value;
        if (!ok) out.push_back(path + ": value " + value.dump() + " not in enum");
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema["required"]) {
                if (!value.contains(key.get<std::string>())) {
                    out.push_back(path + ": missing required key '" + key.get<std::string>() + "'");
                }
            }
        }
        const bool sealed = schema.contains("additionalProperties") && schema["additionalProperties"] == false;
        for (const auto& [key, member] : value.items()) {
            if (schema.contains("properties") && schema["properties"].contains(key)) {
                check(member, schema["properties"][key], path + "/" + key, out);
            } else if (sealed) {
                out.push_back(path + ": unexpected key '" + key + "'");
            }
        }
    }
    if (value.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            check(value[i], schema["items"], path + "/" + std::to_string(i), out);
        }
    }
}

}  // namespace

std::vector<std::string> schema_violations(const nlohmann::json& document, const nlohmann::json& schema) {
    std::vector<std::string> out;
    check(document, schema, "$", out);
    return out;
}

}  // namespace gia
