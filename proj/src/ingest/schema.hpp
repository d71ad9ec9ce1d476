#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "agilelint/error.hpp"
#include "agilelint/time.hpp"

namespace agilelint::ingest::detail {

using nlohmann::json;

inline std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
inline std::string at(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

inline const json& require_object(const json& value, const std::string& path) {
  if (!value.is_object()) throw SchemaViolation(path, "expected an object");
  return value;
}

inline const json& require_array(const json& object, const std::string& key, const std::string& path) {
  auto it = object.find(key);
  if (it == object.end()) throw SchemaViolation(at(path, key), "missing required array");
  if (!it->is_array()) throw SchemaViolation(at(path, key), "expected an array");
  return *it;
}

inline const json* optional_field(const json& object, const std::string& key) {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return nullptr;
  return &*it;
}

inline std::string require_string(const json& object, const std::string& key, const std::string& path) {
  auto it = object.find(key);
  if (it == object.end()) throw SchemaViolation(at(path, key), "missing required string");
  if (!it->is_string()) throw SchemaViolation(at(path, key), "expected a string");
  return it->get<std::string>();
}

inline std::optional<std::string> optional_string(const json& object, const std::string& key,
                                                  const std::string& path) {
  const json* v = optional_field(object, key);
  if (!v) return std::nullopt;
  if (!v->is_string()) throw SchemaViolation(at(path, key), "expected a string or null");
  return v->get<std::string>();
}

inline std::int64_t require_int(const json& object, const std::string& key, const std::string& path) {
  auto it = object.find(key);
  if (it == object.end()) throw SchemaViolation(at(path, key), "missing required integer");
  if (!it->is_number_integer()) throw SchemaViolation(at(path, key), "expected an integer");
  return it->get<std::int64_t>();
}

inline std::int64_t require_non_negative(const json& object, const std::string& key,
                                         const std::string& path) {
  std::int64_t v = require_int(object, key, path);
  if (v < 0) throw SchemaViolation(at(path, key), "must be >= 0, got " + std::to_string(v));
  return v;
}

inline std::optional<double> optional_number(const json& object, const std::string& key,
                                             const std::string& path) {
  const json* v = optional_field(object, key);
  if (!v) return std::nullopt;
  if (!v->is_number()) throw SchemaViolation(at(path, key), "expected a number or null");
  return v->get<double>();
}

inline Timestamp parse_timestamp(const json& value, const std::string& path) {
  if (!value.is_string()) throw SchemaViolation(path, "expected an ISO-8601 timestamp");
  auto ts = parse_iso8601(value.get<std::string>());
  if (!ts) throw SchemaViolation(path, "malformed timestamp '" + value.get<std::string>() + "'");
  return *ts;
}

inline Timestamp require_timestamp(const json& object, const std::string& key, const std::string& path) {
  auto it = object.find(key);
  if (it == object.end()) throw SchemaViolation(at(path, key), "missing required timestamp");
  return parse_timestamp(*it, at(path, key));
}

inline std::optional<Timestamp> optional_timestamp(const json& object, const std::string& key,
                                                   const std::string& path) {
  const json* v = optional_field(object, key);
  if (!v) return std::nullopt;
  return parse_timestamp(*v, at(path, key));
}

}  // namespace agilelint::ingest::detail
