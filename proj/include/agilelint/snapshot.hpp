#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "agilelint/graph_store.hpp"

namespace agilelint {

/// Lowercase hex SHA-256 of the canonical snapshot of a store.
struct DataVersion {
  std::string digest;

  friend bool operator==(const DataVersion&, const DataVersion&) = default;
  friend auto operator<=>(const DataVersion&, const DataVersion&) = default;
};

/// Canonical snapshot document:
/// `{"edges":[{"props","source","target","type"}],"nodes":[{"label","props"}]}`.
/// Nodes are ordered by content, so the document does not depend on insertion
/// order; edge endpoints are positions in that node array. Timestamps are
/// written as `{"$timestamp": "...Z"}` to keep their type.
nlohmann::json to_snapshot(const GraphStore& store);

/// Rebuilds a store; node ids equal positions in the document.
GraphStore from_snapshot(const nlohmann::json& document);

DataVersion data_version(const GraphStore& store);

void write_snapshot(const GraphStore& store, const std::filesystem::path& path);
GraphStore read_snapshot(const std::filesystem::path& path);

nlohmann::json property_to_json(const PropertyValue& value);
PropertyValue property_from_json(const nlohmann::json& value);

std::string sha256_hex(std::string_view bytes);

}  // namespace agilelint
