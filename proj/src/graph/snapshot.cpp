#include "agilelint/snapshot.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "agilelint/error.hpp"

namespace agilelint {

using nlohmann::json;

namespace {

constexpr const char* kTimestampKey = "$timestamp";

json props_to_json(const Properties& props) {
  json out = json::object();
  for (const auto& [key, value] : props) out[key] = property_to_json(value);
  return out;
}

Properties props_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaViolation(path, "expected an object");
  Properties props;
  for (const auto& [key, value] : j.items()) {
    try {
      props.emplace(key, property_from_json(value));
    } catch (const std::invalid_argument& e) {
      throw SchemaViolation(path + "." + key, e.what());
    }
  }
  return props;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * SHA256_DIGEST_LENGTH);
  for (unsigned char b : digest) {
    hex.push_back(kHex[b >> 4]);
    hex.push_back(kHex[b & 0xf]);
  }
  return hex;
}

json property_to_json(const PropertyValue& value) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Timestamp>) {
          return json{{kTimestampKey, format_iso8601(v)}};
        } else {
          return json(v);
        }
      },
      value);
}

PropertyValue property_from_json(const json& value) {
  switch (value.type()) {
    case json::value_t::string:
      return value.get<std::string>();
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      return value.get<std::int64_t>();
    case json::value_t::number_float:
      return value.get<double>();
    case json::value_t::boolean:
      return value.get<bool>();
    case json::value_t::array: {
      TextList list;
      for (const auto& item : value) {
        if (!item.is_string()) throw std::invalid_argument("lists may only contain strings");
        list.push_back(item.get<std::string>());
      }
      return list;
    }
    case json::value_t::object: {
      auto it = value.find(kTimestampKey);
      if (value.size() == 1 && it != value.end() && it->is_string()) {
        if (auto ts = parse_iso8601(it->get_ref<const std::string&>())) return *ts;
      }
      throw std::invalid_argument("unsupported object value");
    }
    default:
      throw std::invalid_argument("unsupported property value");
  }
}

json to_snapshot(const GraphStore& store) {
  const auto nodes = store.nodes();
  const auto edges = store.edges();

  // Content key per node, then a tie-break built from its incident edges so that
  // nodes with equal content still land in a well-defined order.
  std::vector<std::string> content(nodes.size());
  std::vector<std::string> content_digest(nodes.size());
  for (const auto& n : nodes) {
    content[n.id] = std::string(to_string(n.label)) + '\x1f' + props_to_json(n.props).dump();
    content_digest[n.id] = sha256_hex(content[n.id]);
  }
  std::vector<std::string> edge_props(edges.size());
  std::vector<std::vector<std::string>> signature_parts(nodes.size());
  for (const auto& e : edges) {
    edge_props[e.id] = props_to_json(e.props).dump();
    std::string type(to_string(e.type));
    signature_parts[e.source].push_back("o" + type + content_digest[e.target] + edge_props[e.id]);
    signature_parts[e.target].push_back("i" + type + content_digest[e.source] + edge_props[e.id]);
  }
  std::vector<std::string> signature(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::sort(signature_parts[i].begin(), signature_parts[i].end());
    for (const auto& part : signature_parts[i]) signature[i] += part + '\x1e';
  }

  std::vector<NodeId> order(nodes.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (content[a] != content[b]) return content[a] < content[b];
    return signature[a] < signature[b];
  });
  std::vector<std::size_t> position(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

  json node_array = json::array();
  for (NodeId id : order) {
    node_array.push_back({{"label", to_string(nodes[id].label)}, {"props", props_to_json(nodes[id].props)}});
  }

  struct EdgeKey {
    std::string_view type;
    std::size_t source;
    std::size_t target;
    const std::string* props;
    EdgeId id;
  };
  std::vector<EdgeKey> keys;
  keys.reserve(edges.size());
  for (const auto& e : edges) {
    keys.push_back({to_string(e.type), position[e.source], position[e.target], &edge_props[e.id], e.id});
  }
  std::sort(keys.begin(), keys.end(), [](const EdgeKey& a, const EdgeKey& b) {
    return std::tie(a.type, a.source, a.target, *a.props) <
           std::tie(b.type, b.source, b.target, *b.props);
  });
  json edge_array = json::array();
  for (const auto& k : keys) {
    edge_array.push_back({{"type", k.type},
                          {"source", k.source},
                          {"target", k.target},
                          {"props", props_to_json(edges[k.id].props)}});
  }
  return json{{"nodes", std::move(node_array)}, {"edges", std::move(edge_array)}};
}

GraphStore from_snapshot(const json& document) {
  if (!document.is_object()) throw SchemaViolation("$", "expected an object");
  GraphStore store;
  const auto nodes = document.value("nodes", json::array());
  const auto edges = document.value("edges", json::array());
  if (!nodes.is_array()) throw SchemaViolation("$.nodes", "expected an array");
  if (!edges.is_array()) throw SchemaViolation("$.edges", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string path = "$.nodes[" + std::to_string(i) + "]";
    const auto& n = nodes[i];
    if (!n.is_object() || !n.contains("label") || !n["label"].is_string()) {
      throw SchemaViolation(path + ".label", "expected a string");
    }
    auto label = parse_node_label(n["label"].get<std::string>());
    if (!label) throw SchemaViolation(path + ".label", "unknown node label");
    store.add_node(*label, props_from_json(n.value("props", json::object()), path + ".props"));
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::string path = "$.edges[" + std::to_string(i) + "]";
    const auto& e = edges[i];
    if (!e.is_object() || !e.contains("type") || !e["type"].is_string()) {
      throw SchemaViolation(path + ".type", "expected a string");
    }
    auto type = parse_rel_type(e["type"].get<std::string>());
    if (!type) throw SchemaViolation(path + ".type", "unknown relationship type");
    for (const char* end : {"source", "target"}) {
      if (!e.contains(end) || !e[end].is_number_unsigned() || e[end].get<std::size_t>() >= nodes.size()) {
        throw SchemaViolation(path + "." + end, "expected an index into nodes");
      }
    }
    store.add_edge(e["source"].get<NodeId>(), *type, e["target"].get<NodeId>(),
                   props_from_json(e.value("props", json::object()), path + ".props"));
  }
  return store;
}

DataVersion data_version(const GraphStore& store) {
  return DataVersion{sha256_hex(to_snapshot(store).dump())};
}

void write_snapshot(const GraphStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_snapshot(store).dump() << '\n';
}

GraphStore read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaViolation("$", e.what());
  }
  return from_snapshot(document);
}

}  // namespace agilelint
