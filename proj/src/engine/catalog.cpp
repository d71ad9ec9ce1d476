#include "agilelint/engine/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "agilelint/engine/detectors.hpp"
#include "agilelint/mql/parser.hpp"
#include "agilelint/scoring/rating.hpp"

namespace agilelint::engine {

namespace {

using nlohmann::json;

bool is_slug(const std::string& id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::islower(c) || std::isdigit(c) || c == '-' || c == '_';
  });
}

template <typename Map>
void read_map(const json& value, const std::string& id, const std::string& field, Map& out,
              std::vector<CatalogIssue>& issues) {
  if (!value.is_object()) {
    issues.push_back({id, field, "expected an object"});
    return;
  }
  out.clear();
  for (const auto& [key, v] : value.items()) {
    using Mapped = typename Map::mapped_type;
    if constexpr (std::is_same_v<Mapped, double>) {
      if (!v.is_number()) {
        issues.push_back({id, field + "." + key, "expected a number"});
        continue;
      }
      out[key] = v.template get<double>();
    } else {
      if (!v.is_string()) {
        issues.push_back({id, field + "." + key, "expected a string"});
        continue;
      }
      out[key] = v.template get<std::string>();
    }
  }
}

void read_field(const std::string& key, const json& v, MetricDef& def, std::vector<CatalogIssue>& issues) {
  auto text = [&](std::string& out) {
    if (v.is_string()) {
      out = v.get<std::string>();
    } else {
      issues.push_back({def.id, key, "expected a string"});
    }
  };
  if (key == "name") {
    text(def.name);
  } else if (key == "category") {
    text(def.category);
  } else if (key == "data_source") {
    text(def.data_source);
  } else if (key == "description") {
    text(def.description);
  } else if (key == "query") {
    text(def.query);
  } else if (key == "rating") {
    text(def.rating);
  } else if (key == "severity") {
    auto s = v.is_string() ? scoring::parse_severity(v.get<std::string>()) : std::nullopt;
    if (s) {
      def.severity = *s;
    } else {
      issues.push_back({def.id, key, "expected \"Low\", \"Medium\" or \"High\""});
    }
  } else if (key == "kind") {
    if (v == "query") {
      def.kind = MetricKind::Query;
    } else if (v == "native") {
      def.kind = MetricKind::Native;
    } else {
      issues.push_back({def.id, key, "expected \"query\" or \"native\""});
    }
  } else if (key == "context_queries") {
    read_map(v, def.id, key, def.context_queries, issues);
  } else if (key == "params") {
    read_map(v, def.id, key, def.params, issues);
  } else if (key == "aliases") {
    read_map(v, def.id, key, def.aliases, issues);
  } else {
    issues.push_back({def.id, key, "unknown field"});
  }
}

std::ptrdiff_t offset_of(const Error& e) {
  if (const auto* s = dynamic_cast<const SyntaxError*>(&e)) return std::ptrdiff_t(s->offset());
  return -1;
}

/// Parses a query and checks its placeholders; returns the column names.
std::optional<std::vector<std::string>> check_query(const MetricDef& def, const std::string& field,
                                                    const std::string& text, std::vector<CatalogIssue>& issues) {
  try {
    mql::Query q = mql::parse(text);
    const auto& reserved = reserved_placeholders();
    for (const auto& name : mql::placeholders(q)) {
      bool known = std::find(reserved.begin(), reserved.end(), name) != reserved.end() || def.params.contains(name);
      if (!known) issues.push_back({def.id, field, "placeholder {" + name + "} is neither reserved nor a param"});
    }
    return mql::return_columns(q);
  } catch (const Error& e) {
    issues.push_back({def.id, field, std::string(to_string(e.code())) + ": " + e.what(), offset_of(e)});
    return std::nullopt;
  }
}

}  // namespace

const MetricDef* Catalog::find(std::string_view id) const {
  for (const auto& m : metrics) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

std::vector<std::string> Catalog::categories() const {
  std::vector<std::string> out;
  for (const auto& m : metrics) {
    if (std::find(out.begin(), out.end(), m.category) == out.end()) out.push_back(m.category);
  }
  return out;
}

const std::vector<std::string>& reserved_placeholders() {
  static const std::vector<std::string> names = {"team", "sprint", "sprint_list", "sprint_start", "sprint_end"};
  return names;
}

std::vector<CatalogIssue> validate_metric(const MetricDef& def) {
  std::vector<CatalogIssue> issues;
  if (!is_slug(def.id)) issues.push_back({def.id, "id", "must be a non-empty lowercase slug"});
  if (def.name.empty()) issues.push_back({def.id, "name", "must not be empty"});
  if (def.category.empty()) issues.push_back({def.id, "category", "must not be empty"});
  for (const auto& [name, value] : def.params) {
    const auto& reserved = reserved_placeholders();
    if (std::find(reserved.begin(), reserved.end(), name) != reserved.end()) {
      issues.push_back({def.id, "params." + name, "shadows a reserved placeholder"});
    }
    if (!std::isfinite(value)) issues.push_back({def.id, "params." + name, "must be finite"});
  }

  std::vector<std::string> columns;
  if (def.kind == MetricKind::Query) {
    if (auto c = check_query(def, "query", def.query, issues)) columns = *c;
  } else if (const Detector* d = find_detector(def.query)) {
    columns = d->columns;
    for (const auto& p : d->required_params) {
      if (!def.params.contains(p)) issues.push_back({def.id, "params", "detector needs param '" + p + "'"});
    }
  } else {
    issues.push_back({def.id, "query", "DetectorUnknown: no native detector named '" + def.query + "'"});
  }

  for (const auto& [name, text] : def.context_queries) {
    auto c = check_query(def, "context_queries." + name, text, issues);
    if (c && c->size() != 1) {
      issues.push_back({def.id, "context_queries." + name, "must return exactly one column"});
    }
  }

  std::set<std::string> resolvable = {"violations"};
  for (const auto& [name, v] : def.params) resolvable.insert(name);
  for (const auto& [name, q] : def.context_queries) resolvable.insert(name);
  for (const auto& column : columns) {
    for (const char* prefix : {"avg_", "sum_", "max_", "min_"}) resolvable.insert(prefix + column);
  }
  for (const auto& [alias, target] : def.aliases) {
    if (!resolvable.contains(target)) {
      issues.push_back({def.id, "aliases." + alias, "target '" + target + "' is not a resolvable binding"});
    }
  }
  for (const auto& [alias, target] : def.aliases) resolvable.insert(alias);

  try {
    auto rating = scoring::parse_rating(def.rating);
    for (const auto& name : scoring::binding_names(rating)) {
      if (!resolvable.contains(name)) issues.push_back({def.id, "rating", "unresolvable binding '" + name + "'"});
    }
  } catch (const Error& e) {
    issues.push_back({def.id, "rating", std::string(to_string(e.code())) + ": " + e.what(), offset_of(e)});
  }
  return issues;
}

MetricDef metric_from_json(const json& object, std::vector<CatalogIssue>& issues) {
  MetricDef def;
  if (!object.is_object()) {
    issues.push_back({"", "", "metric must be an object"});
    return def;
  }
  if (auto it = object.find("id"); it != object.end() && it->is_string()) {
    def.id = it->get<std::string>();
  } else {
    issues.push_back({"", "id", "missing or not a string"});
  }
  for (const char* required : {"name", "category", "severity", "kind", "query", "rating"}) {
    if (!object.contains(required)) issues.push_back({def.id, required, "missing required field"});
  }
  for (const auto& [key, value] : object.items()) {
    if (key == "id") continue;
    if (key == "revision") {
      if (value.is_number_integer() && value.get<std::int64_t>() >= 1) {
        def.revision = value.get<std::int64_t>();
      } else {
        issues.push_back({def.id, key, "expected a positive integer"});
      }
      continue;
    }
    read_field(key, value, def, issues);
  }
  return def;
}

MetricDef apply_fields(const MetricDef& def, const json& fields, std::vector<CatalogIssue>& issues) {
  MetricDef out = def;
  if (!fields.is_object()) {
    issues.push_back({def.id, "", "expected an object"});
    return out;
  }
  for (const auto& [key, value] : fields.items()) {
    if (key == "id" || key == "revision") continue;
    read_field(key, value, out, issues);
  }
  return out;
}

Catalog load_catalog(const json& document) {
  std::vector<CatalogIssue> issues;
  Catalog catalog;
  if (!document.is_object() || !document.contains("metrics") || !document["metrics"].is_array()) {
    throw CatalogInvalid({{"", "metrics", "catalog must be an object with a \"metrics\" array"}});
  }
  if (auto it = document.find("severity_weights"); it != document.end()) {
    std::map<std::string, double, std::less<>> weights;
    read_map(*it, "", "severity_weights", weights, issues);
    for (const auto& [level, w] : weights) {
      auto s = scoring::parse_severity(level);
      if (!s) {
        issues.push_back({"", "severity_weights." + level, "unknown severity"});
      } else if (!(w > 0) || !std::isfinite(w)) {
        issues.push_back({"", "severity_weights." + level, "weight must be positive"});
      } else if (*s == Severity::Low) {
        catalog.weights.low = w;
      } else if (*s == Severity::Medium) {
        catalog.weights.medium = w;
      } else {
        catalog.weights.high = w;
      }
    }
  }
  std::set<std::string> ids;
  for (const auto& item : document["metrics"]) {
    std::size_t before = issues.size();
    MetricDef def = metric_from_json(item, issues);
    if (issues.size() == before) {
      auto more = validate_metric(def);
      issues.insert(issues.end(), more.begin(), more.end());
    }
    if (!def.id.empty() && !ids.insert(def.id).second) issues.push_back({def.id, "id", "duplicate metric id"});
    catalog.metrics.push_back(std::move(def));
  }
  if (!issues.empty()) throw CatalogInvalid(std::move(issues));
  return catalog;
}

Catalog builtin_catalog() {
  static const Catalog catalog = load_catalog(json::parse(builtin_catalog_text()));
  return catalog;
}

json to_json(const MetricDef& def) {
  return {{"id", def.id},
          {"name", def.name},
          {"category", def.category},
          {"severity", scoring::to_string(def.severity)},
          {"data_source", def.data_source},
          {"description", def.description},
          {"kind", def.kind == MetricKind::Query ? "query" : "native"},
          {"query", def.query},
          {"context_queries", def.context_queries},
          {"params", def.params},
          {"rating", def.rating},
          {"aliases", def.aliases},
          {"revision", def.revision}};
}

json to_json(const Catalog& catalog) {
  json metrics = json::array();
  for (const auto& m : catalog.metrics) metrics.push_back(to_json(m));
  return {{"metrics", std::move(metrics)},
          {"severity_weights",
           {{"Low", catalog.weights.low}, {"Medium", catalog.weights.medium}, {"High", catalog.weights.high}}}};
}

}  // namespace agilelint::engine
