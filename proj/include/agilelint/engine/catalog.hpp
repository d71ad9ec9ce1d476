#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "agilelint/error.hpp"
#include "agilelint/scoring/score.hpp"

namespace agilelint::engine {

using scoring::Severity;

enum class MetricKind { Query, Native };

/// One conformance metric: an extraction query (or a named native detector)
/// plus a rating expression over its result.
struct MetricDef {
  std::string id;
  std::string name;
  std::string category;
  Severity severity = Severity::Medium;
  std::string data_source;
  std::string description;
  MetricKind kind = MetricKind::Query;
  std::string query;  // MQL text, or the detector name for native metrics
  std::map<std::string, std::string, std::less<>> context_queries;
  std::map<std::string, double, std::less<>> params;
  std::string rating;
  std::map<std::string, std::string, std::less<>> aliases;
  std::int64_t revision = 1;

  friend bool operator==(const MetricDef&, const MetricDef&) = default;
};

struct Catalog {
  std::vector<MetricDef> metrics;
  scoring::SeverityWeights weights;

  const MetricDef* find(std::string_view id) const;
  /// Distinct categories in order of first appearance.
  std::vector<std::string> categories() const;
};

/// Placeholders every metric query may use besides its own params.
const std::vector<std::string>& reserved_placeholders();

/// Every problem with one definition; empty when valid. Checks the id slug,
/// severity, that query/context/rating texts parse, that placeholders are
/// reserved names or params, that context queries return one column, that
/// native detectors exist and that every rating binding resolves.
std::vector<CatalogIssue> validate_metric(const MetricDef& def);

/// Parses `{"metrics":[...], "severity_weights":{...}?}` and validates every
/// metric. Throws CatalogInvalid listing all problems; nothing is returned
/// for a partially valid document.
Catalog load_catalog(const nlohmann::json& document);

/// The ten bundled metrics.
Catalog builtin_catalog();
const std::string& builtin_catalog_text();

nlohmann::json to_json(const MetricDef& def);
nlohmann::json to_json(const Catalog& catalog);

/// Reads one metric object, appending schema problems to `issues`.
MetricDef metric_from_json(const nlohmann::json& object, std::vector<CatalogIssue>& issues);

/// Applies the fields present in `fields` onto a copy of `def`. Unknown or
/// mistyped fields are reported in `issues`; `id` and `revision` are ignored.
MetricDef apply_fields(const MetricDef& def, const nlohmann::json& fields, std::vector<CatalogIssue>& issues);

}  // namespace agilelint::engine
