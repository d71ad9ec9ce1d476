#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "agilelint/engine/cache.hpp"
#include "agilelint/engine/evaluate.hpp"

namespace agilelint::engine {

struct AuditEntry {
  MetricDef previous;  // definition replaced by the update
  std::int64_t new_revision = 0;
  Timestamp replaced_at;
};

struct EngineOptions {
  std::int64_t cache_ttl_seconds = 900;
  std::function<Timestamp()> clock = now_utc;
};

/// Owns one immutable store, the current catalog and the result cache.
///
/// The catalog is held as an immutable snapshot replaced on every update, so
/// an evaluation runs entirely against the catalog it captured at its start.
/// Updates are serialized.
class Engine {
 public:
  Engine(GraphStore store, const ingest::ProjectConfig& config, Catalog catalog, EngineOptions options = {});

  const GraphStore& store() const { return store_; }
  const DataVersion& data_version() const { return data_version_; }
  const std::vector<ingest::TeamDescriptor>& teams() const { return teams_; }
  const std::vector<ingest::SprintDescriptor>& sprints() const { return sprints_; }

  std::shared_ptr<const Catalog> catalog() const;
  void set_severity_weights(const scoring::SeverityWeights& weights);

  /// All metrics, teams and sprints; `bypass_cache` forces fresh results.
  ScoreMatrix evaluate_all(bool bypass_cache = false);
  MetricResult evaluate(std::string_view metric_id, std::string_view team, std::string_view sprint,
                        bool bypass_cache = false);

  /// Applies `fields` (any catalog metric fields) to a metric. When
  /// `base_revision` is given it must equal the current revision, else
  /// Error(StaleRevision). Throws Error(UnknownMetric) or CatalogInvalid.
  /// Returns the new definition.
  MetricDef update_metric(std::string_view metric_id, const nlohmann::json& fields,
                          std::optional<std::int64_t> base_revision = std::nullopt);

  std::vector<AuditEntry> audit_log() const;
  ResultCache& cache() { return cache_; }

 private:
  EvaluationContext context() const;

  GraphStore store_;
  DataVersion data_version_;
  std::vector<ingest::TeamDescriptor> teams_;
  std::vector<ingest::SprintDescriptor> sprints_;
  std::function<Timestamp()> clock_;

  mutable std::mutex catalog_mutex_;
  std::shared_ptr<const Catalog> catalog_;
  mutable std::mutex write_mutex_;
  std::vector<AuditEntry> audit_;
  ResultCache cache_;
};

}  // namespace agilelint::engine
