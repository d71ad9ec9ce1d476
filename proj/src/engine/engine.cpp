#include "agilelint/engine/engine.hpp"

#include <algorithm>

#include "agilelint/error.hpp"

namespace agilelint::engine {

Engine::Engine(GraphStore store, const ingest::ProjectConfig& config, Catalog catalog, EngineOptions options)
    : store_(std::move(store)),
      data_version_(agilelint::data_version(store_)),
      teams_(ingest::extract_teams(store_, config)),
      sprints_(ingest::extract_sprints(store_, config)),
      clock_(options.clock),
      catalog_(std::make_shared<const Catalog>(std::move(catalog))),
      cache_(options.cache_ttl_seconds, options.clock) {}

std::shared_ptr<const Catalog> Engine::catalog() const {
  std::lock_guard lock(catalog_mutex_);
  return catalog_;
}

void Engine::set_severity_weights(const scoring::SeverityWeights& weights) {
  std::lock_guard writer(write_mutex_);
  auto next = std::make_shared<Catalog>(*catalog());
  next->weights = weights;
  std::lock_guard lock(catalog_mutex_);
  catalog_ = std::move(next);
}

EvaluationContext Engine::context() const { return {store_, data_version_, teams_, sprints_, clock_}; }

ScoreMatrix Engine::evaluate_all(bool bypass_cache) {
  auto snapshot = catalog();
  return engine::evaluate_all(*snapshot, context(), bypass_cache ? nullptr : &cache_);
}

MetricResult Engine::evaluate(std::string_view metric_id, std::string_view team, std::string_view sprint,
                              bool bypass_cache) {
  auto snapshot = catalog();
  const MetricDef* def = snapshot->find(metric_id);
  if (!def) throw Error(ErrorCode::UnknownMetric, "unknown metric '" + std::string(metric_id) + "'");
  auto t = std::find_if(teams_.begin(), teams_.end(), [&](const auto& d) { return d.label_name == team; });
  if (t == teams_.end()) throw Error(ErrorCode::UnknownTeam, "unknown team '" + std::string(team) + "'");
  auto s = std::find_if(sprints_.begin(), sprints_.end(), [&](const auto& d) { return d.title == sprint; });
  if (s == sprints_.end()) throw Error(ErrorCode::UnknownSprint, "unknown sprint '" + std::string(sprint) + "'");

  CacheKey key{def->id, def->revision, t->label_name, s->title, data_version_.digest};
  if (!bypass_cache) {
    if (auto hit = cache_.get(key); hit && hit->weight == snapshot->weights(def->severity)) return *hit;
  }
  MetricResult r = evaluate_metric(*def, snapshot->weights, *t, std::size_t(s - sprints_.begin()), context());
  cache_.put(key, r);
  return r;
}

MetricDef Engine::update_metric(std::string_view metric_id, const nlohmann::json& fields,
                                std::optional<std::int64_t> base_revision) {
  std::lock_guard writer(write_mutex_);
  auto current = catalog();
  const MetricDef* def = current->find(metric_id);
  if (!def) throw Error(ErrorCode::UnknownMetric, "unknown metric '" + std::string(metric_id) + "'");
  if (base_revision && *base_revision != def->revision) {
    throw Error(ErrorCode::StaleRevision, "metric '" + def->id + "' is at revision " +
                                              std::to_string(def->revision) + ", not " +
                                              std::to_string(*base_revision));
  }
  std::vector<CatalogIssue> issues;
  MetricDef updated = apply_fields(*def, fields, issues);
  if (issues.empty()) issues = validate_metric(updated);
  if (!issues.empty()) throw CatalogInvalid(std::move(issues));
  updated.revision = def->revision + 1;

  auto next = std::make_shared<Catalog>(*current);
  for (auto& m : next->metrics) {
    if (m.id == updated.id) m = updated;
  }
  audit_.push_back({*def, updated.revision, clock_()});
  {
    std::lock_guard lock(catalog_mutex_);
    catalog_ = std::move(next);
  }
  // Entries of older revisions are unreachable by key already; dropping them
  // keeps the cache from growing with every edit.
  cache_.invalidate_metric(updated.id);
  return updated;
}

std::vector<AuditEntry> Engine::audit_log() const {
  std::lock_guard writer(write_mutex_);
  return audit_;
}

}  // namespace agilelint::engine
