#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "agilelint/engine/catalog.hpp"
#include "agilelint/ingest.hpp"
#include "agilelint/snapshot.hpp"

namespace agilelint::engine {

class ResultCache;

struct Violation {
  std::string artifact_kind;  // node label, empty when the row holds no node
  std::string artifact_ref;
  std::vector<std::pair<std::string, std::string>> columns;  // rendered, in column order

  friend bool operator==(const Violation&, const Violation&) = default;
};

enum class ResultStatus { Ok, Inapplicable, Errored };
std::string_view to_string(ResultStatus status);

struct MetricResult {
  std::string metric_id;
  std::string metric_name;
  std::int64_t metric_revision = 0;
  std::string category;
  Severity severity = Severity::Medium;
  double weight = 0;
  std::string team;    // label name
  std::string sprint;  // title
  int sprint_ordinal = 0;
  Timestamp sprint_end;
  ResultStatus status = ResultStatus::Ok;
  std::optional<double> score;  // set iff status == Ok
  std::string message;          // why a result is inapplicable or errored
  std::vector<Violation> violations;
  scoring::ScoreBindings bindings;
  Timestamp evaluated_at;
  DataVersion data_version;

  /// Equality of everything except evaluated_at.
  bool same_outcome(const MetricResult& other) const;
};

/// One (team, sprint) cell with its aggregates.
struct ScoreCell {
  std::string team;
  std::string sprint;
  std::vector<MetricResult> results;  // catalog order
  std::vector<std::pair<std::string, std::optional<double>>> category_scores;  // category order
  std::optional<double> overall;
};

struct ScoreMatrix {
  std::vector<std::string> teams;
  std::vector<std::string> sprints;  // ordinal order
  std::vector<std::string> categories;
  std::vector<ScoreCell> cells;  // team-major
  DataVersion data_version;

  const ScoreCell* find(std::string_view team, std::string_view sprint) const;
};

/// Placeholder bindings of one evaluation: team, sprint, sprint_list (this and
/// every earlier sprint), sprint_start, sprint_end and each param.
mql::PlaceholderBindings evaluation_bindings(const MetricDef& def, const ingest::TeamDescriptor& team,
                                             const std::vector<ingest::SprintDescriptor>& sprints,
                                             std::size_t sprint_index);

struct EvaluationContext {
  const GraphStore& store;
  const DataVersion& data_version;
  const std::vector<ingest::TeamDescriptor>& teams;
  const std::vector<ingest::SprintDescriptor>& sprints;
  std::function<Timestamp()> clock = now_utc;
};

/// Runs one metric for one team and sprint. DegenerateInput yields an
/// Inapplicable result; other failures throw an Error of the same code whose
/// message names the metric. Native detectors that are unknown throw
/// Error(DetectorUnknown).
MetricResult evaluate_metric(const MetricDef& def, const scoring::SeverityWeights& weights,
                             const ingest::TeamDescriptor& team, std::size_t sprint_index,
                             const EvaluationContext& context);

/// Every (team, sprint, metric), served from `cache` when given and fresh. A
/// metric that throws is recorded as Errored and left out of aggregation.
/// Throws Error(NothingToAggregate) when results exist but none applies.
ScoreMatrix evaluate_all(const Catalog& catalog, const EvaluationContext& context, ResultCache* cache = nullptr);

/// Recomputes category and overall scores of a cell from its results.
void aggregate_cell(ScoreCell& cell, const std::vector<std::string>& categories);

struct TrendPoint {
  std::string sprint;
  std::optional<double> score;  // nullopt marks a gap
};

/// Series over all sprints for "overall", a category name or a metric id.
/// Throws Error(UnknownTeam), or Error(UnknownMetric) for an unknown selector.
std::vector<TrendPoint> trend(const ScoreMatrix& matrix, std::string_view team, std::string_view selector);

nlohmann::json to_json(const MetricResult& result);
MetricResult result_from_json(const nlohmann::json& object);

/// Rebuilds a matrix from stored results. When a (metric, team, sprint)
/// appears more than once the last one wins.
ScoreMatrix matrix_from_results(const std::vector<MetricResult>& results);

}  // namespace agilelint::engine
