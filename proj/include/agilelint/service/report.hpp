#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "agilelint/engine/evaluate.hpp"

namespace agilelint::service {

struct ReportOptions {
  std::optional<std::string> team;
  std::optional<std::string> sprint;
  std::size_t top_violations = 5;
};

/// Report document. `generated_at` is the latest sprint end in scope, so the
/// same results always give the same bytes. Metrics are listed ascending by
/// score, unscored ones last, ties by id.
nlohmann::json report_document(const engine::ScoreMatrix& matrix, const ReportOptions& options = {});

/// Indented JSON with floats fixed to two decimals and sorted keys.
std::string report_json(const engine::ScoreMatrix& matrix, const ReportOptions& options = {});
std::string report_text(const engine::ScoreMatrix& matrix, const ReportOptions& options = {});

/// Serializes with every float printed to exactly two decimals.
std::string dump_fixed(const nlohmann::json& value, int indent = 2);

/// Metric results of a cell sorted as in reports and the scores endpoint.
std::vector<const engine::MetricResult*> sorted_results(const engine::ScoreCell& cell);

}  // namespace agilelint::service
