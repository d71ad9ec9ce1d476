#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agilelint/mql/evaluator.hpp"
#include "agilelint/scoring/rating.hpp"

namespace agilelint::scoring {

enum class Severity { Low, Medium, High };

std::string_view to_string(Severity severity);
std::optional<Severity> parse_severity(std::string_view text);

/// Numeric weight per severity level. Defaults 1, 2, 3.
struct SeverityWeights {
  double low = 1;
  double medium = 2;
  double high = 3;

  double operator()(Severity severity) const;
};

/// `violations` plus avg_/sum_/max_/min_ of every column holding at least one
/// number, then params, then context scalars, then aliases. Later sources
/// override earlier ones on a name clash.
///
/// An alias whose target is absent throws Error(AliasTargetMissing) unless the
/// table is empty, in which case the alias binds 0.
ScoreBindings standard_bindings(const mql::BindingTable& table,
                                const std::map<std::string, double, std::less<>>& context,
                                const std::map<std::string, double, std::less<>>& params,
                                const std::map<std::string, std::string, std::less<>>& aliases);

struct WeightedScore {
  double score;
  double weight;
};

/// Σwᵢsᵢ / Σwᵢ. Throws Error(NothingToAggregate) on an empty list.
double aggregate_scores(const std::vector<WeightedScore>& scores);

}  // namespace agilelint::scoring
