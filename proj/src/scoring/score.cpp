#include "agilelint/scoring/score.hpp"

#include <algorithm>

#include "agilelint/error.hpp"

namespace agilelint::scoring {

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::Low: return "Low";
    case Severity::Medium: return "Medium";
    case Severity::High: return "High";
  }
  return "Low";
}

std::optional<Severity> parse_severity(std::string_view text) {
  if (text == "Low") return Severity::Low;
  if (text == "Medium") return Severity::Medium;
  if (text == "High") return Severity::High;
  return std::nullopt;
}

double SeverityWeights::operator()(Severity severity) const {
  switch (severity) {
    case Severity::Low: return low;
    case Severity::Medium: return medium;
    case Severity::High: return high;
  }
  return low;
}

ScoreBindings standard_bindings(const mql::BindingTable& table,
                                const std::map<std::string, double, std::less<>>& context,
                                const std::map<std::string, double, std::less<>>& params,
                                const std::map<std::string, std::string, std::less<>>& aliases) {
  ScoreBindings out;
  out["violations"] = double(table.rows.size());
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    double sum = 0;
    double lo = 0;
    double hi = 0;
    std::size_t n = 0;
    for (const auto& row : table.rows) {
      if (!row[c].is_number()) continue;
      double v = row[c].as_number();
      lo = n == 0 ? v : std::min(lo, v);
      hi = n == 0 ? v : std::max(hi, v);
      sum += v;
      ++n;
    }
    if (n == 0) continue;
    const std::string& name = table.columns[c];
    out["avg_" + name] = sum / double(n);
    out["sum_" + name] = sum;
    out["max_" + name] = hi;
    out["min_" + name] = lo;
  }
  for (const auto& [name, value] : params) out[name] = value;
  for (const auto& [name, value] : context) out[name] = value;
  for (const auto& [alias, target] : aliases) {
    auto it = out.find(target);
    if (it != out.end()) {
      out[alias] = it->second;
    } else if (table.rows.empty()) {
      out[alias] = 0;
    } else {
      throw Error(ErrorCode::AliasTargetMissing,
                  "alias '" + alias + "' refers to missing binding '" + target + "'");
    }
  }
  return out;
}

double aggregate_scores(const std::vector<WeightedScore>& scores) {
  if (scores.empty()) throw Error(ErrorCode::NothingToAggregate, "no applicable metric to aggregate");
  double weighted = 0;
  double total = 0;
  double lo = scores.front().score;
  double hi = lo;
  for (const auto& s : scores) {
    weighted += s.weight * s.score;
    total += s.weight;
    lo = std::min(lo, s.score);
    hi = std::max(hi, s.score);
  }
  // Rounding can push the mean a hair outside the input range.
  return std::clamp(weighted / total, lo, hi);
}

}  // namespace agilelint::scoring
