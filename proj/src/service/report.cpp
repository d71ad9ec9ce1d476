#include "agilelint/service/report.hpp"

#include <algorithm>
#include <cstdio>

#include "agilelint/error.hpp"

namespace agilelint::service {

namespace {

using nlohmann::json;

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

void emit(const json& v, int indent, int depth, std::string& out) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(std::size_t(indent * d), ' ');
  };
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(key).dump();
        out += indent < 0 ? ":" : ": ";
        emit(item, indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        newline(depth + 1);
        emit(v[i], indent, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      out += fixed2(v.get<double>());
      return;
    default:
      out += v.dump();
  }
}

json score_json(const std::optional<double>& s) { return s ? json(*s) : json(nullptr); }

bool in_scope(const engine::ScoreCell& cell, const ReportOptions& o) {
  return (!o.team || *o.team == cell.team) && (!o.sprint || *o.sprint == cell.sprint);
}

}  // namespace

std::string dump_fixed(const json& value, int indent) {
  std::string out;
  emit(value, indent, 0, out);
  return out;
}

std::vector<const engine::MetricResult*> sorted_results(const engine::ScoreCell& cell) {
  std::vector<const engine::MetricResult*> out;
  for (const auto& r : cell.results) out.push_back(&r);
  std::stable_sort(out.begin(), out.end(), [](const auto* a, const auto* b) {
    if (a->score.has_value() != b->score.has_value()) return a->score.has_value();
    if (a->score && *a->score != *b->score) return *a->score < *b->score;
    return a->metric_id < b->metric_id;
  });
  return out;
}

json report_document(const engine::ScoreMatrix& matrix, const ReportOptions& options) {
  if (options.team && std::find(matrix.teams.begin(), matrix.teams.end(), *options.team) == matrix.teams.end()) {
    throw Error(ErrorCode::UnknownTeam, "unknown team '" + *options.team + "'");
  }
  if (options.sprint &&
      std::find(matrix.sprints.begin(), matrix.sprints.end(), *options.sprint) == matrix.sprints.end()) {
    throw Error(ErrorCode::UnknownSprint, "unknown sprint '" + *options.sprint + "'");
  }
  std::optional<Timestamp> generated;
  json teams = json::array();
  for (const auto& team : matrix.teams) {
    if (options.team && *options.team != team) continue;
    json sprints = json::array();
    for (const auto& sprint : matrix.sprints) {
      const engine::ScoreCell* cell = matrix.find(team, sprint);
      if (!cell || !in_scope(*cell, options)) continue;
      json categories = json::array();
      for (const auto& [name, score] : cell->category_scores) {
        categories.push_back({{"name", name}, {"score", score_json(score)}});
      }
      json metrics = json::array();
      for (const auto* r : sorted_results(*cell)) {
        if (!generated || *generated < r->sprint_end) generated = r->sprint_end;
        json top = json::array();
        for (std::size_t k = 0; k < r->violations.size() && k < options.top_violations; ++k) {
          const auto& v = r->violations[k];
          json columns = json::object();
          for (const auto& [name, value] : v.columns) columns[name] = value;
          top.push_back({{"artifact_kind", v.artifact_kind}, {"artifact_ref", v.artifact_ref}, {"columns", columns}});
        }
        metrics.push_back({{"id", r->metric_id},
                           {"name", r->metric_name},
                           {"category", r->category},
                           {"severity", scoring::to_string(r->severity)},
                           {"revision", r->metric_revision},
                           {"status", engine::to_string(r->status)},
                           {"score", score_json(r->score)},
                           {"message", r->message},
                           {"violation_count", r->violations.size()},
                           {"top_violations", std::move(top)}});
      }
      sprints.push_back({{"sprint", sprint},
                         {"overall", score_json(cell->overall)},
                         {"categories", std::move(categories)},
                         {"metrics", std::move(metrics)}});
    }
    teams.push_back({{"team", team}, {"sprints", std::move(sprints)}});
  }
  json scope_sprints = json::array();
  for (const auto& s : matrix.sprints) {
    if (!options.sprint || *options.sprint == s) scope_sprints.push_back(s);
  }
  json scope_teams = json::array();
  for (const auto& t : matrix.teams) {
    if (!options.team || *options.team == t) scope_teams.push_back(t);
  }
  return {{"generated_at", format_iso8601(generated.value_or(Timestamp{}))},
          {"data_version", matrix.data_version.digest},
          {"scope", {{"teams", std::move(scope_teams)}, {"sprints", std::move(scope_sprints)}}},
          {"teams", std::move(teams)}};
}

std::string report_json(const engine::ScoreMatrix& matrix, const ReportOptions& options) {
  return dump_fixed(report_document(matrix, options)) + "\n";
}

std::string report_text(const engine::ScoreMatrix& matrix, const ReportOptions& options) {
  json doc = report_document(matrix, options);
  auto score = [](const json& s) { return s.is_null() ? std::string("  n/a") : fixed2(s.get<double>()); };
  std::string out = "agilelint report\n";
  out += "generated_at " + doc["generated_at"].get<std::string>() + "\n";
  out += "data_version " + doc["data_version"].get<std::string>() + "\n";
  for (const auto& team : doc["teams"]) {
    out += "\n" + team["team"].get<std::string>() + "\n";
    for (const auto& sprint : team["sprints"]) {
      out += "  " + sprint["sprint"].get<std::string>() + "  overall " + score(sprint["overall"]) + "\n";
      for (const auto& c : sprint["categories"]) {
        out += "    " + c["name"].get<std::string>() + "  " + score(c["score"]) + "\n";
      }
      for (const auto& m : sprint["metrics"]) {
        std::size_t n = m["violation_count"].get<std::size_t>();
        out += "      " + score(m["score"]) + "  " + m["id"].get<std::string>() + " (" +
               m["severity"].get<std::string>() + ")  " + std::to_string(n) + (n == 1 ? " violation" : " violations");
        if (m["status"] != "ok") out += "  [" + m["status"].get<std::string>() + "]";
        out += "\n";
        for (const auto& v : m["top_violations"]) out += "          " + v["artifact_ref"].get<std::string>() + "\n";
      }
    }
  }
  return out;
}

}  // namespace agilelint::service
