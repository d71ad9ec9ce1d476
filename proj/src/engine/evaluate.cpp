#include "agilelint/engine/evaluate.hpp"

#include <algorithm>
#include <map>

#include "agilelint/engine/cache.hpp"
#include "agilelint/engine/detectors.hpp"
#include "agilelint/error.hpp"
#include "agilelint/mql/evaluator.hpp"
#include "agilelint/scoring/rating.hpp"

namespace agilelint::engine {

namespace {

using nlohmann::json;

std::vector<Violation> materialize(const mql::BindingTable& table, const GraphStore& store) {
  std::vector<Violation> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Violation v;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (v.artifact_ref.empty()) {
        if (const auto* node = row[c].get_if<mql::NodeRef>()) {
          v.artifact_kind = std::string(to_string(store.node(node->id).label));
          v.artifact_ref = mql::node_ref(store, node->id);
        }
      }
      v.columns.emplace_back(table.columns[c], mql::render(row[c], store));
    }
    if (v.artifact_ref.empty() && !v.columns.empty()) v.artifact_ref = v.columns.front().second;
    out.push_back(std::move(v));
  }
  return out;
}

double context_scalar(const std::string& name, const mql::BindingTable& table) {
  if (table.rows.size() != 1 || table.columns.size() != 1) {
    throw Error(ErrorCode::TypeError, "context query '" + name + "' returned " + std::to_string(table.rows.size()) +
                                          "x" + std::to_string(table.columns.size()) + " instead of 1x1");
  }
  const mql::Value& v = table.rows[0][0];
  if (v.is_null()) throw Error(ErrorCode::DegenerateInput, "context query '" + name + "' returned null");
  if (!v.is_number()) throw Error(ErrorCode::TypeError, "context query '" + name + "' returned a non-number");
  return v.as_number();
}

json bindings_json(const scoring::ScoreBindings& bindings) {
  json out = json::object();
  for (const auto& [k, v] : bindings) out[k] = v;
  return out;
}

}  // namespace

std::string_view to_string(ResultStatus status) {
  switch (status) {
    case ResultStatus::Ok: return "ok";
    case ResultStatus::Inapplicable: return "inapplicable";
    case ResultStatus::Errored: return "errored";
  }
  return "ok";
}

bool MetricResult::same_outcome(const MetricResult& o) const {
  return metric_id == o.metric_id && metric_name == o.metric_name && metric_revision == o.metric_revision &&
         category == o.category && severity == o.severity && weight == o.weight && team == o.team &&
         sprint == o.sprint && sprint_ordinal == o.sprint_ordinal && sprint_end == o.sprint_end &&
         status == o.status && score == o.score && message == o.message && violations == o.violations &&
         bindings == o.bindings && data_version == o.data_version;
}

const ScoreCell* ScoreMatrix::find(std::string_view team, std::string_view sprint) const {
  for (const auto& c : cells) {
    if (c.team == team && c.sprint == sprint) return &c;
  }
  return nullptr;
}

mql::PlaceholderBindings evaluation_bindings(const MetricDef& def, const ingest::TeamDescriptor& team,
                                             const std::vector<ingest::SprintDescriptor>& sprints,
                                             std::size_t sprint_index) {
  const auto& sprint = sprints.at(sprint_index);
  mql::List titles;
  for (std::size_t k = 0; k <= sprint_index; ++k) titles.emplace_back(sprints[k].title);
  mql::PlaceholderBindings out;
  for (const auto& [name, value] : def.params) out[name] = mql::Value(value);
  out["team"] = mql::Value(team.label_name);
  out["sprint"] = mql::Value(sprint.title);
  out["sprint_list"] = mql::Value(std::move(titles));
  out["sprint_start"] = mql::Value(sprint.start);
  out["sprint_end"] = mql::Value(sprint.end);
  return out;
}

MetricResult evaluate_metric(const MetricDef& def, const scoring::SeverityWeights& weights,
                             const ingest::TeamDescriptor& team, std::size_t sprint_index,
                             const EvaluationContext& context) {
  const auto& sprint = context.sprints.at(sprint_index);
  MetricResult r;
  r.metric_id = def.id;
  r.metric_name = def.name;
  r.metric_revision = def.revision;
  r.category = def.category;
  r.severity = def.severity;
  r.weight = weights(def.severity);
  r.team = team.label_name;
  r.sprint = sprint.title;
  r.sprint_ordinal = sprint.ordinal;
  r.sprint_end = sprint.end;
  r.evaluated_at = context.clock();
  r.data_version = context.data_version;

  try {
    auto placeholders = evaluation_bindings(def, team, context.sprints, sprint_index);
    mql::BindingTable table;
    if (def.kind == MetricKind::Query) {
      table = mql::run_query(def.query, placeholders, context.store);
    } else {
      const Detector* detector = find_detector(def.query);
      if (!detector) throw Error(ErrorCode::DetectorUnknown, "no native detector named '" + def.query + "'");
      table = detector->run({context.store, team.label_name, sprint, def.params});
      mql::sort_rows(table, context.store);
    }
    r.violations = materialize(table, context.store);

    std::map<std::string, double, std::less<>> scalars;
    for (const auto& [name, text] : def.context_queries) {
      scalars[name] = context_scalar(name, mql::run_query(text, placeholders, context.store));
    }
    r.bindings = scoring::standard_bindings(table, scalars, def.params, def.aliases);
    r.score = scoring::eval_rating(scoring::parse_rating(def.rating), r.bindings);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateInput) {
      throw Error(e.code(), "metric '" + def.id + "': " + e.what());
    }
    r.status = ResultStatus::Inapplicable;
    r.score.reset();
    r.message = e.what();
  }
  return r;
}

void aggregate_cell(ScoreCell& cell, const std::vector<std::string>& categories) {
  auto aggregate = [&](auto&& include) -> std::optional<double> {
    std::vector<scoring::WeightedScore> scores;
    for (const auto& r : cell.results) {
      if (r.status == ResultStatus::Ok && include(r)) scores.push_back({*r.score, r.weight});
    }
    if (scores.empty()) return std::nullopt;
    return scoring::aggregate_scores(scores);
  };
  cell.category_scores.clear();
  for (const auto& category : categories) {
    cell.category_scores.emplace_back(category,
                                      aggregate([&](const MetricResult& r) { return r.category == category; }));
  }
  cell.overall = aggregate([](const MetricResult&) { return true; });
}

ScoreMatrix evaluate_all(const Catalog& catalog, const EvaluationContext& context, ResultCache* cache) {
  ScoreMatrix m;
  m.categories = catalog.categories();
  m.data_version = context.data_version;
  for (const auto& t : context.teams) m.teams.push_back(t.label_name);
  for (const auto& s : context.sprints) m.sprints.push_back(s.title);

  std::size_t total = 0;
  std::size_t applicable = 0;
  for (const auto& team : context.teams) {
    for (std::size_t s = 0; s < context.sprints.size(); ++s) {
      ScoreCell cell{team.label_name, context.sprints[s].title, {}, {}, std::nullopt};
      for (const auto& def : catalog.metrics) {
        CacheKey key{def.id, def.revision, team.label_name, context.sprints[s].title, context.data_version.digest};
        std::optional<MetricResult> hit = cache ? cache->get(key) : std::nullopt;
        MetricResult r;
        if (hit && hit->weight == catalog.weights(def.severity)) {
          r = std::move(*hit);
        } else {
          try {
            r = evaluate_metric(def, catalog.weights, team, s, context);
            if (cache) cache->put(key, r);
          } catch (const Error& e) {
            r.metric_id = def.id;
            r.metric_name = def.name;
            r.metric_revision = def.revision;
            r.category = def.category;
            r.severity = def.severity;
            r.weight = catalog.weights(def.severity);
            r.team = team.label_name;
            r.sprint = context.sprints[s].title;
            r.sprint_ordinal = context.sprints[s].ordinal;
            r.sprint_end = context.sprints[s].end;
            r.status = ResultStatus::Errored;
            r.message = e.what();
            r.evaluated_at = context.clock();
            r.data_version = context.data_version;
          }
        }
        ++total;
        if (r.status == ResultStatus::Ok) ++applicable;
        cell.results.push_back(std::move(r));
      }
      aggregate_cell(cell, m.categories);
      m.cells.push_back(std::move(cell));
    }
  }
  if (total > 0 && applicable == 0) {
    throw Error(ErrorCode::NothingToAggregate, "no metric applied to any team and sprint");
  }
  return m;
}

std::vector<TrendPoint> trend(const ScoreMatrix& matrix, std::string_view team, std::string_view selector) {
  if (std::find(matrix.teams.begin(), matrix.teams.end(), team) == matrix.teams.end()) {
    throw Error(ErrorCode::UnknownTeam, "unknown team '" + std::string(team) + "'");
  }
  bool is_category = std::find(matrix.categories.begin(), matrix.categories.end(), selector) != matrix.categories.end();
  bool known_metric = false;
  std::vector<TrendPoint> out;
  for (const auto& sprint : matrix.sprints) {
    TrendPoint p{sprint, std::nullopt};
    if (const ScoreCell* cell = matrix.find(team, sprint)) {
      if (selector == "overall") {
        p.score = cell->overall;
      } else if (is_category) {
        for (const auto& [name, score] : cell->category_scores) {
          if (name == selector) p.score = score;
        }
      } else {
        for (const auto& r : cell->results) {
          if (r.metric_id != selector) continue;
          known_metric = true;
          p.score = r.score;
        }
      }
    }
    out.push_back(std::move(p));
  }
  if (selector != "overall" && !is_category && !known_metric) {
    throw Error(ErrorCode::UnknownMetric, "'" + std::string(selector) + "' is neither a category nor a metric");
  }
  return out;
}

json to_json(const MetricResult& r) {
  json violations = json::array();
  for (const auto& v : r.violations) {
    json columns = json::array();
    for (const auto& [name, value] : v.columns) columns.push_back({name, value});
    violations.push_back(
        {{"artifact_kind", v.artifact_kind}, {"artifact_ref", v.artifact_ref}, {"columns", std::move(columns)}});
  }
  return {{"metric_id", r.metric_id},
          {"metric_name", r.metric_name},
          {"metric_revision", r.metric_revision},
          {"category", r.category},
          {"severity", scoring::to_string(r.severity)},
          {"weight", r.weight},
          {"team", r.team},
          {"sprint", r.sprint},
          {"sprint_ordinal", r.sprint_ordinal},
          {"sprint_end", format_iso8601(r.sprint_end)},
          {"status", to_string(r.status)},
          {"score", r.score ? json(*r.score) : json(nullptr)},
          {"message", r.message},
          {"violations", std::move(violations)},
          {"bindings", bindings_json(r.bindings)},
          {"evaluated_at", format_iso8601(r.evaluated_at)},
          {"data_version", r.data_version.digest}};
}

MetricResult result_from_json(const json& o) {
  try {
    MetricResult r;
    r.metric_id = o.at("metric_id").get<std::string>();
    r.metric_name = o.value("metric_name", r.metric_id);
    r.metric_revision = o.at("metric_revision").get<std::int64_t>();
    r.category = o.at("category").get<std::string>();
    auto severity = scoring::parse_severity(o.at("severity").get<std::string>());
    if (!severity) throw SchemaViolation("$.severity", "unknown severity");
    r.severity = *severity;
    r.weight = o.at("weight").get<double>();
    r.team = o.at("team").get<std::string>();
    r.sprint = o.at("sprint").get<std::string>();
    r.sprint_ordinal = o.at("sprint_ordinal").get<int>();
    auto end = parse_iso8601(o.at("sprint_end").get<std::string>());
    if (!end) throw SchemaViolation("$.sprint_end", "malformed timestamp");
    r.sprint_end = *end;
    std::string status = o.at("status").get<std::string>();
    if (status == "ok") {
      r.status = ResultStatus::Ok;
    } else if (status == "inapplicable") {
      r.status = ResultStatus::Inapplicable;
    } else if (status == "errored") {
      r.status = ResultStatus::Errored;
    } else {
      throw SchemaViolation("$.status", "unknown status '" + status + "'");
    }
    if (!o.at("score").is_null()) r.score = o.at("score").get<double>();
    if (r.status == ResultStatus::Ok && !r.score) throw SchemaViolation("$.score", "ok result without a score");
    r.message = o.value("message", "");
    for (const auto& v : o.at("violations")) {
      Violation out{v.at("artifact_kind").get<std::string>(), v.at("artifact_ref").get<std::string>(), {}};
      for (const auto& c : v.at("columns")) out.columns.emplace_back(c.at(0).get<std::string>(), c.at(1).get<std::string>());
      r.violations.push_back(std::move(out));
    }
    for (const auto& [k, v] : o.at("bindings").items()) r.bindings[k] = v.get<double>();
    auto at = parse_iso8601(o.value("evaluated_at", "1970-01-01T00:00:00Z"));
    r.evaluated_at = at.value_or(Timestamp{});
    r.data_version.digest = o.at("data_version").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw SchemaViolation("$", std::string("malformed result: ") + e.what());
  }
}

ScoreMatrix matrix_from_results(const std::vector<MetricResult>& results) {
  ScoreMatrix m;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> latest;
  for (std::size_t k = 0; k < results.size(); ++k) {
    latest[{results[k].metric_id, results[k].team, results[k].sprint}] = k;
  }
  std::vector<std::string> metric_order;
  std::map<std::string, int> sprint_ordinals;
  auto add_unique = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  for (const auto& r : results) {
    add_unique(m.teams, r.team);
    add_unique(m.categories, r.category);
    add_unique(metric_order, r.metric_id);
    sprint_ordinals.emplace(r.sprint, r.sprint_ordinal);
    m.data_version = r.data_version;
  }
  std::vector<std::pair<int, std::string>> sprints;
  for (const auto& [title, ordinal] : sprint_ordinals) sprints.emplace_back(ordinal, title);
  std::sort(sprints.begin(), sprints.end());
  for (const auto& [ordinal, title] : sprints) m.sprints.push_back(title);

  for (const auto& team : m.teams) {
    for (const auto& sprint : m.sprints) {
      ScoreCell cell{team, sprint, {}, {}, std::nullopt};
      for (const auto& id : metric_order) {
        auto it = latest.find({id, team, sprint});
        if (it != latest.end()) cell.results.push_back(results[it->second]);
      }
      if (cell.results.empty()) continue;
      aggregate_cell(cell, m.categories);
      m.cells.push_back(std::move(cell));
    }
  }
  return m;
}

}  // namespace agilelint::engine
