#include "agilelint/service/server.hpp"

#include <algorithm>
#include <cmath>

#include <httplib.h>

#include "agilelint/error.hpp"
#include "agilelint/service/report.hpp"

namespace agilelint::service {

namespace {

using nlohmann::json;

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send(res, status, {{"error", code}, {"message", message}});
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownMetric:
    case ErrorCode::UnknownTeam:
    case ErrorCode::UnknownSprint:
      return 404;
    case ErrorCode::StaleRevision:
      return 409;
    case ErrorCode::CatalogInvalid:
      return 422;
    default:
      return 500;
  }
}

json score_json(const std::optional<double>& s) { return s ? json(*s) : json(nullptr); }

/// Required query parameter; writes a 400 and returns nullopt when absent.
std::optional<std::string> param(const httplib::Request& req, httplib::Response& res, const char* name) {
  if (!req.has_param(name) || req.get_param_value(name).empty()) {
    send_error(res, 400, "BadRequest", std::string("missing query parameter '") + name + "'");
    return std::nullopt;
  }
  return req.get_param_value(name);
}

json issues_json(const std::vector<CatalogIssue>& issues) {
  json out = json::array();
  for (const auto& i : issues) {
    out.push_back({{"metric_id", i.metric_id},
                   {"field", i.field},
                   {"reason", i.reason},
                   {"offset", i.offset >= 0 ? json(i.offset) : json(nullptr)}});
  }
  return out;
}

}  // namespace

ServiceConfig load_service_config(const json& document) {
  ServiceConfig config;
  if (!document.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  if (auto it = document.find("cache_ttl_seconds"); it != document.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
      throw Error(ErrorCode::InvalidConfig, "cache_ttl_seconds must be a non-negative integer");
    }
    config.cache_ttl_seconds = it->get<std::int64_t>();
  }
  if (auto it = document.find("port"); it != document.end()) {
    if (!it->is_number_integer() || it->get<int>() < 0 || it->get<int>() > 65535) {
      throw Error(ErrorCode::InvalidConfig, "port must be an integer in [0, 65535]");
    }
    config.port = it->get<int>();
  }
  if (auto it = document.find("severity_weights"); it != document.end()) {
    if (!it->is_object()) throw Error(ErrorCode::InvalidConfig, "severity_weights must be an object");
    scoring::SeverityWeights w;
    for (const auto& [level, value] : it->items()) {
      auto s = scoring::parse_severity(level);
      if (!s) throw Error(ErrorCode::InvalidConfig, "unknown severity '" + level + "'");
      if (!value.is_number() || !(value.get<double>() > 0) || !std::isfinite(value.get<double>())) {
        throw Error(ErrorCode::InvalidConfig, "weight of " + level + " must be a positive number");
      }
      double v = value.get<double>();
      (*s == scoring::Severity::Low ? w.low : *s == scoring::Severity::Medium ? w.medium : w.high) = v;
    }
    config.severity_weights = w;
  }
  return config;
}

ApiServer::ApiServer(engine::Engine& engine, ServerOptions options)
    : engine_(engine), options_(std::move(options)), http_(std::make_unique<httplib::Server>()) {
  refresh(false);
  routes();
}

ApiServer::~ApiServer() { stop(); }

std::shared_ptr<const engine::ScoreMatrix> ApiServer::matrix() const {
  std::lock_guard lock(matrix_mutex_);
  return matrix_;
}

void ApiServer::refresh(bool bypass_cache) {
  std::lock_guard serial(refresh_mutex_);
  auto next = std::make_shared<engine::ScoreMatrix>();
  std::string error;
  try {
    *next = engine_.evaluate_all(bypass_cache);
  } catch (const Error& e) {
    error = e.what();
    for (const auto& t : engine_.teams()) next->teams.push_back(t.label_name);
    for (const auto& s : engine_.sprints()) next->sprints.push_back(s.title);
    next->categories = engine_.catalog()->categories();
    next->data_version = engine_.data_version();
  }
  std::lock_guard lock(matrix_mutex_);
  matrix_ = std::move(next);
  last_error_ = std::move(error);
}

void ApiServer::routes() {
  auto& s = *http_;

  s.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
    auto m = matrix();
    std::string error;
    {
      std::lock_guard lock(matrix_mutex_);
      error = last_error_;
    }
    send(res, 200,
         {{"status", error.empty() ? "ok" : "degraded"},
          {"data_version", engine_.data_version().digest},
          {"teams", engine_.teams().size()},
          {"sprints", engine_.sprints().size()},
          {"metrics", engine_.catalog()->metrics.size()},
          {"error", error.empty() ? json(nullptr) : json(error)}});
  });

  s.Get("/api/teams", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& t : engine_.teams()) out.push_back({{"name", t.name}, {"label", t.label_name}});
    send(res, 200, out);
  });

  s.Get("/api/sprints", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& sp : engine_.sprints()) {
      out.push_back({{"title", sp.title},
                     {"ordinal", sp.ordinal},
                     {"start", format_iso8601(sp.start)},
                     {"end", format_iso8601(sp.end)}});
    }
    send(res, 200, out);
  });

  s.Get("/api/metrics", [this](const httplib::Request&, httplib::Response& res) {
    auto catalog = engine_.catalog();
    json out = json::array();
    for (const auto& m : catalog->metrics) out.push_back(engine::to_json(m));
    send(res, 200, out);
  });

  s.Get(R"(/api/metrics/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto catalog = engine_.catalog();
    const auto* def = catalog->find(req.matches[1].str());
    if (!def) return send_error(res, 404, "UnknownMetric", "unknown metric '" + req.matches[1].str() + "'");
    send(res, 200, engine::to_json(*def));
  });

  s.Put(R"(/api/metrics/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      return send_error(res, 400, "BadRequest", std::string("malformed JSON body: ") + e.what());
    }
    if (!body.is_object()) return send_error(res, 400, "BadRequest", "body must be a JSON object");
    auto rev = body.find("revision");
    if (rev == body.end() || !rev->is_number_integer()) {
      return send_error(res, 400, "BadRequest", "body must carry the integer base 'revision'");
    }
    try {
      auto updated = engine_.update_metric(req.matches[1].str(), body, rev->get<std::int64_t>());
      refresh(false);
      send(res, 200, {{"metric", engine::to_json(updated)}});
    } catch (const CatalogInvalid& e) {
      send(res, 422, {{"error", "CatalogInvalid"}, {"message", e.what()}, {"issues", issues_json(e.issues())}});
    } catch (const Error& e) {
      json body_out = {{"error", to_string(e.code())}, {"message", e.what()}};
      if (e.code() == ErrorCode::StaleRevision) {
        if (const auto* def = engine_.catalog()->find(req.matches[1].str())) body_out["current_revision"] = def->revision;
      }
      send(res, status_for(e.code()), body_out);
    }
  });

  s.Post("/api/evaluate", [this](const httplib::Request&, httplib::Response& res) {
    refresh(true);
    auto m = matrix();
    std::size_t results = 0;
    for (const auto& c : m->cells) results += c.results.size();
    std::string error;
    {
      std::lock_guard lock(matrix_mutex_);
      error = last_error_;
    }
    send(res, 200,
         {{"status", error.empty() ? "ok" : "degraded"},
          {"results", results},
          {"data_version", m->data_version.digest},
          {"error", error.empty() ? json(nullptr) : json(error)}});
  });

  s.Get("/api/scores", [this](const httplib::Request& req, httplib::Response& res) {
    auto team = param(req, res, "team");
    if (!team) return;
    auto sprint = param(req, res, "sprint");
    if (!sprint) return;
    auto m = matrix();
    if (std::find(m->teams.begin(), m->teams.end(), *team) == m->teams.end()) {
      return send_error(res, 404, "UnknownTeam", "unknown team '" + *team + "'");
    }
    const engine::ScoreCell* cell = m->find(*team, *sprint);
    if (!cell) return send_error(res, 404, "UnknownSprint", "unknown sprint '" + *sprint + "'");
    json categories = json::array();
    for (const auto& [name, score] : cell->category_scores) {
      categories.push_back({{"name", name}, {"score", score_json(score)}});
    }
    json metrics = json::array();
    for (const auto* r : sorted_results(*cell)) {
      metrics.push_back({{"id", r->metric_id},
                         {"name", r->metric_name},
                         {"category", r->category},
                         {"severity", scoring::to_string(r->severity)},
                         {"weight", r->weight},
                         {"revision", r->metric_revision},
                         {"status", engine::to_string(r->status)},
                         {"score", score_json(r->score)},
                         {"message", r->message},
                         {"violation_count", r->violations.size()}});
    }
    send(res, 200,
         {{"team", *team},
          {"sprint", *sprint},
          {"data_version", m->data_version.digest},
          {"overall", score_json(cell->overall)},
          {"categories", std::move(categories)},
          {"metrics", std::move(metrics)}});
  });

  s.Get("/api/violations", [this](const httplib::Request& req, httplib::Response& res) {
    auto metric = param(req, res, "metric");
    if (!metric) return;
    auto team = param(req, res, "team");
    if (!team) return;
    auto sprint = param(req, res, "sprint");
    if (!sprint) return;
    auto m = matrix();
    if (std::find(m->teams.begin(), m->teams.end(), *team) == m->teams.end()) {
      return send_error(res, 404, "UnknownTeam", "unknown team '" + *team + "'");
    }
    const engine::ScoreCell* cell = m->find(*team, *sprint);
    if (!cell) return send_error(res, 404, "UnknownSprint", "unknown sprint '" + *sprint + "'");
    auto it = std::find_if(cell->results.begin(), cell->results.end(),
                           [&](const auto& r) { return r.metric_id == *metric; });
    if (it == cell->results.end()) return send_error(res, 404, "UnknownMetric", "unknown metric '" + *metric + "'");
    json violations = json::array();
    for (const auto& v : it->violations) {
      json columns = json::array();
      for (const auto& [name, value] : v.columns) columns.push_back({{"name", name}, {"value", value}});
      violations.push_back(
          {{"artifact_kind", v.artifact_kind}, {"artifact_ref", v.artifact_ref}, {"columns", std::move(columns)}});
    }
    json bindings = json::object();
    for (const auto& [k, v] : it->bindings) bindings[k] = v;
    send(res, 200,
         {{"metric", *metric},
          {"team", *team},
          {"sprint", *sprint},
          {"revision", it->metric_revision},
          {"status", engine::to_string(it->status)},
          {"score", score_json(it->score)},
          {"bindings", std::move(bindings)},
          {"violations", std::move(violations)}});
  });

  s.Get("/api/radar", [this](const httplib::Request& req, httplib::Response& res) {
    auto sprint = param(req, res, "sprint");
    if (!sprint) return;
    auto m = matrix();
    if (std::find(m->sprints.begin(), m->sprints.end(), *sprint) == m->sprints.end()) {
      return send_error(res, 404, "UnknownSprint", "unknown sprint '" + *sprint + "'");
    }
    json teams = json::array();
    for (const auto& team : m->teams) {
      const engine::ScoreCell* cell = m->find(team, *sprint);
      json scores = json::array();
      for (const auto& category : m->categories) {
        std::optional<double> score;
        if (cell) {
          for (const auto& [name, s] : cell->category_scores) {
            if (name == category) score = s;
          }
        }
        scores.push_back(score_json(score));
      }
      teams.push_back({{"team", team}, {"scores", std::move(scores)}});
    }
    send(res, 200, {{"sprint", *sprint}, {"categories", m->categories}, {"teams", std::move(teams)}});
  });

  s.Get("/api/trend", [this](const httplib::Request& req, httplib::Response& res) {
    auto team = param(req, res, "team");
    if (!team) return;
    std::string selector = req.has_param("metric") ? req.get_param_value("metric") : "overall";
    auto m = matrix();
    try {
      json points = json::array();
      for (const auto& p : engine::trend(*m, *team, selector)) {
        json ordinal = nullptr;
        for (const auto& sp : engine_.sprints()) {
          if (sp.title == p.sprint) ordinal = sp.ordinal;
        }
        points.push_back({{"sprint", p.sprint},
                          {"ordinal", ordinal},
                          {"score", score_json(p.score)},
                          {"gap", !p.score.has_value()}});
      }
      send(res, 200, {{"team", *team}, {"selector", selector}, {"points", std::move(points)}});
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), to_string(e.code()), e.what());
    }
  });

  if (options_.static_dir) s.set_mount_point("/", *options_.static_dir);

  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "InternalError", e.what());
    }
  });
}

int ApiServer::bind() {
  int port = options_.port;
  if (port == 0) {
    port = http_->bind_to_any_port(options_.host);
  } else if (!http_->bind_to_port(options_.host, port)) {
    port = -1;
  }
  if (port < 0) throw Error(ErrorCode::NetworkError, "cannot bind " + options_.host + ":" + std::to_string(options_.port));
  return port;
}

void ApiServer::serve() { http_->listen_after_bind(); }

int ApiServer::start() {
  int port = bind();
  thread_ = std::thread([this] { serve(); });
  http_->wait_until_ready();
  return port;
}

void ApiServer::stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace agilelint::service
