#include "agilelint/remote.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <httplib.h>

#include "agilelint/error.hpp"
#include "agilelint/time.hpp"

namespace agilelint::ingest {

namespace {

using nlohmann::json;

constexpr int kPerPage = 100;

class GithubClient {
 public:
  explicit GithubClient(const RemoteOptions& options)
      : options_(options), client_(options.base_url) {
    if (!client_.is_valid()) throw Error(ErrorCode::NetworkError, "invalid base url '" + options.base_url + "'");
    client_.set_connection_timeout(options.timeout_seconds);
    client_.set_read_timeout(options.timeout_seconds);
    client_.set_follow_location(true);
  }

  json get(const std::string& path) {
    httplib::Headers headers{{"Accept", "application/vnd.github+json"}, {"User-Agent", "agilelint"}};
    if (!options_.token.empty()) headers.emplace("Authorization", "Bearer " + options_.token);
    auto res = client_.Get(path, headers);
    if (!res) {
      throw Error(ErrorCode::NetworkError,
                  "request to " + options_.base_url + path + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status == 401) throw Error(ErrorCode::AuthFailure, "credentials rejected for " + path);
    if (res->status == 403 || res->status == 429) {
      bool exhausted = res->get_header_value("X-RateLimit-Remaining") == "0" || res->has_header("Retry-After");
      if (exhausted) throw RateLimited(retry_after(*res), "rate limit exhausted for " + path);
      if (res->status == 403) throw Error(ErrorCode::AuthFailure, "access forbidden for " + path);
    }
    if (res->status < 200 || res->status >= 300) {
      throw Error(ErrorCode::NetworkError, "unexpected status " + std::to_string(res->status) + " for " + path);
    }
    try {
      return json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::NetworkError, "malformed JSON from " + path + ": " + e.what());
    }
  }

  /// Concatenates every page of a listing endpoint.
  json list(const std::string& path) {
    json out = json::array();
    char sep = path.find('?') == std::string::npos ? '?' : '&';
    for (int page = 1; options_.max_pages == 0 || page <= options_.max_pages; ++page) {
      json items = get(path + sep + "per_page=" + std::to_string(kPerPage) + "&page=" + std::to_string(page));
      if (!items.is_array()) throw Error(ErrorCode::NetworkError, "expected an array from " + path);
      for (auto& item : items) out.push_back(std::move(item));
      if (items.size() < std::size_t(kPerPage)) break;
    }
    return out;
  }

 private:
  static long retry_after(const httplib::Response& res) {
    if (res.has_header("Retry-After")) {
      try {
        return std::stol(res.get_header_value("Retry-After"));
      } catch (const std::exception&) {
      }
    }
    if (res.has_header("X-RateLimit-Reset")) {
      try {
        long reset = std::stol(res.get_header_value("X-RateLimit-Reset"));
        return std::max(0L, reset - long(now_utc().seconds));
      } catch (const std::exception&) {
      }
    }
    return 60;
  }

  const RemoteOptions& options_;
  httplib::Client client_;
};

std::string text_or_empty(const json& object, const char* key) {
  auto it = object.find(key);
  return it != object.end() && it->is_string() ? it->get<std::string>() : std::string();
}

json nullable_text(const json& object, const char* key) {
  auto it = object.find(key);
  return it != object.end() && it->is_string() ? *it : json(nullptr);
}

/// `object.key.field` as a string or null.
json nested_text(const json& object, const char* key, const char* field) {
  auto it = object.find(key);
  if (it == object.end() || !it->is_object()) return nullptr;
  return nullable_text(*it, field);
}

}  // namespace

RemoteExport fetch_remote(const RemoteOptions& options) {
  if (options.repository.find('/') == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "repository must look like owner/name");
  }
  GithubClient client(options);
  const std::string repo = "/repos/" + options.repository;

  json milestones = json::array();
  for (const auto& m : client.list(repo + "/milestones?state=all")) {
    milestones.push_back({{"title", text_or_empty(m, "title")}, {"due_on", nullable_text(m, "due_on")}});
  }

  json issues = json::array();
  for (const auto& item : client.list(repo + "/issues?state=all")) {
    if (item.contains("pull_request")) continue;
    int number = item.value("number", 0);
    json labels = json::array();
    for (const auto& l : item.value("labels", json::array())) {
      if (l.is_object()) labels.push_back(text_or_empty(l, "name"));
    }
    json events = json::array();
    for (const auto& e : client.list(repo + "/issues/" + std::to_string(number) + "/events")) {
      events.push_back({{"event", text_or_empty(e, "event")},
                        {"milestone_title", nested_text(e, "milestone", "title")},
                        {"created_at", text_or_empty(e, "created_at")},
                        {"actor", nested_text(e, "actor", "login")}});
    }
    issues.push_back({{"number", number},
                      {"title", text_or_empty(item, "title")},
                      {"body", text_or_empty(item, "body")},
                      {"url", text_or_empty(item, "html_url")},
                      {"created_at", text_or_empty(item, "created_at")},
                      {"state", text_or_empty(item, "state")},
                      {"labels", std::move(labels)},
                      {"milestone", nested_text(item, "milestone", "title")},
                      {"estimate", nullptr},
                      {"events", std::move(events)}});
  }

  json commits = json::array();
  for (const auto& summary : client.list(repo + "/commits")) {
    std::string sha = text_or_empty(summary, "sha");
    json detail = client.get(repo + "/commits/" + sha);
    const json& commit = detail.value("commit", json::object());
    json author = nested_text(detail, "author", "login");
    if (author.is_null()) author = nested_text(commit, "author", "name");
    json parents = json::array();
    for (const auto& p : detail.value("parents", json::array())) parents.push_back(text_or_empty(p, "sha"));
    json files = json::array();
    for (const auto& f : detail.value("files", json::array())) {
      files.push_back({{"path", text_or_empty(f, "filename")},
                       {"additions", f.value("additions", 0)},
                       {"deletions", f.value("deletions", 0)}});
    }
    commits.push_back({{"sha", sha},
                       {"message", text_or_empty(commit, "message")},
                       {"author", author.is_null() ? json("unknown") : author},
                       {"authored_at", nested_text(commit, "author", "date")},
                       {"parents", std::move(parents)},
                       {"complexity", nullptr},
                       {"files", std::move(files)}});
  }

  return {{{"issues", std::move(issues)}, {"milestones", std::move(milestones)}},
          {{"commits", std::move(commits)}}};
}

void fetch_remote_to(const RemoteOptions& options, const std::string& directory) {
  RemoteExport exported = fetch_remote(options);
  std::filesystem::create_directories(directory);
  std::ofstream(std::filesystem::path(directory) / "issues.json") << exported.issues.dump(2) << '\n';
  std::ofstream(std::filesystem::path(directory) / "commits.json") << exported.commits.dump(2) << '\n';
}

}  // namespace agilelint::ingest
