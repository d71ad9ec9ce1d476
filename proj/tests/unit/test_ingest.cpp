#include <doctest.h>

#include <httplib.h>

#include <map>
#include <set>
#include <thread>

#include "agilelint/error.hpp"
#include "agilelint/fixture.hpp"
#include "agilelint/ingest.hpp"
#include "agilelint/remote.hpp"
#include "agilelint/snapshot.hpp"
#include "builders.hpp"

using namespace agilelint;
using namespace agilelint::ingest;
using agilelint::testing::issue_export;
using agilelint::testing::StorySpec;
using nlohmann::json;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidConfig;
}

std::string schema_path(auto&& fn) {
  try {
    fn();
  } catch (const SchemaViolation& e) {
    return e.path();
  }
  FAIL("expected a SchemaViolation");
  return {};
}

const std::string kSha1(40, 'a');
const std::string kSha2(40, 'b');

json one_commit(const std::string& sha, const std::string& message = "Add login form") {
  return {{"sha", sha},
          {"message", message},
          {"author", "alice"},
          {"authored_at", "2026-01-06T09:00:00Z"},
          {"parents", json::array()},
          {"files",
           {{{"path", "src/a.cpp"}, {"additions", 10}, {"deletions", 1}},
            {{"path", "src/b.cpp"}, {"additions", 4}, {"deletions", 0}},
            {{"path", "README.md"}, {"additions", 1}, {"deletions", 1}}}}};
}

GraphStore with_milestones(const std::vector<std::string>& titles) {
  GraphStore g;
  for (const auto& t : titles) g.add_node(NodeLabel::Milestone, {{"title", t}});
  return g;
}

std::vector<std::string> sprint_titles(const std::vector<SprintDescriptor>& s) {
  std::vector<std::string> out;
  for (const auto& d : s) out.push_back(d.title);
  return out;
}

std::optional<std::string> text(const GraphStore& g, NodeId n, const char* key) {
  const PropertyValue* p = g.node(n).find(key);
  if (!p || !std::holds_alternative<std::string>(*p)) return std::nullopt;
  return std::get<std::string>(*p);
}

/// Fake GitHub REST API on a free local port.
class FakeGithub {
 public:
  FakeGithub() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeGithub() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

void reply(httplib::Response& res, const json& body) { res.set_content(body.dump(), "application/json"); }

}  // namespace

TEST_CASE("an empty export adds nothing") {
  GraphStore g;
  auto report = load_issue_export({{"issues", json::array()}}, g);
  CHECK(report.nodes_added == 0);
  CHECK(report.edges_added == 0);
  CHECK(g.node_count() == 0);
}

TEST_CASE("issue export hand counts") {
  GraphStore g;
  StorySpec s{.number = 1, .labels = {"team-red", "bug"}, .sprints = {1, 2, 3}};
  json doc = issue_export({s}, 3);
  // One issue, two labels, three milestones, three milestoned and two
  // demilestoned events.
  auto report = load_issue_export(doc, g);
  CHECK(g.nodes_with_label(NodeLabel::Issue).size() == 1);
  CHECK(g.nodes_with_label(NodeLabel::Label).size() == 2);
  CHECK(g.nodes_with_label(NodeLabel::Milestone).size() == 3);
  CHECK(g.nodes_with_label(NodeLabel::Event).size() == 5);
  CHECK(g.node_count() == 11);
  // labels x2, issue x5, milestone x1
  CHECK(g.edge_count() == 8);
  CHECK(report.nodes_added == g.node_count());
  CHECK(report.edges_added == g.edge_count());
  NodeId issue = g.find(NodeLabel::Issue, "number", std::int64_t(1)).at(0);
  CHECK(g.neighbors(issue, RelType::issue, Direction::in).size() == 5);
  auto ms = g.neighbors(issue, RelType::milestone, Direction::out);
  REQUIRE(ms.size() == 1);
  CHECK(text(g, ms[0].node, "title") == "Sprint 03");
}

TEST_CASE("labels and milestones are shared between issues") {
  GraphStore g;
  load_issue_export(issue_export({{.number = 1, .labels = {"team-red", "team-red"}, .sprints = {1}},
                                  {.number = 2, .labels = {"team-red"}, .sprints = {1}}},
                                 1),
                    g);
  CHECK(g.nodes_with_label(NodeLabel::Label).size() == 1);
  CHECK(g.nodes_with_label(NodeLabel::Milestone).size() == 1);
  NodeId one = g.find(NodeLabel::Issue, "number", std::int64_t(1)).at(0);
  CHECK(g.neighbors(one, RelType::labels, Direction::out).size() == 1);
  CHECK(code_of([&] { load_issue_export(issue_export({{.number = 2}}, 0), g); }) ==
        ErrorCode::DuplicateIssueNumber);
}

TEST_CASE("issue export schema violations name the path and leave the store alone") {
  GraphStore g;
  json doc = issue_export({{.number = 1, .sprints = {1}}, {.number = 2, .sprints = {1}}}, 1);
  doc["issues"][1]["state"] = "merged";
  CHECK(schema_path([&] { load_issue_export(doc, g); }) == "$.issues[1].state");
  CHECK(g.node_count() == 0);

  doc = issue_export({{.number = 1, .sprints = {1}}}, 1);
  doc["issues"][0]["events"][0].erase("milestone_title");
  CHECK(schema_path([&] { load_issue_export(doc, g); }) == "$.issues[0].events[0].milestone_title");
  CHECK(code_of([&] { load_issue_export(json::array(), g); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("commit export hand counts") {
  GraphStore g;
  auto report = load_commit_export({{"commits", {one_commit(kSha1)}}}, g);
  CHECK(g.nodes_with_label(NodeLabel::Commit).size() == 1);
  CHECK(g.nodes_with_label(NodeLabel::Developer).size() == 1);
  CHECK(g.nodes_with_label(NodeLabel::File).size() == 3);
  CHECK(report.nodes_added == 5);
  CHECK(report.edges_added == 4);
  NodeId c = g.find(NodeLabel::Commit, "sha", kSha1).at(0);
  CHECK(g.neighbors(c, RelType::author, Direction::out).size() == 1);
  CHECK(g.neighbors(c, RelType::changes, Direction::out).size() == 3);
  CHECK(std::get<std::int64_t>(*g.node(c).find("additions")) == 15);
  CHECK(std::get<std::int64_t>(*g.node(c).find("files")) == 3);

  json second = one_commit(kSha2);
  second["parents"] = {kSha1};
  report = load_commit_export({{"commits", {second}}}, g);
  // Same developer and files; one new commit with author, changes and parent edges.
  CHECK(report.nodes_added == 1);
  CHECK(report.edges_added == 5);
  CHECK(code_of([&] { load_commit_export({{"commits", {one_commit(kSha1)}}}, g); }) == ErrorCode::DuplicateSha);
}

TEST_CASE("commit messages link issues by number") {
  GraphStore g;
  load_issue_export(issue_export({{.number = 7}, {.number = 8}}, 0), g);
  load_commit_export({{"commits", {one_commit(kSha1, "Fix #7 and #99, see #8")}}}, g);
  NodeId c = g.find(NodeLabel::Commit, "sha", kSha1).at(0);
  std::set<std::int64_t> linked;
  for (const auto& inc : g.neighbors(c, RelType::issue, Direction::out)) {
    linked.insert(std::get<std::int64_t>(*g.node(inc.node).find("number")));
  }
  CHECK(linked == std::set<std::int64_t>{7, 8});
}

TEST_CASE("commit schema violations") {
  GraphStore g;
  json bad = one_commit(kSha1);
  bad["files"][2]["additions"] = -1;
  CHECK(schema_path([&] { load_commit_export({{"commits", {bad}}}, g); }) == "$.commits[0].files[2].additions");
  bad = one_commit("xyz");
  CHECK(schema_path([&] { load_commit_export({{"commits", {bad}}}, g); }) == "$.commits[0].sha");
  CHECK(g.node_count() == 0);
}

TEST_CASE("test runs attach to known commits") {
  GraphStore g;
  load_commit_export({{"commits", {one_commit(kSha1)}}}, g);
  std::size_t before = g.edge_count();
  auto report = load_test_runs({{"runs", {{{"commit", kSha1}, {"passed", 10}, {"failed", 0}, {"coverage", 0.8}}}}}, g);
  CHECK(report.nodes_added == 1);
  CHECK(report.edges_added == 1);
  CHECK(g.edge_count() == before + 1);
  CHECK(report.warnings.empty());

  report = load_test_runs({{"runs", {{{"commit", kSha2}, {"passed", 1}, {"failed", 1}}}}}, g);
  CHECK(report.nodes_added == 1);
  CHECK(report.edges_added == 0);
  CHECK(report.warnings.size() == 1);

  CHECK(schema_path([&] {
          load_test_runs({{"runs", {{{"commit", kSha1}, {"passed", 1}, {"failed", 0}, {"coverage", 1.3}}}}}, g);
        }) == "$.runs[0].coverage");
}

TEST_CASE("sprint extraction") {
  SUBCASE("ordered by ordinal, non-matching titles ignored") {
    auto g = with_milestones({"Sprint 02", "Sprint 01", "Release"});
    auto s = extract_sprints(g, {});
    CHECK(sprint_titles(s) == std::vector<std::string>{"Sprint 01", "Sprint 02"});
    CHECK(s[0].ordinal == 1);
    CHECK(s[1].ordinal == 2);
  }
  SUBCASE("no matching milestone") {
    CHECK(extract_sprints(with_milestones({"Release", "Backlog"}), {}).empty());
  }
  SUBCASE("two titles for one ordinal") {
    auto g = with_milestones({"Sprint 1", "Sprint 01"});
    CHECK(code_of([&] { extract_sprints(g, {}); }) == ErrorCode::AmbiguousSprintTitles);
  }
  SUBCASE("windows chain through due dates") {
    GraphStore g;
    load_issue_export(issue_export({{.number = 1, .sprints = {1, 2}}}, 2), g);
    auto s = extract_sprints(g, {});
    REQUIRE(s.size() == 2);
    CHECK(s[0].end == agilelint::testing::sprint_due(1));
    CHECK(s[1].start == s[0].end);
    CHECK(s[1].end == agilelint::testing::sprint_due(2));
    // the earliest artifact is the issue, created one second into sprint 1
    CHECK(s[0].start == Timestamp{agilelint::testing::sprint_start(1).seconds + 1});
  }
  SUBCASE("explicit windows win") {
    auto g = with_milestones({"Sprint 01"});
    ProjectConfig config;
    config.sprint_window = {{"Sprint 01", Timestamp{100}, Timestamp{200}}};
    auto s = extract_sprints(g, config);
    REQUIRE(s.size() == 1);
    CHECK(s[0].start == Timestamp{100});
    CHECK(s[0].end == Timestamp{200});
  }
}

TEST_CASE("team extraction") {
  GraphStore g;
  for (const char* name : {"team-red", "team-blue", "bug"}) g.add_node(NodeLabel::Label, {{"name", std::string(name)}});
  auto teams = extract_teams(g, {});
  REQUIRE(teams.size() == 2);
  CHECK(teams[0].name == "blue");
  CHECK(teams[0].label_name == "team-blue");
  CHECK(teams[1].name == "red");

  GraphStore plain;
  plain.add_node(NodeLabel::Label, {{"name", std::string("bug")}});
  CHECK(extract_teams(plain, {}).empty());

  ProjectConfig everything;
  everything.team_label_prefix = "";
  CHECK(extract_teams(g, everything).size() == 3);
}

TEST_CASE("project config validation") {
  CHECK(load_project_config(json::object()).team_label_prefix == "team-");
  CHECK(load_project_config({{"team_label_prefix", "squad:"}, {"unknown", 1}}).team_label_prefix == "squad:");
  CHECK(code_of([] { load_project_config({{"sprint_title_pattern", "Sprint ("}}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { load_project_config({{"sprint_title_pattern", "^Sprint \\d+$"}}); }) ==
        ErrorCode::InvalidConfig);
  CHECK(code_of([] { load_project_config({{"team_label_prefix", 3}}); }) == ErrorCode::InvalidConfig);
  json overlapping = {{"sprint_window",
                       {{{"title", "Sprint 01"}, {"start", "2026-01-01T00:00:00Z"}, {"end", "2026-01-15T00:00:00Z"}},
                        {{"title", "Sprint 02"}, {"start", "2026-01-10T00:00:00Z"}, {"end", "2026-01-20T00:00:00Z"}}}}};
  CHECK(code_of([&] { load_project_config(overlapping); }) == ErrorCode::InvalidConfig);
  json backwards = {{"sprint_window",
                     {{{"title", "Sprint 01"}, {"start", "2026-01-15T00:00:00Z"}, {"end", "2026-01-01T00:00:00Z"}}}}};
  CHECK(code_of([&] { load_project_config(backwards); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("fixture scale parsing") {
  auto s = parse_scale("teams=2,sprints=4,neverending-story=3,inject_teams=team-red");
  CHECK(s.teams == 2);
  CHECK(s.injected.at("neverending-story") == 3);
  CHECK(s.inject_teams == std::vector<std::string>{"team-red"});
  auto full = parse_scale("");
  CHECK(full.stories == 379);
  CHECK(full.commits == 1802);
  CHECK(code_of([] { parse_scale("colour=blue"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_scale("teams=two"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("fixture is deterministic per seed") {
  auto scale = parse_scale("teams=2,sprints=3,stories=40,commits=80,file_changes=300,neverending-story=2");
  auto a = generate_fixture(42, scale);
  auto b = generate_fixture(42, scale);
  auto c = generate_fixture(43, scale);
  CHECK(a.issues == b.issues);
  CHECK(a.commits == b.commits);
  CHECK(a.runs == b.runs);
  CHECK(a.manifest == b.manifest);
  CHECK(a.commits != c.commits);

  auto pa = load_project(a.issues, a.commits, a.runs);
  auto pb = load_project(b.issues, b.commits, b.runs);
  CHECK(data_version(pa.store) == data_version(pb.store));
  CHECK(data_version(from_snapshot(to_snapshot(pa.store))) == data_version(pa.store));
}

TEST_CASE("fixture at full scale has the documented sizes") {
  auto f = generate_fixture(7, parse_scale(""));
  CHECK(f.issues["issues"].size() == 379);
  CHECK(f.commits["commits"].size() == 1802);
  std::size_t changes = 0;
  for (const auto& c : f.commits["commits"]) changes += c["files"].size();
  CHECK(changes == 26503);
  CHECK(f.manifest["violations"].empty());
}

TEST_CASE("fixture injections are visible in the graph") {
  auto scale = parse_scale(
      "teams=2,sprints=4,stories=60,commits=120,file_changes=400,neverending-story=3,monster-stories=2,"
      "silent-story=1,giant-commit=1,untested-commit=2,lottie-and-lisa=1");
  auto f = generate_fixture(42, scale);
  auto project = load_project(f.issues, f.commits, f.runs);
  const GraphStore& g = project.store;

  std::map<std::string, int> per_metric;
  for (const auto& v : f.manifest["violations"]) {
    std::string metric = v["metric"];
    std::string artifact = v["artifact"];
    ++per_metric[metric];
    CAPTURE(metric);
    CAPTURE(artifact);
    if (metric == "giant-commit" || metric == "untested-commit") {
      auto found = g.find(NodeLabel::Commit, "sha", artifact);
      REQUIRE(found.size() == 1);
      if (metric == "giant-commit") {
        bool big = false;
        for (const auto& inc : g.neighbors(found[0], RelType::changes, Direction::out)) {
          big = big || std::get<std::int64_t>(g.edge(inc.edge).props.at("additions")) > 1000;
        }
        CHECK(big);
      } else {
        CHECK(g.neighbors(found[0], RelType::tested_by, Direction::out).empty());
      }
      continue;
    }
    auto found = g.find(NodeLabel::Issue, "url", artifact);
    REQUIRE(found.size() == 1);
    const Node& issue = g.node(found[0]);
    if (metric == "neverending-story") {
      std::set<std::string> sprints;
      for (const auto& inc : g.neighbors(issue.id, RelType::issue, Direction::in)) {
        if (text(g, inc.node, "event") == "milestoned") sprints.insert(*text(g, inc.node, "milestone_title"));
      }
      CHECK(sprints.size() >= 3);
    } else if (metric == "monster-stories") {
      CHECK(std::get<double>(*issue.find("estimate")) > 8);
    } else if (metric == "silent-story") {
      CHECK(text(g, issue.id, "body") == "TBD");
    }
  }
  CHECK(per_metric["neverending-story"] == 6);
  CHECK(per_metric["monster-stories"] == 4);
  CHECK(per_metric["silent-story"] == 2);
  CHECK(per_metric["giant-commit"] == 2);
  CHECK(per_metric["untested-commit"] == 4);
  CHECK(per_metric["lottie-and-lisa"] == 2);
}

TEST_CASE("remote fetch converts the REST payloads") {
  FakeGithub gh;
  auto& s = gh.server();
  s.Get("/repos/o/r/milestones", [](const httplib::Request&, httplib::Response& res) {
    reply(res, json::array({{{"title", "Sprint 01"}, {"due_on", "2026-01-19T00:00:00Z"}}}));
  });
  s.Get("/repos/o/r/issues", [](const httplib::Request& req, httplib::Response& res) {
    if (req.get_param_value("page") != "1") return reply(res, json::array());
    reply(res, json::array({{{"number", 4},
                             {"title", "As a user I log in"},
                             {"body", nullptr},
                             {"html_url", "https://example.test/issues/4"},
                             {"created_at", "2026-01-05T10:00:00Z"},
                             {"state", "open"},
                             {"labels", {{{"name", "team-red"}}}},
                             {"milestone", {{"title", "Sprint 01"}}}},
                            {{"number", 5}, {"pull_request", json::object()}}}));
  });
  s.Get(R"(/repos/o/r/issues/(\d+)/events)", [](const httplib::Request&, httplib::Response& res) {
    reply(res, json::array({{{"event", "milestoned"},
                             {"milestone", {{"title", "Sprint 01"}}},
                             {"created_at", "2026-01-05T11:00:00Z"},
                             {"actor", {{"login", "po"}}}}}));
  });
  const std::string sha(40, 'c');
  s.Get("/repos/o/r/commits", [&](const httplib::Request&, httplib::Response& res) {
    reply(res, json::array({{{"sha", sha}}}));
  });
  s.Get(R"(/repos/o/r/commits/([0-9a-f]+))", [&](const httplib::Request&, httplib::Response& res) {
    reply(res, {{"sha", sha},
                {"author", nullptr},
                {"commit", {{"message", "Login form #4"}, {"author", {{"name", "Alice"}, {"date", "2026-01-06T09:00:00Z"}}}}},
                {"parents", json::array()},
                {"files", {{{"filename", "src/login.cpp"}, {"additions", 30}, {"deletions", 2}}}}});
  });

  auto exported = fetch_remote({.repository = "o/r", .token = "t", .base_url = gh.url(), .timeout_seconds = 5});
  REQUIRE(exported.issues["issues"].size() == 1);
  CHECK(exported.issues["issues"][0]["body"] == "");
  CHECK(exported.commits["commits"][0]["author"] == "Alice");

  auto project = load_project(exported.issues, exported.commits, nullptr);
  const GraphStore& g = project.store;
  CHECK(g.nodes_with_label(NodeLabel::Issue).size() == 1);
  NodeId c = g.find(NodeLabel::Commit, "sha", sha).at(0);
  CHECK(g.neighbors(c, RelType::issue, Direction::out).size() == 1);
  auto sprints = extract_sprints(g, {});
  REQUIRE(sprints.size() == 1);
  CHECK(format_iso8601(sprints[0].end) == "2026-01-19T00:00:00Z");
}

TEST_CASE("remote fetch failure modes") {
  SUBCASE("rejected credentials") {
    FakeGithub gh;
    gh.server().Get(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 401; });
    CHECK(code_of([&] { fetch_remote({.repository = "o/r", .base_url = gh.url()}); }) == ErrorCode::AuthFailure);
  }
  SUBCASE("exhausted quota") {
    FakeGithub gh;
    gh.server().Get(".*", [](const httplib::Request&, httplib::Response& res) {
      res.status = 429;
      res.set_header("Retry-After", "17");
    });
    try {
      fetch_remote({.repository = "o/r", .base_url = gh.url()});
      FAIL("expected RateLimited");
    } catch (const RateLimited& e) {
      CHECK(e.code() == ErrorCode::RateLimited);
      CHECK(e.retry_after_seconds() == 17);
    }
  }
  SUBCASE("forbidden without quota headers") {
    FakeGithub gh;
    gh.server().Get(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 403; });
    CHECK(code_of([&] { fetch_remote({.repository = "o/r", .base_url = gh.url()}); }) == ErrorCode::AuthFailure);
  }
  SUBCASE("server error") {
    FakeGithub gh;
    gh.server().Get(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 502; });
    CHECK(code_of([&] { fetch_remote({.repository = "o/r", .base_url = gh.url()}); }) == ErrorCode::NetworkError);
  }
  SUBCASE("nothing listening") {
    int port;
    {
      FakeGithub gh;
      port = std::stoi(gh.url().substr(gh.url().rfind(':') + 1));
    }
    RemoteOptions options{.repository = "o/r", .base_url = "http://127.0.0.1:" + std::to_string(port)};
    options.timeout_seconds = 2;
    CHECK(code_of([&] { fetch_remote(options); }) == ErrorCode::NetworkError);
  }
  SUBCASE("malformed repository") {
    CHECK(code_of([] { fetch_remote({.repository = "just-a-name"}); }) == ErrorCode::InvalidConfig);
  }
}
