#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "agilelint/error.hpp"
#include "agilelint/ingest.hpp"
#include "schema.hpp"

namespace agilelint::ingest {

namespace {

using namespace detail;

struct EventRecord {
  std::string event;
  std::optional<std::string> milestone_title;
  Timestamp created_at;
  std::optional<std::string> actor;
};

struct IssueRecord {
  std::int64_t number = 0;
  std::string title;
  std::string body;
  std::string url;
  Timestamp created_at;
  std::string state;
  std::vector<std::string> labels;
  std::optional<std::string> milestone;
  std::optional<double> estimate;
  std::vector<EventRecord> events;
};

struct MilestoneRecord {
  std::string title;
  std::optional<Timestamp> due_on;
};

struct FileChange {
  std::string path;
  std::int64_t additions = 0;
  std::int64_t deletions = 0;
};

struct CommitRecord {
  std::string sha;
  std::string message;
  std::string author;
  Timestamp authored_at;
  std::vector<std::string> parents;
  std::optional<double> complexity;
  std::vector<FileChange> files;
};

struct TestRunRecord {
  std::string commit;
  std::int64_t passed = 0;
  std::int64_t failed = 0;
  std::optional<double> coverage;
};

bool is_sha(const std::string& text) {
  return text.size() == 40 &&
         std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isxdigit(c); });
}

std::string require_sha(const json& object, const std::string& key, const std::string& path) {
  std::string sha = require_string(object, key, path);
  if (!is_sha(sha)) throw SchemaViolation(at(path, key), "expected 40 hex characters");
  return sha;
}

/// Counts additions so a report can be built without re-walking the store.
class Writer {
 public:
  explicit Writer(GraphStore& store) : store_(store) {}

  NodeId node(NodeLabel label, Properties props) {
    ++report.nodes_added;
    return store_.add_node(label, std::move(props));
  }

  void edge(NodeId source, RelType type, NodeId target, Properties props = {}) {
    ++report.edges_added;
    store_.add_edge(source, type, target, std::move(props));
  }

  /// Existing node with `key == value`, else a new one.
  NodeId unique(NodeLabel label, const std::string& key, const std::string& value) {
    auto found = store_.find(label, key, value);
    if (!found.empty()) return found.front();
    return node(label, {{key, value}});
  }

  GraphStore& store() { return store_; }
  LoadReport report;

 private:
  GraphStore& store_;
};

std::vector<MilestoneRecord> parse_milestones(const json& document) {
  std::vector<MilestoneRecord> out;
  const json* list = optional_field(document, "milestones");
  if (!list) return out;
  if (!list->is_array()) throw SchemaViolation("$.milestones", "expected an array");
  for (std::size_t k = 0; k < list->size(); ++k) {
    std::string path = at("$.milestones", k);
    const json& m = require_object((*list)[k], path);
    out.push_back({require_string(m, "title", path), optional_timestamp(m, "due_on", path)});
  }
  return out;
}

std::vector<IssueRecord> parse_issues(const json& document) {
  require_object(document, "$");
  const json& issues = require_array(document, "issues", "$");
  std::vector<IssueRecord> out;
  std::set<std::int64_t> numbers;
  for (std::size_t k = 0; k < issues.size(); ++k) {
    std::string path = at("$.issues", k);
    const json& item = require_object(issues[k], path);
    IssueRecord r;
    r.number = require_int(item, "number", path);
    if (r.number <= 0) throw SchemaViolation(at(path, "number"), "must be a positive integer");
    r.title = require_string(item, "title", path);
    r.body = require_string(item, "body", path);
    r.url = require_string(item, "url", path);
    r.created_at = require_timestamp(item, "created_at", path);
    r.state = require_string(item, "state", path);
    if (r.state != "open" && r.state != "closed") {
      throw SchemaViolation(at(path, "state"), "expected \"open\" or \"closed\"");
    }
    const json& labels = require_array(item, "labels", path);
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (!labels[j].is_string()) throw SchemaViolation(at(at(path, "labels"), j), "expected a string");
      r.labels.push_back(labels[j].get<std::string>());
    }
    r.milestone = optional_string(item, "milestone", path);
    r.estimate = optional_number(item, "estimate", path);
    if (r.estimate && *r.estimate < 0) throw SchemaViolation(at(path, "estimate"), "must be >= 0");
    const json& events = require_array(item, "events", path);
    for (std::size_t j = 0; j < events.size(); ++j) {
      std::string epath = at(at(path, "events"), j);
      const json& e = require_object(events[j], epath);
      EventRecord ev;
      ev.event = require_string(e, "event", epath);
      ev.milestone_title = optional_string(e, "milestone_title", epath);
      ev.created_at = require_timestamp(e, "created_at", epath);
      ev.actor = optional_string(e, "actor", epath);
      if ((ev.event == "milestoned" || ev.event == "demilestoned") && !ev.milestone_title) {
        throw SchemaViolation(at(epath, "milestone_title"), "required for " + ev.event + " events");
      }
      r.events.push_back(std::move(ev));
    }
    if (!numbers.insert(r.number).second) {
      throw Error(ErrorCode::DuplicateIssueNumber,
                  "issue number " + std::to_string(r.number) + " appears twice (" + path + ")");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CommitRecord> parse_commits(const json& document) {
  require_object(document, "$");
  const json& commits = require_array(document, "commits", "$");
  std::vector<CommitRecord> out;
  std::set<std::string> shas;
  for (std::size_t k = 0; k < commits.size(); ++k) {
    std::string path = at("$.commits", k);
    const json& item = require_object(commits[k], path);
    CommitRecord r;
    r.sha = require_sha(item, "sha", path);
    r.message = require_string(item, "message", path);
    r.author = require_string(item, "author", path);
    r.authored_at = require_timestamp(item, "authored_at", path);
    if (optional_field(item, "parents")) {
      const json& parents = require_array(item, "parents", path);
      for (std::size_t j = 0; j < parents.size(); ++j) {
        std::string ppath = at(at(path, "parents"), j);
        if (!parents[j].is_string() || !is_sha(parents[j].get<std::string>())) {
          throw SchemaViolation(ppath, "expected 40 hex characters");
        }
        r.parents.push_back(parents[j].get<std::string>());
      }
    }
    r.complexity = optional_number(item, "complexity", path);
    const json& files = require_array(item, "files", path);
    for (std::size_t j = 0; j < files.size(); ++j) {
      std::string fpath = at(at(path, "files"), j);
      const json& f = require_object(files[j], fpath);
      r.files.push_back({require_string(f, "path", fpath), require_non_negative(f, "additions", fpath),
                         require_non_negative(f, "deletions", fpath)});
    }
    if (!shas.insert(r.sha).second) {
      throw Error(ErrorCode::DuplicateSha, "commit " + r.sha + " appears twice (" + path + ")");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TestRunRecord> parse_runs(const json& document) {
  require_object(document, "$");
  const json& runs = require_array(document, "runs", "$");
  std::vector<TestRunRecord> out;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    std::string path = at("$.runs", k);
    const json& item = require_object(runs[k], path);
    TestRunRecord r;
    r.commit = require_sha(item, "commit", path);
    r.passed = require_non_negative(item, "passed", path);
    r.failed = require_non_negative(item, "failed", path);
    r.coverage = optional_number(item, "coverage", path);
    if (r.coverage && (*r.coverage < 0 || *r.coverage > 1)) {
      throw SchemaViolation(at(path, "coverage"), "must lie in [0, 1]");
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Issue numbers referenced as "#N" in a commit message, in order of first
/// appearance.
std::vector<std::int64_t> issue_references(const std::string& message) {
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < message.size(); ++i) {
    if (message[i] != '#') continue;
    std::size_t j = i + 1;
    std::int64_t n = 0;
    while (j < message.size() && std::isdigit(static_cast<unsigned char>(message[j])) && j - i < 18) {
      n = n * 10 + (message[j] - '0');
      ++j;
    }
    if (j > i + 1 && std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  return out;
}

}  // namespace

LoadReport load_issue_export(const json& document, GraphStore& store) {
  auto issues = parse_issues(document);
  auto milestones = parse_milestones(document);
  for (const auto& r : issues) {
    if (!store.find(NodeLabel::Issue, "number", r.number).empty()) {
      throw Error(ErrorCode::DuplicateIssueNumber,
                  "issue number " + std::to_string(r.number) + " is already loaded");
    }
  }

  Writer w(store);
  auto milestone = [&](const std::string& title) { return w.unique(NodeLabel::Milestone, "title", title); };
  for (const auto& m : milestones) {
    auto existing = store.find(NodeLabel::Milestone, "title", m.title);
    if (existing.empty()) {
      Properties props{{"title", m.title}};
      if (m.due_on) props.emplace("due_on", *m.due_on);
      w.node(NodeLabel::Milestone, std::move(props));
    } else if (m.due_on && !store.node(existing.front()).find("due_on")) {
      // Properties are immutable once stored.
      w.report.warnings.push_back("milestone '" + m.title + "' already loaded without a due date");
    }
  }
  for (const auto& r : issues) {
    Properties props{{"number", r.number}, {"title", r.title},       {"body", r.body},
                     {"url", r.url},       {"created_at", r.created_at}, {"state", r.state}};
    if (r.estimate) props.emplace("estimate", *r.estimate);
    NodeId issue = w.node(NodeLabel::Issue, std::move(props));
    std::set<std::string> seen_labels;
    for (const auto& name : r.labels) {
      if (!seen_labels.insert(name).second) continue;
      w.edge(issue, RelType::labels, w.unique(NodeLabel::Label, "name", name));
    }
    for (const auto& ev : r.events) {
      Properties eprops{{"event", ev.event}, {"created_at", ev.created_at}};
      if (ev.milestone_title) {
        eprops.emplace("milestone_title", *ev.milestone_title);
        milestone(*ev.milestone_title);
      }
      if (ev.actor) eprops.emplace("actor", *ev.actor);
      w.edge(w.node(NodeLabel::Event, std::move(eprops)), RelType::issue, issue);
    }
    if (r.milestone) w.edge(issue, RelType::milestone, milestone(*r.milestone));
  }
  return w.report;
}

LoadReport load_commit_export(const json& document, GraphStore& store) {
  auto commits = parse_commits(document);
  for (const auto& r : commits) {
    if (!store.find(NodeLabel::Commit, "sha", r.sha).empty()) {
      throw Error(ErrorCode::DuplicateSha, "commit " + r.sha + " is already loaded");
    }
  }

  Writer w(store);
  std::map<std::string, NodeId> by_sha;
  for (const auto& r : commits) {
    std::int64_t additions = 0;
    std::int64_t deletions = 0;
    for (const auto& f : r.files) {
      additions += f.additions;
      deletions += f.deletions;
    }
    Properties props{{"sha", r.sha},
                     {"message", r.message},
                     {"author", r.author},
                     {"authored_at", r.authored_at},
                     {"additions", additions},
                     {"deletions", deletions},
                     {"files", std::int64_t(r.files.size())}};
    if (r.complexity) props.emplace("complexity", *r.complexity);
    NodeId commit = w.node(NodeLabel::Commit, std::move(props));
    by_sha.emplace(r.sha, commit);
    w.edge(commit, RelType::author, w.unique(NodeLabel::Developer, "login", r.author));
    for (const auto& f : r.files) {
      w.edge(commit, RelType::changes, w.unique(NodeLabel::File, "path", f.path),
             {{"additions", f.additions}, {"deletions", f.deletions}});
    }
    for (std::int64_t number : issue_references(r.message)) {
      auto issues = store.find(NodeLabel::Issue, "number", number);
      if (!issues.empty()) w.edge(commit, RelType::issue, issues.front());
    }
  }
  // Parents may appear later in the export than their children.
  for (const auto& r : commits) {
    for (const auto& parent : r.parents) {
      auto it = by_sha.find(parent);
      std::optional<NodeId> target;
      if (it != by_sha.end()) {
        target = it->second;
      } else if (auto found = store.find(NodeLabel::Commit, "sha", parent); !found.empty()) {
        target = found.front();
      }
      if (target) {
        w.edge(by_sha.at(r.sha), RelType::parent, *target);
      } else {
        w.report.warnings.push_back("commit " + r.sha + ": unknown parent " + parent);
      }
    }
  }
  return w.report;
}

LoadReport load_test_runs(const json& document, GraphStore& store) {
  auto runs = parse_runs(document);
  Writer w(store);
  for (const auto& r : runs) {
    Properties props{{"commit", r.commit}, {"passed", r.passed}, {"failed", r.failed}};
    if (r.coverage) props.emplace("coverage", *r.coverage);
    NodeId run = w.node(NodeLabel::TestRun, std::move(props));
    auto commits = store.find(NodeLabel::Commit, "sha", r.commit);
    if (commits.empty()) {
      w.report.warnings.push_back("test run for unknown commit " + r.commit);
    } else {
      w.edge(commits.front(), RelType::tested_by, run);
    }
  }
  return w.report;
}

LoadedProject load_project(const json& issues, const json& commits, const json& runs) {
  LoadedProject out;
  auto merge = [&](const LoadReport& r) {
    out.report.nodes_added += r.nodes_added;
    out.report.edges_added += r.edges_added;
    out.report.warnings.insert(out.report.warnings.end(), r.warnings.begin(), r.warnings.end());
  };
  if (!issues.is_null()) merge(load_issue_export(issues, out.store));
  if (!commits.is_null()) merge(load_commit_export(commits, out.store));
  if (!runs.is_null()) merge(load_test_runs(runs, out.store));
  return out;
}

}  // namespace agilelint::ingest
