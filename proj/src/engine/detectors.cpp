#include "agilelint/engine/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace agilelint::engine {

namespace {

using mql::BindingTable;
using mql::NodeRef;
using mql::Value;

const std::string* text(const Node& node, std::string_view key) {
  const PropertyValue* v = node.find(key);
  return v ? std::get_if<std::string>(v) : nullptr;
}

std::optional<Timestamp> time_of(const Node& node, std::string_view key) {
  const PropertyValue* v = node.find(key);
  const Timestamp* t = v ? std::get_if<Timestamp>(v) : nullptr;
  return t ? std::optional(*t) : std::nullopt;
}

bool has_label(const GraphStore& store, NodeId issue, std::string_view team_label) {
  for (const auto& inc : store.neighbors(issue, RelType::labels, Direction::any)) {
    const Node& l = store.node(inc.node);
    if (l.label != NodeLabel::Label) continue;
    const std::string* name = text(l, "name");
    if (name && *name == team_label) return true;
  }
  return false;
}

double param(const DetectorInput& in, std::string_view name) { return in.params.find(name)->second; }

BindingTable duplicate_titles(const DetectorInput& in) {
  BindingTable out{{"Issue", "Original", "Similarity"}, {}};
  auto backlog = sprint_backlog(in.store, in.team_label, in.sprint.title);
  double threshold = param(in, "sim_threshold");

  struct Entry {
    NodeId id;
    std::int64_t number;
    std::vector<std::string> tokens;
  };
  std::vector<Entry> entries;
  for (NodeId id : backlog) {
    const Node& issue = in.store.node(id);
    const PropertyValue* n = issue.find("number");
    const std::string* title = text(issue, "title");
    if (!title) continue;
    std::int64_t number = n && std::holds_alternative<std::int64_t>(*n) ? std::get<std::int64_t>(*n) : id;
    entries.push_back({id, number, title_tokens(*title)});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.number, a.id) < std::tie(b.number, b.id);
  });
  for (std::size_t newer = 0; newer < entries.size(); ++newer) {
    for (std::size_t older = 0; older < newer; ++older) {
      if (entries[newer].tokens.empty() || entries[older].tokens.empty()) continue;
      double similarity = jaccard(entries[newer].tokens, entries[older].tokens);
      if (similarity >= threshold) {
        out.rows.push_back({Value(NodeRef{entries[newer].id}), Value(NodeRef{entries[older].id}), Value(similarity)});
      }
    }
  }
  return out;
}

BindingTable untested_commits(const DetectorInput& in) {
  BindingTable out{{"Commit", "AuthoredAt"}, {}};
  for (NodeId c : team_commits(in.store, in.team_label, in.sprint)) {
    bool tested = false;
    for (const auto& inc : in.store.neighbors(c, RelType::tested_by, Direction::out)) {
      tested = tested || in.store.node(inc.node).label == NodeLabel::TestRun;
    }
    if (tested) continue;
    auto at = time_of(in.store.node(c), "authored_at");
    out.rows.push_back({Value(NodeRef{c}), at ? Value(*at) : Value()});
  }
  return out;
}

BindingTable sprint_end_rush(const DetectorInput& in) {
  BindingTable out{{"Commit", "AuthoredAt", "LateShare"}, {}};
  auto commits = team_commits(in.store, in.team_label, in.sprint);
  if (commits.empty()) return out;
  Timestamp crunch{in.sprint.end.seconds - std::int64_t(param(in, "crunch_hours") * 3600)};
  std::vector<std::pair<NodeId, Timestamp>> late;
  for (NodeId c : commits) {
    auto at = time_of(in.store.node(c), "authored_at");
    if (at && *at >= crunch) late.emplace_back(c, *at);
  }
  double share = double(late.size()) / double(commits.size());
  if (share <= param(in, "max_share")) return out;
  for (const auto& [c, at] : late) out.rows.push_back({Value(NodeRef{c}), Value(at), Value(share)});
  return out;
}

const std::vector<Detector>& registry() {
  static const std::vector<Detector> detectors = {
      {"duplicate_titles", {"Issue", "Original", "Similarity"}, {"sim_threshold"}, duplicate_titles},
      {"sprint_end_rush", {"Commit", "AuthoredAt", "LateShare"}, {"crunch_hours", "max_share"}, sprint_end_rush},
      {"untested_commits", {"Commit", "AuthoredAt"}, {}, untested_commits},
  };
  return detectors;
}

}  // namespace

const Detector* find_detector(std::string_view name) {
  for (const auto& d : registry()) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::vector<std::string> detector_names() {
  std::vector<std::string> out;
  for (const auto& d : registry()) out.push_back(d.name);
  return out;
}

std::vector<NodeId> sprint_backlog(const GraphStore& store, std::string_view team_label,
                                   std::string_view sprint_title) {
  std::set<NodeId> out;
  for (NodeId e : store.find(NodeLabel::Event, "milestone_title", std::string(sprint_title))) {
    const std::string* kind = text(store.node(e), "event");
    if (!kind || *kind != "milestoned") continue;
    for (const auto& inc : store.neighbors(e, RelType::issue, Direction::any)) {
      if (store.node(inc.node).label == NodeLabel::Issue && has_label(store, inc.node, team_label)) {
        out.insert(inc.node);
      }
    }
  }
  return {out.begin(), out.end()};
}

std::vector<NodeId> team_commits(const GraphStore& store, std::string_view team_label,
                                 const ingest::SprintDescriptor& sprint) {
  std::vector<NodeId> out;
  for (NodeId c : store.nodes_with_label(NodeLabel::Commit)) {
    auto at = time_of(store.node(c), "authored_at");
    if (!at || *at < sprint.start || !(*at < sprint.end)) continue;
    for (const auto& inc : store.neighbors(c, RelType::issue, Direction::any)) {
      if (store.node(inc.node).label == NodeLabel::Issue && has_label(store, inc.node, team_label)) {
        out.push_back(c);
        break;
      }
    }
  }
  return out;
}

std::vector<std::string> title_tokens(std::string_view title) {
  std::set<std::string> tokens;
  std::string current;
  for (char ch : title) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!current.empty()) tokens.insert(std::move(current));
      current.clear();
    } else if (!std::ispunct(c)) {
      current.push_back(char(std::tolower(c)));
    }
  }
  if (!current.empty()) tokens.insert(std::move(current));
  return {tokens.begin(), tokens.end()};
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  std::size_t total = a.size() + b.size() - common.size();
  return total == 0 ? 0.0 : double(common.size()) / double(total);
}

}  // namespace agilelint::engine
