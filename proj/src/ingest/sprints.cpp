#include <algorithm>
#include <map>
#include <regex>

#include "agilelint/error.hpp"
#include "agilelint/ingest.hpp"
#include "schema.hpp"

namespace agilelint::ingest {

using namespace detail;

namespace {

std::regex compile_pattern(const std::string& pattern) {
  try {
    std::regex re(pattern, std::regex::ECMAScript);
    if (re.mark_count() < 1) {
      throw Error(ErrorCode::InvalidConfig, "sprint_title_pattern needs one numeric capture group");
    }
    return re;
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::InvalidConfig, "sprint_title_pattern does not compile: " + std::string(e.what()));
  }
}

template <typename T>
std::optional<T> prop_as(const Node& node, std::string_view key) {
  const PropertyValue* v = node.find(key);
  if (!v) return std::nullopt;
  if (const T* t = std::get_if<T>(v)) return *t;
  return std::nullopt;
}

}  // namespace

void validate(const ProjectConfig& config) {
  compile_pattern(config.sprint_title_pattern);
  for (std::size_t k = 0; k < config.sprint_window.size(); ++k) {
    const auto& w = config.sprint_window[k];
    if (!(w.start < w.end)) {
      throw Error(ErrorCode::InvalidConfig, "sprint window '" + w.title + "' ends before it starts");
    }
    if (k > 0 && w.start < config.sprint_window[k - 1].end) {
      throw Error(ErrorCode::InvalidConfig,
                  "sprint window '" + w.title + "' overlaps or precedes '" + config.sprint_window[k - 1].title + "'");
    }
  }
}

ProjectConfig load_project_config(const json& document) {
  ProjectConfig config;
  try {
    require_object(document, "$");
    if (auto prefix = optional_string(document, "team_label_prefix", "$")) config.team_label_prefix = *prefix;
    if (auto pattern = optional_string(document, "sprint_title_pattern", "$")) {
      config.sprint_title_pattern = *pattern;
    }
    if (optional_field(document, "sprint_window")) {
      const json& windows = require_array(document, "sprint_window", "$");
      for (std::size_t k = 0; k < windows.size(); ++k) {
        std::string path = at("$.sprint_window", k);
        const json& w = require_object(windows[k], path);
        config.sprint_window.push_back({require_string(w, "title", path), require_timestamp(w, "start", path),
                                        require_timestamp(w, "end", path)});
      }
    }
  } catch (const SchemaViolation& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  validate(config);
  return config;
}

std::vector<SprintDescriptor> extract_sprints(const GraphStore& store, const ProjectConfig& config) {
  std::regex re = compile_pattern(config.sprint_title_pattern);

  std::map<int, std::pair<std::string, NodeId>> by_ordinal;
  for (NodeId id : store.nodes_with_label(NodeLabel::Milestone)) {
    const Node& m = store.node(id);
    auto title = prop_as<std::string>(m, "title");
    if (!title) continue;
    std::smatch match;
    if (!std::regex_match(*title, match, re)) continue;
    int ordinal = 0;
    try {
      ordinal = std::stoi(match[1].str());
    } catch (const std::exception&) {
      continue;
    }
    auto [it, inserted] = by_ordinal.emplace(ordinal, std::make_pair(*title, id));
    if (!inserted) {
      throw Error(ErrorCode::AmbiguousSprintTitles,
                  "milestones '" + it->second.first + "' and '" + *title + "' share ordinal " +
                      std::to_string(ordinal));
    }
  }
  if (by_ordinal.empty()) return {};

  std::map<std::string, const SprintWindow*, std::less<>> windows;
  for (const auto& w : config.sprint_window) windows.emplace(w.title, &w);

  // Latest event per milestone title and earliest artifact overall.
  std::map<std::string, Timestamp, std::less<>> last_event;
  std::optional<Timestamp> earliest;
  auto note = [&](std::optional<Timestamp> ts) {
    if (ts && (!earliest || *ts < *earliest)) earliest = ts;
  };
  for (NodeId id : store.nodes_with_label(NodeLabel::Event)) {
    const Node& e = store.node(id);
    auto ts = prop_as<Timestamp>(e, "created_at");
    note(ts);
    auto title = prop_as<std::string>(e, "milestone_title");
    if (ts && title) {
      auto [it, inserted] = last_event.emplace(*title, *ts);
      if (!inserted && it->second < *ts) it->second = *ts;
    }
  }
  for (NodeId id : store.nodes_with_label(NodeLabel::Issue)) note(prop_as<Timestamp>(store.node(id), "created_at"));
  for (NodeId id : store.nodes_with_label(NodeLabel::Commit)) note(prop_as<Timestamp>(store.node(id), "authored_at"));

  std::vector<SprintDescriptor> out;
  for (const auto& [ordinal, entry] : by_ordinal) {
    const auto& [title, id] = entry;
    SprintDescriptor s;
    s.title = title;
    s.ordinal = ordinal;
    if (auto w = windows.find(title); w != windows.end()) {
      s.start = w->second->start;
      s.end = w->second->end;
    } else {
      s.start = out.empty() ? earliest.value_or(Timestamp{}) : out.back().end;
      if (auto due = prop_as<Timestamp>(store.node(id), "due_on")) {
        s.end = *due;
      } else if (auto ev = last_event.find(title); ev != last_event.end()) {
        // Half-open windows: the closing event itself must fall inside.
        s.end = Timestamp{ev->second.seconds + 1};
      } else {
        s.end = s.start;
      }
      s.end = std::max(s.end, s.start);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<TeamDescriptor> extract_teams(const GraphStore& store, const ProjectConfig& config) {
  std::vector<TeamDescriptor> out;
  for (NodeId id : store.nodes_with_label(NodeLabel::Label)) {
    const PropertyValue* v = store.node(id).find("name");
    const std::string* name = v ? std::get_if<std::string>(v) : nullptr;
    if (!name || !name->starts_with(config.team_label_prefix)) continue;
    out.push_back({name->substr(config.team_label_prefix.size()), *name});
  }
  std::sort(out.begin(), out.end(),
            [](const TeamDescriptor& a, const TeamDescriptor& b) { return a.label_name < b.label_name; });
  return out;
}

}  // namespace agilelint::ingest
