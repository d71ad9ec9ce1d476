#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agilelint/graph_store.hpp"

namespace agilelint::ingest {

struct LoadReport {
  std::size_t nodes_added = 0;
  std::size_t edges_added = 0;
  std::vector<std::string> warnings;
};

// Loaders validate the whole document before touching the store, so a
// SchemaViolation leaves the store unchanged. Apply them in the order issues,
// commits, test runs: commit messages link to already loaded issues by "#N"
// and test runs link to already loaded commits.

/// `{"issues":[...], "milestones":[{"title","due_on"}]?}`. Throws
/// SchemaViolation or Error(DuplicateIssueNumber).
LoadReport load_issue_export(const nlohmann::json& document, GraphStore& store);

/// `{"commits":[...]}`. Throws SchemaViolation or Error(DuplicateSha).
LoadReport load_commit_export(const nlohmann::json& document, GraphStore& store);

/// `{"runs":[...]}`. A run for an unknown sha becomes a detached TestRun and
/// a warning.
LoadReport load_test_runs(const nlohmann::json& document, GraphStore& store);

struct SprintWindow {
  std::string title;
  Timestamp start;
  Timestamp end;
};

struct ProjectConfig {
  std::string team_label_prefix = "team-";
  std::string sprint_title_pattern = R"(^Sprint (\d+)$)";
  std::vector<SprintWindow> sprint_window;
};

/// Throws Error(InvalidConfig) for a pattern that does not compile or has no
/// capture group, and for unordered or overlapping windows.
ProjectConfig load_project_config(const nlohmann::json& document);
void validate(const ProjectConfig& config);

/// Half-open window [start, end).
struct SprintDescriptor {
  std::string title;
  int ordinal = 0;
  Timestamp start;
  Timestamp end;
};

struct TeamDescriptor {
  std::string name;
  std::string label_name;
};

/// Milestones whose title matches the sprint pattern, by ordinal. Without an
/// explicit window a sprint ends at its milestone's `due_on`, falling back to
/// the latest event naming it, and starts where the previous one ended; the
/// first starts at the earliest artifact timestamp. Throws
/// Error(AmbiguousSprintTitles) when two titles share an ordinal.
std::vector<SprintDescriptor> extract_sprints(const GraphStore& store, const ProjectConfig& config);

/// Labels starting with the team prefix, sorted by label name.
std::vector<TeamDescriptor> extract_teams(const GraphStore& store, const ProjectConfig& config);

/// Store built from export documents in the documented order. Any document
/// may be null.
struct LoadedProject {
  GraphStore store;
  LoadReport report;
};
LoadedProject load_project(const nlohmann::json& issues, const nlohmann::json& commits,
                           const nlohmann::json& runs);

}  // namespace agilelint::ingest
