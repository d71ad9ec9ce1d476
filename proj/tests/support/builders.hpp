#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agilelint/graph_store.hpp"

namespace agilelint::testing {

/// Start of sprint k (1-based) in hand-built exports; sprints last 14 days.
Timestamp sprint_start(int k);
Timestamp sprint_due(int k);
std::string sprint_title(int k);  // "Sprint 01"

struct StorySpec {
  int number = 1;
  std::string title;
  std::vector<std::string> labels;
  std::vector<int> sprints;  // sprints the story was milestoned into, in order
  std::string body = "As a reviewer I want to see the history so that nothing gets lost.";
  std::optional<double> estimate;
  bool closed = false;
};

/// Issue export with milestones "Sprint 01".."Sprint NN" (due dates set) and
/// one milestoned event per listed sprint, demilestoned when moving on.
nlohmann::json issue_export(const std::vector<StorySpec>& stories, int sprints);

/// neverending-story query with normalized field names, as bundled.
extern const char* const kNeverendingQuery;
extern const char* const kNeverendingRating;

/// Brute-force answer to the neverending-story query: every (Event, Issue, Label)
/// triple joined by edges in either direction, filtered, grouped by issue.
/// Returns issue node id -> distinct sprint titles, for issues above the
/// threshold.
std::map<NodeId, std::vector<std::string>> neverending_oracle(const GraphStore& store, const std::string& team,
                                                         const std::vector<std::string>& sprint_list,
                                                         std::int64_t threshold);

/// Twelve nodes: labels team-red and team-blue, issues #4 and #5 (red) and #6
/// (blue), and seven milestoned events. #4 and #6 sit in Sprints 01-03, #5
/// only in Sprint 03.
GraphStore neverending_store();

}  // namespace agilelint::testing
