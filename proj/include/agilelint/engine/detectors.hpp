#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "agilelint/graph_store.hpp"
#include "agilelint/ingest.hpp"
#include "agilelint/mql/evaluator.hpp"

namespace agilelint::engine {

struct DetectorInput {
  const GraphStore& store;
  std::string team_label;
  ingest::SprintDescriptor sprint;
  const std::map<std::string, double, std::less<>>& params;
};

/// A violation extractor written in C++ for rules the query language cannot
/// express (text similarity, absence of an edge, ratios over a window).
struct Detector {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::string> required_params;
  std::function<mql::BindingTable(const DetectorInput&)> run;
};

/// nullptr for unknown names.
const Detector* find_detector(std::string_view name);
std::vector<std::string> detector_names();

/// Stories planned into the sprint: issues with a `milestoned` event naming
/// the sprint and a label equal to `team_label`. Ascending ids.
std::vector<NodeId> sprint_backlog(const GraphStore& store, std::string_view team_label,
                                   std::string_view sprint_title);

/// Commits referencing a story of the team and authored inside the window.
std::vector<NodeId> team_commits(const GraphStore& store, std::string_view team_label,
                                 const ingest::SprintDescriptor& sprint);

/// Lowercased, punctuation stripped, whitespace separated token set.
std::vector<std::string> title_tokens(std::string_view title);
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace agilelint::engine
