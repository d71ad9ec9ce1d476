#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace agilelint::ingest {

/// Size of a generated project. Injection counts are per team and keyed by
/// metric id; supported ids are neverending-story, monster-stories,
/// lottie-and-lisa, silent-story, giant-commit and untested-commit.
struct FixtureScale {
  int teams = 5;
  int sprints = 4;
  int stories = 379;
  int commits = 1802;
  int file_changes = 26503;
  std::map<std::string, int> injected;
  /// Teams (label names) receiving injections; empty means every team.
  std::vector<std::string> inject_teams;
};

/// Parses "teams=2,sprints=4,neverending-story=3,inject_teams=team-red".
/// Throws Error(InvalidConfig) on unknown keys or malformed values.
FixtureScale parse_scale(const std::string& spec);

struct Fixture {
  nlohmann::json issues;
  nlohmann::json commits;
  nlohmann::json runs;
  /// `{"violations":[{"metric","artifact"}]}`; artifact is an issue url or a
  /// commit sha.
  nlohmann::json manifest;
};

/// Deterministic for a fixed seed and scale. Injections rewrite existing
/// stories and commits, so the artifact counts always equal the scale. A
/// requested injection that the data cannot host (for example a story in
/// three sprints when there are only two) is skipped and not listed.
Fixture generate_fixture(std::uint64_t seed, const FixtureScale& scale);

/// Team label names used by the generator, in order.
std::vector<std::string> fixture_team_labels(int teams);

}  // namespace agilelint::ingest
