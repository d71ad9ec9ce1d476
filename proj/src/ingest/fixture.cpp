#include "agilelint/fixture.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <random>
#include <set>

#include "agilelint/error.hpp"
#include "agilelint/time.hpp"

namespace agilelint::ingest {

namespace {

using nlohmann::json;

constexpr std::int64_t kHour = 3600;
constexpr std::int64_t kDay = 24 * kHour;
constexpr std::int64_t kSprintLength = 14 * kDay;
constexpr std::size_t kTeamFilePool = 120;

const std::array<std::string_view, 7> kInjectable = {
    "broken-build-streak", "giant-commit",   "lottie-and-lisa", "monster-stories",
    "neverending-story",   "silent-story",   "untested-commit",
};

// Three disjoint vocabularies. Titles are distinct (verb, adjective, noun)
// triples, so two clean titles share at most two of three tokens.
const std::array<std::string_view, 16> kVerbs = {
    "Add",    "Build",   "Create", "Design", "Enable", "Export", "Fix",    "Implement",
    "Import", "Improve", "Log",    "Move",   "Remove", "Render", "Secure", "Validate"};
const std::array<std::string_view, 16> kAdjectives = {
    "admin",  "archived", "billing", "cached",  "daily",  "draft",  "external", "guest",
    "hidden", "mobile",   "nightly", "offline", "public", "shared", "weekly",   "yearly"};
const std::array<std::string_view, 16> kNouns = {
    "avatar",  "backup", "calendar", "checkout", "comment", "dashboard", "invoice", "login",
    "profile", "report", "search",   "session",  "settings", "ticket",   "upload",  "wishlist"};
const std::array<std::string_view, 8> kTeamNames = {"red",    "blue", "green", "yellow",
                                                    "purple", "orange", "teal", "gray"};
const std::array<std::string_view, 3> kModules = {"core", "api", "ui"};

/// mt19937_64 with hand-rolled bounded draws; the standard distributions are
/// implementation defined and would break cross-platform determinism.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = -n % n;  // values below limit are biased
    while (true) {
      std::uint64_t x = engine_();
      if (x >= limit) return x % n;
    }
  }

  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + std::int64_t(below(std::uint64_t(hi - lo + 1)));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  std::string hex40() {
    std::string out;
    char buf[17];
    for (int k = 0; k < 3; ++k) {
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(engine_()));
      out += buf;
    }
    return out.substr(0, 40);
  }

 private:
  std::mt19937_64 engine_;
};

struct Story {
  int number = 0;
  int team = 0;
  int sprint = 0;
  std::vector<int> earlier_sprints;
  std::string title;
  std::string body;
  double estimate = 0;
};

struct FileEdit {
  std::string path;
  std::int64_t additions = 0;
  std::int64_t deletions = 0;
};

struct CommitDraft {
  std::string sha;
  int story = -1;
  std::string author;
  Timestamp at;
  std::vector<FileEdit> files;
  double complexity = 0;
  bool tested = true;
  bool failed = false;
  std::size_t order = 0;  // position in history
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return out;
}

double round2(double v) { return double(std::int64_t(v * 100 + 0.5)) / 100; }

std::string sprint_title(int s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "Sprint %02d", s + 1);
  return buf;
}

std::string issue_url(int number) {
  return "https://github.com/agilelint/fixture/issues/" + std::to_string(number);
}

bool injectable(std::string_view id) {
  return std::find(kInjectable.begin(), kInjectable.end(), id) != kInjectable.end();
}

}  // namespace

std::vector<std::string> fixture_team_labels(int teams) {
  std::vector<std::string> out;
  for (int t = 0; t < teams; ++t) {
    out.push_back(std::size_t(t) < kTeamNames.size() ? "team-" + std::string(kTeamNames[t])
                                                     : "team-" + std::to_string(t + 1));
  }
  return out;
}

FixtureScale parse_scale(const std::string& spec) {
  FixtureScale scale;
  if (spec.empty() || spec == "full") return scale;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    std::string item = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? spec.size() + 1 : comma + 1;
    if (item.empty()) continue;
    std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidConfig, "scale item '" + item + "' lacks '='");
    std::string key = item.substr(0, eq);
    std::string value = item.substr(eq + 1);
    if (key == "inject_teams") {
      std::size_t p = 0;
      while (p <= value.size()) {
        std::size_t bar = value.find('|', p);
        std::string team = value.substr(p, bar == std::string::npos ? std::string::npos : bar - p);
        if (!team.empty()) scale.inject_teams.push_back(team);
        p = bar == std::string::npos ? value.size() + 1 : bar + 1;
      }
      continue;
    }
    int n = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc() || ptr != value.data() + value.size() || n < 0) {
      throw Error(ErrorCode::InvalidConfig, "scale value for '" + key + "' must be a non-negative integer");
    }
    if (key == "teams") {
      scale.teams = n;
    } else if (key == "sprints") {
      scale.sprints = n;
    } else if (key == "stories") {
      scale.stories = n;
    } else if (key == "commits") {
      scale.commits = n;
    } else if (key == "file_changes") {
      scale.file_changes = n;
    } else if (injectable(key)) {
      scale.injected[key] = n;
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown scale key '" + key + "'");
    }
  }
  return scale;
}

Fixture generate_fixture(std::uint64_t seed, const FixtureScale& scale) {
  for (const auto& [id, n] : scale.injected) {
    if (!injectable(id)) throw Error(ErrorCode::InvalidConfig, "cannot inject violations of '" + id + "'");
  }
  const std::size_t capacity = kVerbs.size() * kAdjectives.size() * kNouns.size();
  if (scale.stories < 0 || std::size_t(scale.stories) > capacity) {
    throw Error(ErrorCode::InvalidConfig, "stories must lie in [0, " + std::to_string(capacity) + "]");
  }
  if (scale.teams < 1 || scale.sprints < 1 || scale.commits < 0 || scale.file_changes < 0) {
    throw Error(ErrorCode::InvalidConfig, "teams and sprints must be >= 1, counts >= 0");
  }

  Rng rng(seed);
  const Timestamp base = timestamp_from_civil(2026, 1, 5);
  auto start = [&](int s) { return Timestamp{base.seconds + s * kSprintLength}; };
  auto end = [&](int s) { return start(s + 1); };
  const auto labels = fixture_team_labels(scale.teams);
  auto developer = [&](int team, int k) {
    return "dev-" + labels[team].substr(5) + "-" + std::to_string(k + 1);
  };

  // Stories.
  std::vector<std::size_t> combos(capacity);
  for (std::size_t i = 0; i < capacity; ++i) combos[i] = i;
  rng.shuffle(combos);
  std::vector<Story> stories(scale.stories);
  for (int j = 0; j < scale.stories; ++j) {
    Story& s = stories[j];
    s.number = j + 1;
    s.team = j % scale.teams;
    s.sprint = (j / scale.teams) % scale.sprints;
    std::size_t c = combos[j];
    std::string_view verb = kVerbs[c / (kAdjectives.size() * kNouns.size())];
    std::string_view adjective = kAdjectives[(c / kNouns.size()) % kAdjectives.size()];
    std::string_view noun = kNouns[c % kNouns.size()];
    s.title = std::string(verb) + " " + std::string(adjective) + " " + std::string(noun);
    s.body = "As a " + std::string(adjective) + " user I want to " + lower(verb) + " the " +
             std::string(noun) + " so that the sprint goal can be met.";
    static constexpr double kPoints[] = {1, 2, 3, 5, 8};
    s.estimate = kPoints[rng.below(5)];
  }

  // Commits, spread over the stories round-robin and landing well inside the
  // story's sprint so no clean commit counts as an end-of-sprint rush.
  std::vector<CommitDraft> commits(scale.commits);
  std::vector<std::vector<std::string>> pools(scale.teams);
  for (int t = 0; t < scale.teams; ++t) {
    for (std::size_t f = 0; f < kTeamFilePool; ++f) {
      pools[t].push_back("src/" + labels[t].substr(5) + "/" + std::string(kModules[f % kModules.size()]) +
                         "/file" + std::to_string(f) + ".cpp");
    }
  }
  for (int c = 0; c < scale.commits; ++c) {
    CommitDraft& d = commits[c];
    d.sha = rng.hex40();
    int team = 0;
    int sprint = 0;
    if (scale.stories > 0) {
      d.story = c % scale.stories;
      const Story& s = stories[d.story];
      team = s.team;
      sprint = s.sprint;
      int k = c / scale.stories;
      d.author = developer(team, (k + s.number) % 3);
    } else {
      d.author = developer(0, c % 3);
    }
    std::int64_t lo = start(sprint).seconds + kDay;
    std::int64_t hi = end(sprint).seconds - 3 * kDay;
    d.at = Timestamp{rng.between(lo, hi)};
    std::size_t files = std::size_t(scale.file_changes / std::max(scale.commits, 1)) +
                        (c < scale.file_changes % std::max(scale.commits, 1) ? 1 : 0);
    std::vector<std::size_t> order(kTeamFilePool);
    for (std::size_t i = 0; i < kTeamFilePool; ++i) order[i] = i;
    rng.shuffle(order);
    std::int64_t max_add = std::clamp<std::int64_t>(900 / std::int64_t(std::max<std::size_t>(files, 1)), 1, 60);
    for (std::size_t f = 0; f < files; ++f) {
      d.files.push_back({pools[team][order[f % kTeamFilePool]], rng.between(1, max_add), rng.between(0, 20)});
    }
    d.complexity = round2(1 + double(rng.below(1900)) / 100);
  }
  std::vector<std::size_t> history(commits.size());
  for (std::size_t i = 0; i < history.size(); ++i) history[i] = i;
  std::stable_sort(history.begin(), history.end(),
                   [&](std::size_t a, std::size_t b) { return commits[a].at < commits[b].at; });
  for (std::size_t k = 0; k < history.size(); ++k) commits[history[k]].order = k;

  // Injections.
  std::vector<std::pair<std::string, std::string>> manifest;
  std::set<int> used_stories;
  std::set<std::size_t> used_commits;
  for (int t = 0; t < scale.teams; ++t) {
    if (!scale.inject_teams.empty() &&
        std::find(scale.inject_teams.begin(), scale.inject_teams.end(), labels[t]) == scale.inject_teams.end()) {
      continue;
    }
    std::vector<int> team_stories;
    for (const auto& s : stories) {
      if (s.team == t) team_stories.push_back(s.number - 1);
    }
    rng.shuffle(team_stories);
    std::vector<std::size_t> team_commits;
    for (std::size_t c = 0; c < commits.size(); ++c) {
      if (commits[c].story >= 0 && stories[commits[c].story].team == t) team_commits.push_back(c);
    }
    rng.shuffle(team_commits);

    auto take_story = [&](auto&& accept) -> int {
      for (int j : team_stories) {
        if (!used_stories.contains(j) && accept(stories[j])) {
          used_stories.insert(j);
          return j;
        }
      }
      return -1;
    };
    auto take_commit = [&](auto&& accept) -> std::ptrdiff_t {
      for (std::size_t c : team_commits) {
        if (!used_commits.contains(c) && accept(c)) {
          used_commits.insert(c);
          return std::ptrdiff_t(c);
        }
      }
      return -1;
    };
    auto count = [&](std::string_view id) {
      auto it = scale.injected.find(std::string(id));
      return it == scale.injected.end() ? 0 : it->second;
    };

    for (int n = 0; n < count("neverending-story"); ++n) {
      int j = take_story([](const Story& s) { return s.sprint >= 2; });
      if (j < 0) break;
      stories[j].earlier_sprints = {stories[j].sprint - 2, stories[j].sprint - 1};
      manifest.emplace_back("neverending-story", issue_url(stories[j].number));
    }
    for (int n = 0; n < count("monster-stories"); ++n) {
      int j = take_story([](const Story&) { return true; });
      if (j < 0) break;
      stories[j].estimate = 13;
      manifest.emplace_back("monster-stories", issue_url(stories[j].number));
    }
    for (int n = 0; n < count("silent-story"); ++n) {
      int j = take_story([](const Story&) { return true; });
      if (j < 0) break;
      stories[j].body = "TBD";
      manifest.emplace_back("silent-story", issue_url(stories[j].number));
    }
    for (int n = 0; n < count("lottie-and-lisa"); ++n) {
      int newer = -1;
      int original = -1;
      for (int j : team_stories) {
        if (used_stories.contains(j)) continue;
        for (int k : team_stories) {
          if (k < j && !used_stories.contains(k) && stories[k].sprint == stories[j].sprint) {
            newer = j;
            original = k;
            break;
          }
        }
        if (newer >= 0) break;
      }
      if (newer < 0) break;
      used_stories.insert(newer);
      used_stories.insert(original);
      const std::string& source = stories[original].title;
      std::size_t space = source.find(' ');
      stories[newer].title = source.substr(0, space) + " the" + source.substr(space);
      manifest.emplace_back("lottie-and-lisa", issue_url(stories[newer].number));
    }
    for (int n = 0; n < count("giant-commit"); ++n) {
      auto c = take_commit([&](std::size_t k) { return !commits[k].files.empty(); });
      if (c < 0) break;
      commits[c].files.front().additions = 1500;
      manifest.emplace_back("giant-commit", commits[c].sha);
    }
    for (int n = 0; n < count("untested-commit"); ++n) {
      auto c = take_commit([](std::size_t) { return true; });
      if (c < 0) break;
      commits[c].tested = false;
      manifest.emplace_back("untested-commit", commits[c].sha);
    }
    for (int n = 0; n < count("broken-build-streak"); ++n) {
      // A failing commit whose parent fails too; the parent's own parent
      // passes, so only the child is a streak.
      auto c = take_commit([&](std::size_t k) {
        std::size_t pos = commits[k].order;
        if (pos < 2) return false;
        std::size_t parent = history[pos - 1];
        std::size_t grand = history[pos - 2];
        bool clear = !used_commits.contains(parent) && !used_commits.contains(grand);
        if (pos + 1 < history.size()) clear = clear && !used_commits.contains(history[pos + 1]);
        return clear;
      });
      if (c < 0) break;
      std::size_t parent = history[commits[c].order - 1];
      used_commits.insert(parent);
      used_commits.insert(history[commits[c].order - 2]);
      if (commits[c].order + 1 < history.size()) used_commits.insert(history[commits[c].order + 1]);
      commits[c].failed = true;
      commits[parent].failed = true;
      manifest.emplace_back("broken-build-streak", commits[c].sha);
    }
  }

  // Documents.
  Fixture out;
  json milestones = json::array();
  for (int s = 0; s < scale.sprints; ++s) {
    milestones.push_back({{"title", sprint_title(s)}, {"due_on", format_iso8601(end(s))}});
  }
  json issues = json::array();
  for (const auto& s : stories) {
    int first = s.earlier_sprints.empty() ? s.sprint : s.earlier_sprints.front();
    std::string actor = developer(s.team, s.number % 3);
    json events = json::array();
    for (int x : s.earlier_sprints) {
      events.push_back({{"event", "milestoned"}, {"milestone_title", sprint_title(x)},
                        {"created_at", format_iso8601(Timestamp{start(x).seconds + kHour})}, {"actor", actor}});
      events.push_back({{"event", "demilestoned"}, {"milestone_title", sprint_title(x)},
                        {"created_at", format_iso8601(Timestamp{end(x).seconds - 2 * kHour})}, {"actor", actor}});
    }
    events.push_back({{"event", "milestoned"}, {"milestone_title", sprint_title(s.sprint)},
                      {"created_at", format_iso8601(Timestamp{start(s.sprint).seconds + kHour})}, {"actor", actor}});
    if (s.number % 4 == 0) {
      events.push_back({{"event", "renamed"}, {"milestone_title", nullptr},
                        {"created_at", format_iso8601(Timestamp{start(s.sprint).seconds + 2 * kHour})},
                        {"actor", actor}});
    }
    events.push_back({{"event", "closed"}, {"milestone_title", nullptr},
                      {"created_at", format_iso8601(Timestamp{end(s.sprint).seconds - kDay})}, {"actor", actor}});
    issues.push_back({{"number", s.number},
                      {"title", s.title},
                      {"body", s.body},
                      {"url", issue_url(s.number)},
                      {"created_at", format_iso8601(start(first))},
                      {"state", "closed"},
                      {"labels", {labels[s.team], "story"}},
                      {"milestone", sprint_title(s.sprint)},
                      {"estimate", s.estimate},
                      {"events", std::move(events)}});
  }
  out.issues = {{"issues", std::move(issues)}, {"milestones", std::move(milestones)}};

  json commit_list = json::array();
  json runs = json::array();
  for (std::size_t k = 0; k < history.size(); ++k) {
    const CommitDraft& d = commits[history[k]];
    json files = json::array();
    for (const auto& f : d.files) {
      files.push_back({{"path", f.path}, {"additions", f.additions}, {"deletions", f.deletions}});
    }
    json parents = json::array();
    if (k > 0) parents.push_back(commits[history[k - 1]].sha);
    std::string message = d.story >= 0 ? "Work on #" + std::to_string(stories[d.story].number) + ": " +
                                             lower(stories[d.story].title)
                                       : "Maintenance";
    commit_list.push_back({{"sha", d.sha},
                           {"message", message},
                           {"author", d.author},
                           {"authored_at", format_iso8601(d.at)},
                           {"parents", std::move(parents)},
                           {"complexity", d.complexity},
                           {"files", std::move(files)}});
    if (d.tested) {
      std::int64_t passed = rng.between(20, 200);
      runs.push_back({{"commit", d.sha},
                      {"passed", passed},
                      {"failed", d.failed ? rng.between(1, 5) : 0},
                      {"coverage", round2(0.6 + double(rng.below(36)) / 100)}});
    }
  }
  out.commits = {{"commits", std::move(commit_list)}};
  out.runs = {{"runs", std::move(runs)}};

  std::sort(manifest.begin(), manifest.end());
  json violations = json::array();
  for (const auto& [metric, artifact] : manifest) violations.push_back({{"metric", metric}, {"artifact", artifact}});
  out.manifest = {{"violations", std::move(violations)}};
  return out;
}

}  // namespace agilelint::ingest
