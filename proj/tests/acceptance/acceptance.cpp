// One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>

#include "agilelint/engine/engine.hpp"
#include "agilelint/error.hpp"
#include "agilelint/fixture.hpp"
#include "agilelint/mql/evaluator.hpp"
#include "agilelint/mql/parser.hpp"
#include "agilelint/scoring/rating.hpp"
#include "agilelint/service/report.hpp"
#include "builders.hpp"
#include "mql_oracle.hpp"
#include "rng.hpp"

using namespace agilelint;
using agilelint::testing::Rng;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

GraphStore load(const ingest::Fixture& f) { return ingest::load_project(f.issues, f.commits, f.runs).store; }

Outcome neverending_formula() {
  using scoring::eval_rating;
  auto rating = scoring::parse_rating(agilelint::testing::kNeverendingRating);
  double a = eval_rating(rating, {{"violations", 0}, {"totalUS", 10}, {"AvgInSprints", 0}});
  // 100 - (2/10 * 100 * 2.5) = 100 - 50
  double b = eval_rating(rating, {{"violations", 2}, {"totalUS", 10}, {"AvgInSprints", 2.5}});
  // 100 - (10/10 * 100 * 3) = -200, clamped by max(0, .)
  double c = eval_rating(rating, {{"violations", 10}, {"totalUS", 10}, {"AvgInSprints", 3}});
  return {a == 100.0 && b == 50.0 && c == 0.0, fmt("got %g, %g, %g; want 100, 50, 0", a, b, c)};
}

Outcome neverending_query() {
  GraphStore g = agilelint::testing::neverending_store();
  std::vector<std::string> sprints = {"Sprint 01", "Sprint 02", "Sprint 03"};
  auto expected = agilelint::testing::neverending_oracle(g, "team-red", sprints, 2);
  mql::List list;
  for (const auto& s : sprints) list.push_back(mql::Value(s));
  auto table = mql::run_query(agilelint::testing::kNeverendingQuery,
                              {{"team", mql::Value("team-red")},
                               {"sprint_list", mql::Value(list)},
                               {"threshold", mql::Value(std::int64_t(2))}},
                              g);
  bool match = table.rows.size() == 1 && expected.size() == 1;
  if (match) {
    const auto& row = table.rows[0];
    auto [issue, titles] = *expected.begin();
    std::vector<std::string> got;
    for (const auto& v : *row[2].get_if<mql::List>()) got.push_back(*v.get_if<std::string>());
    std::sort(got.begin(), got.end());
    match = row[0].get_if<mql::NodeRef>()->id == issue && *row[1].get_if<std::int64_t>() == 3 && got == titles;
  }
  return {match, fmt("%zu row(s), oracle %zu row(s) on a %zu-node store", table.rows.size(), expected.size(),
                     g.node_count())};
}

Outcome mql_oracle() {
  Rng rng(5150);
  int cases = 0, mismatches = 0, nonempty = 0;
  auto start = Clock::now();
  for (; cases < 1000; ++cases) {
    GraphStore g = agilelint::testing::random_graph(rng);
    auto q = agilelint::testing::random_query(rng);
    auto expected = agilelint::testing::canonical(agilelint::testing::oracle_rows(q, g));
    auto actual = agilelint::testing::canonical(
        mql::evaluate(mql::parse(agilelint::testing::to_query_text(q)), g).rows);
    if (actual != expected) ++mismatches;
    if (!expected.empty()) ++nonempty;
  }
  double t = seconds_since(start);
  return {mismatches == 0 && cases >= 500 && t < 60,
          fmt("%d cases (%d nonempty), %d mismatches, %.2f s", cases, nonempty, mismatches, t)};
}

Outcome perfect_score() {
  auto f = ingest::generate_fixture(42, ingest::parse_scale(""));
  engine::Engine e(load(f), {}, engine::builtin_catalog());
  auto m = e.evaluate_all();
  int cells = 0, perfect = 0;
  for (const auto& cell : m.cells) {
    ++cells;
    if (cell.overall && *cell.overall == 100.0) ++perfect;
  }
  return {cells > 0 && perfect == cells, fmt("%d of %d team-sprint cells at exactly 100", perfect, cells)};
}

Outcome ground_truth() {
  auto start = Clock::now();
  auto f = ingest::generate_fixture(
      42, ingest::parse_scale("neverending-story=3,monster-stories=2,lottie-and-lisa=1"));
  engine::Engine e(load(f), {}, engine::builtin_catalog());
  auto m = e.evaluate_all();
  double t = seconds_since(start);

  const std::vector<std::string> metrics = {"neverending-story", "monster-stories", "lottie-and-lisa"};
  std::map<std::string, std::set<std::string>> injected, reported;
  for (const auto& v : f.manifest["violations"]) injected[v["metric"]].insert(v["artifact"]);
  for (const auto& cell : m.cells) {
    for (const auto& r : cell.results) {
      for (const auto& v : r.violations) reported[r.metric_id].insert(v.artifact_ref);
    }
  }
  bool pass = t < 10;
  std::string detail;
  const std::map<std::string, std::size_t> per_team = {
      {"neverending-story", 3}, {"monster-stories", 2}, {"lottie-and-lisa", 1}};
  for (const auto& id : metrics) {
    std::size_t found = 0;
    for (const auto& a : injected[id]) found += reported[id].contains(a);
    pass = pass && injected[id].size() == per_team.at(id) * m.teams.size() && found == injected[id].size();
    detail += fmt("%s recall %zu/%zu; ", id.c_str(), found, injected[id].size());
  }
  std::size_t true_positive = 0;
  for (const auto& a : reported["neverending-story"]) true_positive += injected["neverending-story"].contains(a);
  pass = pass && true_positive == reported["neverending-story"].size();
  detail += fmt("neverending-story precision %zu/%zu; %.2f s", true_positive, reported["neverending-story"].size(), t);
  return {pass, detail};
}

Outcome catalog_cardinality() {
  const auto& c = engine::builtin_catalog();
  for (const auto& m : c.metrics) {
    if (!engine::validate_metric(m).empty()) return {false, "metric " + m.id + " does not validate"};
  }
  std::vector<std::string> backlog;
  for (const auto& m : c.metrics) {
    if (m.category == "Backlog Maintenance") backlog.push_back(m.name);
  }
  const std::vector<std::string> names = {"The Neverending Story", "Monster Stories", "Lottie and Lisa"};
  return {c.metrics.size() == 10 && backlog == names,
          fmt("%zu metrics, %zu in Backlog Maintenance", c.metrics.size(), backlog.size())};
}

Outcome full_scale() {
  std::string reports[2];
  double worst = 0;
  std::size_t results = 0;
  for (int run = 0; run < 2; ++run) {
    auto f = ingest::generate_fixture(2016, ingest::parse_scale(""));
    auto start = Clock::now();
    engine::Engine e(load(f), {}, engine::builtin_catalog());
    auto m = e.evaluate_all();
    worst = std::max(worst, seconds_since(start));
    reports[run] = service::report_json(m);
    results = 0;
    for (const auto& cell : m.cells) results += cell.results.size();
  }
  return {worst < 30 && reports[0] == reports[1] && results == 5 * 4 * 10,
          fmt("%zu results, slowest ingest+evaluate %.2f s, reports %s", results, worst,
              reports[0] == reports[1] ? "byte-identical" : "differ")};
}

/// Random update/evaluate interleavings. Every served result must carry the
/// metric's current revision and weight and equal a fresh evaluation; every
/// matrix, including ones built while another thread edits the catalog, must
/// use one revision per metric.
Outcome lifecycle() {
  auto f = ingest::generate_fixture(
      9, ingest::parse_scale("teams=2,sprints=3,stories=40,commits=80,file_changes=300,neverending-story=2"));
  GraphStore base = load(f);
  Rng rng(404);
  int interleavings = 0, violations = 0, checks = 0;
  const std::vector<std::string> severities = {"Low", "Medium", "High"};
  const std::vector<std::string> ratings = {"max(0, 100-(violations/totalUS*100*AvgInSprints))",
                                            "100*exp(-violations)", "max(0, 100 - 50*violations)"};

  auto consistent = [&](const engine::ScoreMatrix& m) {
    std::map<std::string, std::set<std::int64_t>> revisions;
    for (const auto& cell : m.cells) {
      for (const auto& r : cell.results) revisions[r.metric_id].insert(r.metric_revision);
    }
    return std::all_of(revisions.begin(), revisions.end(), [](const auto& kv) { return kv.second.size() == 1; });
  };

  for (; interleavings < 120; ++interleavings) {
    Timestamp now{1'800'000'000};
    engine::Engine e(base, {}, engine::builtin_catalog(),
                     {.cache_ttl_seconds = 600, .clock = [&now] { return now; }});
    std::vector<std::string> ids;
    for (const auto& m : e.catalog()->metrics) ids.push_back(m.id);
    int ops = rng.between(8, 16);
    for (int k = 0; k < ops; ++k) {
      now.seconds += rng.between(0, 300);
      int op = rng.between(0, 9);
      const std::string& id = rng.pick(ids);
      if (op < 3) {
        nlohmann::json fields;
        switch (rng.between(0, 2)) {
          case 0: fields["severity"] = rng.pick(severities); break;
          case 1: fields["description"] = "edit " + std::to_string(k); break;
          default:
            if (id == "neverending-story") {
              fields["rating"] = rng.pick(ratings);
              fields["params"] = {{"threshold", rng.between(1, 3)}};
            } else {
              fields["severity"] = rng.pick(severities);
            }
        }
        try {
          std::optional<std::int64_t> base_revision;
          if (rng.chance(0.5)) base_revision = e.catalog()->find(id)->revision - (rng.chance(0.2) ? 1 : 0);
          e.update_metric(id, fields, base_revision);
        } catch (const Error& err) {
          if (err.code() != ErrorCode::StaleRevision) ++violations;
        }
      } else if (op < 8) {
        const auto& team = e.teams()[std::size_t(rng.between(0, int(e.teams().size()) - 1))].label_name;
        const auto& sprint = e.sprints()[std::size_t(rng.between(0, int(e.sprints().size()) - 1))].title;
        auto served = e.evaluate(id, team, sprint);
        auto snapshot = e.catalog();
        const auto* def = snapshot->find(id);
        auto fresh = e.evaluate(id, team, sprint, true);
        ++checks;
        if (served.metric_revision != def->revision || served.weight != snapshot->weights(def->severity) ||
            !served.same_outcome(fresh)) {
          ++violations;
        }
      } else {
        auto m = e.evaluate_all();
        auto snapshot = e.catalog();
        ++checks;
        if (!consistent(m)) ++violations;
        for (const auto& cell : m.cells) {
          for (const auto& r : cell.results) {
            const auto* def = snapshot->find(r.metric_id);
            if (r.metric_revision != def->revision || r.weight != snapshot->weights(def->severity)) ++violations;
          }
        }
      }
    }
  }

  // Concurrent edits against whole-matrix evaluation.
  engine::Engine shared(base, {}, engine::builtin_catalog());
  std::atomic<bool> done{false};
  std::atomic<int> matrices{0}, mixed{0};
  std::thread reader([&] {
    while (!done) {
      if (!consistent(shared.evaluate_all())) ++mixed;
      ++matrices;
    }
  });
  for (int k = 0; k < 40; ++k) {
    shared.update_metric(k % 2 ? "neverending-story" : "giant-commit", {{"severity", severities[std::size_t(k % 3)]}});
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  done = true;
  reader.join();
  violations += mixed;

  return {violations == 0 && interleavings >= 100,
          fmt("%d interleavings, %d checks, %d concurrent matrices, %d stale or mixed", interleavings, checks,
              matrices.load(), violations)};
}

Outcome aggregation() {
  Rng rng(1000);
  int sets = 0, failures = 0;
  for (; sets < 1000; ++sets) {
    std::vector<scoring::WeightedScore> s;
    int n = rng.between(1, 10);
    for (int i = 0; i < n; ++i) s.push_back({rng.real(0, 100), double(rng.between(1, 3))});
    double agg = scoring::aggregate_scores(s);
    double lo = 100, hi = 0;
    long double num = 0, den = 0;
    for (const auto& w : s) {
      lo = std::min(lo, w.score);
      hi = std::max(hi, w.score);
      num += (long double)w.score * w.weight;
      den += w.weight;
    }
    bool ok = agg >= lo - 1e-9 && agg <= hi + 1e-9 && std::abs(agg - double(num / den)) <= 1e-9;
    auto raised = s;
    auto& target = raised[std::size_t(rng.between(0, n - 1))];
    target.score = std::min(100.0, target.score + rng.real(0, 30));
    ok = ok && scoring::aggregate_scores(raised) >= agg - 1e-9;
    auto scaled = s;
    double c = rng.real(0.1, 10);
    for (auto& w : scaled) w.weight *= c;
    ok = ok && std::abs(scoring::aggregate_scores(scaled) - agg) <= 1e-9;
    if (!ok) ++failures;
  }
  return {failures == 0, fmt("%d sets, %d failures", sets, failures)};
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<Outcome()> run;
    double limit_seconds;  // 0 when the criterion sets its own time limit or none
  };
  const std::vector<Criterion> criteria = {
      {"neverending-formula", neverending_formula, 1},
      {"neverending-query", neverending_query, 1},
      {"mql-oracle-equivalence", mql_oracle, 0},
      {"perfect-score", perfect_score, 0},
      {"ground-truth-detection", ground_truth, 0},
      {"catalog-cardinality", catalog_cardinality, 0},
      {"full-scale-performance", full_scale, 0},
      {"lifecycle-cache-soundness", lifecycle, 0},
      {"aggregation-properties", aggregation, 0},
  };
  int failed = 0;
  for (const auto& [name, run, limit] : criteria) {
    auto start = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    double t = seconds_since(start);
    if (limit > 0 && t >= limit) {
      o.pass = false;
      o.detail += fmt(" (over the %.0f s limit)", limit);
    }
    if (!o.pass) ++failed;
    std::printf("%s %-26s %7.3f s  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), t, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
