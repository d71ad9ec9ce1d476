#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "agilelint/error.hpp"
#include "agilelint/scoring/rating.hpp"
#include "agilelint/scoring/score.hpp"
#include "builders.hpp"
#include "rng.hpp"

using namespace agilelint;
using namespace agilelint::scoring;
using agilelint::testing::kNeverendingRating;
using agilelint::testing::Rng;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::ParseError;
}

double rate(std::string_view text, const ScoreBindings& b) { return eval_rating(parse_rating(text), b); }

mql::BindingTable in_sprints_table(std::vector<std::int64_t> values) {
  mql::BindingTable t;
  t.columns = {"Issues", "InSprints"};
  for (auto v : values) t.rows.push_back({mql::Value(mql::NodeRef{0}), mql::Value(v)});
  return t;
}

/// Independent weighted mean for the aggregation checks.
double weighted_mean(const std::vector<WeightedScore>& s) {
  long double num = 0, den = 0;
  for (const auto& w : s) {
    num += (long double)w.score * w.weight;
    den += w.weight;
  }
  return double(num / den);
}

}  // namespace

TEST_CASE("neverending-story rating expression parses") {
  RatingExpr e = parse_rating(kNeverendingRating);
  CHECK(e.op == RatingOp::Call);
  CHECK(e.function == RatingFunction::Max);
  CHECK(e.args.size() == 2);
  CHECK(binding_names(e) == std::set<std::string>{"AvgInSprints", "totalUS", "violations"});
  CHECK(parse_rating("100").op == RatingOp::Number);
}

TEST_CASE("rating syntax errors") {
  CHECK(code_of([] { parse_rating("max(1,2,3)"); }) == ErrorCode::ArityError);
  CHECK(code_of([] { parse_rating("exp()"); }) == ErrorCode::ArityError);
  CHECK(code_of([] { parse_rating("log(2)"); }) == ErrorCode::UnknownFunction);
  try {
    parse_rating("100-(violations/totalUS");
    FAIL("expected a parse error");
  } catch (const SyntaxError& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.offset() == 23);
  }
  CHECK(code_of([] { parse_rating("#violations"); }) == ErrorCode::ParseError);
}

TEST_CASE("neverending-story rating worked values") {
  CHECK(rate(kNeverendingRating, {{"violations", 0}, {"totalUS", 10}, {"AvgInSprints", 0}}) == 100.0);
  // 100 - (2/10 * 100 * 2.5)
  CHECK(rate(kNeverendingRating, {{"violations", 2}, {"totalUS", 10}, {"AvgInSprints", 2.5}}) == 50.0);
  CHECK(rate(kNeverendingRating, {{"violations", 10}, {"totalUS", 10}, {"AvgInSprints", 3}}) == 0.0);
  CHECK(code_of([] { rate(kNeverendingRating, {{"violations", 1}, {"totalUS", 0}, {"AvgInSprints", 3}}); }) ==
        ErrorCode::DegenerateInput);
  CHECK(code_of([] { rate(kNeverendingRating, {{"violations", 1}, {"totalUS", 10}}); }) == ErrorCode::UnknownBinding);
}

TEST_CASE("operators, precedence and functions") {
  CHECK(rate("2+3*4", {}) == 14.0);
  CHECK(rate("(2+3)*4", {}) == 20.0);
  CHECK(rate("-2*-3", {}) == 6.0);
  CHECK(rate("10-4-3", {}) == 3.0);
  CHECK(rate("64/4/2", {}) == 8.0);
  CHECK(rate("pow(2, 5)", {}) == 32.0);
  CHECK(rate("abs(-7)", {}) == 7.0);
  CHECK(rate("min(40, 30)", {}) == 30.0);
  CHECK(rate("100*exp(0)", {}) == 100.0);
  CHECK(rate("100*exp(-1)", {}) == doctest::Approx(36.787944117));
  CHECK(rate("1.5e1", {}) == 15.0);
  // results are clamped even without max(0, .)
  CHECK(rate("250", {}) == 100.0);
  CHECK(rate("-3", {}) == 0.0);
  CHECK(code_of([] { rate("exp(1000)", {}); }) == ErrorCode::DegenerateInput);
  CHECK(code_of([] { rate("1/(2-2)", {}) ; }) == ErrorCode::DegenerateInput);
}

TEST_CASE("standard bindings") {
  SUBCASE("empty table") {
    auto b = standard_bindings(mql::BindingTable{{"Issues"}, {}}, {{"totalUS", 10}}, {{"threshold", 2}}, {});
    CHECK(b == ScoreBindings{{"violations", 0}, {"totalUS", 10}, {"threshold", 2}});
  }
  SUBCASE("column aggregates") {
    auto b = standard_bindings(in_sprints_table({3, 2}), {}, {}, {{"AvgInSprints", "avg_InSprints"}});
    CHECK(b.at("violations") == 2);
    CHECK(b.at("avg_InSprints") == 2.5);
    CHECK(b.at("sum_InSprints") == 5);
    CHECK(b.at("max_InSprints") == 3);
    CHECK(b.at("min_InSprints") == 2);
    CHECK(b.at("AvgInSprints") == 2.5);
    CHECK_FALSE(b.contains("avg_Issues"));
  }
  SUBCASE("missing alias target") {
    CHECK(code_of([] { standard_bindings(in_sprints_table({3}), {}, {}, {{"AvgInSprints", "avg_Missing"}}); }) ==
          ErrorCode::AliasTargetMissing);
    auto empty = standard_bindings(in_sprints_table({}), {}, {}, {{"AvgInSprints", "avg_Missing"}});
    CHECK(empty.at("AvgInSprints") == 0);
  }
}

TEST_CASE("severity weights") {
  SeverityWeights w;
  CHECK(w(Severity::Low) == 1);
  CHECK(w(Severity::Medium) == 2);
  CHECK(w(Severity::High) == 3);
  CHECK(parse_severity("High") == Severity::High);
  CHECK_FALSE(parse_severity("high"));
  CHECK(to_string(Severity::Medium) == "Medium");
}

TEST_CASE("aggregation examples") {
  CHECK(aggregate_scores({{100, 3}, {100, 1}, {100, 2}}) == 100.0);
  CHECK(aggregate_scores({{100, 3}, {50, 1}}) == 87.5);
  CHECK(aggregate_scores({{42.25, 2}}) == 42.25);
  CHECK(code_of([] { aggregate_scores({}); }) == ErrorCode::NothingToAggregate);
}

TEST_CASE("property: finite ratings land in [0, 100]") {
  Rng rng(3);
  const std::vector<std::string> names = {"violations", "totalUS", "x"};
  std::function<std::string(int)> gen = [&](int depth) -> std::string {
    if (depth == 0 || rng.chance(0.3)) {
      return rng.chance(0.5) ? std::to_string(rng.between(-200, 200)) : rng.pick(names);
    }
    switch (rng.between(0, 6)) {
      case 0: return "(" + gen(depth - 1) + " + " + gen(depth - 1) + ")";
      case 1: return "(" + gen(depth - 1) + " - " + gen(depth - 1) + ")";
      case 2: return gen(depth - 1) + " * " + gen(depth - 1);
      case 3: return gen(depth - 1) + " / " + gen(depth - 1);
      case 4: return "max(" + gen(depth - 1) + ", " + gen(depth - 1) + ")";
      case 5: return "-" + gen(depth - 1);
      default: return "abs(" + gen(depth - 1) + ")";
    }
  };
  int finite = 0;
  for (int round = 0; round < 2000; ++round) {
    std::string text = gen(4);
    ScoreBindings b = {{"violations", rng.between(0, 20)}, {"totalUS", rng.between(0, 20)}, {"x", rng.real(-5, 5)}};
    CAPTURE(text);
    try {
      double s = rate(text, b);
      CHECK(s >= 0.0);
      CHECK(s <= 100.0);
      ++finite;
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateInput);
    }
  }
  CHECK(finite > 1000);
}

TEST_CASE("property: neverending-story rating is non-increasing in violations") {
  for (int total = 1; total <= 30; ++total) {
    for (double avg : {0.0, 1.0, 2.5, 3.0, 4.0, 7.5}) {
      double previous = 101;
      for (int v = 0; v <= total; ++v) {
        double s = rate(kNeverendingRating, {{"violations", v}, {"totalUS", total}, {"AvgInSprints", avg}});
        CHECK(s <= previous);
        previous = s;
      }
    }
  }
}

TEST_CASE("property: weighted mean bounds, monotonicity and weight scaling") {
  Rng rng(17);
  for (int round = 0; round < 1000; ++round) {
    std::vector<WeightedScore> s;
    int n = rng.between(1, 12);
    for (int i = 0; i < n; ++i) s.push_back({rng.real(0, 100), double(rng.between(1, 3))});
    double agg = aggregate_scores(s);
    auto [lo, hi] = std::minmax_element(s.begin(), s.end(), [](auto& a, auto& b) { return a.score < b.score; });
    CHECK(agg >= lo->score - 1e-9);
    CHECK(agg <= hi->score + 1e-9);
    CHECK(agg == doctest::Approx(weighted_mean(s)).epsilon(1e-12));

    auto raised = s;
    std::size_t k = std::size_t(rng.between(0, n - 1));
    raised[k].score = std::min(100.0, raised[k].score + rng.real(0, 20));
    CHECK(aggregate_scores(raised) >= agg - 1e-9);

    auto scaled = s;
    double c = rng.real(0.01, 50);
    for (auto& w : scaled) w.weight *= c;
    CHECK(aggregate_scores(scaled) == doctest::Approx(agg).epsilon(1e-12));
  }
}
