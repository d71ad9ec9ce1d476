#include <doctest.h>

#include <algorithm>

#include "agilelint/error.hpp"
#include "agilelint/mql/evaluator.hpp"
#include "agilelint/mql/lexer.hpp"
#include "agilelint/mql/parser.hpp"
#include "builders.hpp"
#include "mql_oracle.hpp"

using namespace agilelint;
using namespace agilelint::mql;
using namespace agilelint::testing;

namespace {

template <typename Fn>
const SyntaxError* syntax_error(Fn&& fn, SyntaxError& storage) {
  try {
    fn();
  } catch (const SyntaxError& e) {
    storage = e;
    return &storage;
  }
  return nullptr;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::ParseError;
}

PlaceholderBindings neverending_bindings(std::int64_t threshold) {
  return {{"team", Value("team-red")},
          {"sprint_list", Value(List{Value("Sprint 01"), Value("Sprint 02"), Value("Sprint 03")})},
          {"threshold", Value(threshold)}};
}

}  // namespace

TEST_CASE("tokenize keywords and literals") {
  auto tokens = tokenize("RETURN 1");
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].kind == TokenKind::Return);
  CHECK(tokens[1].kind == TokenKind::Int);
  CHECK(tokens[1].text == "1");
  CHECK(tokens[1].offset == 7);
  // keywords are case-sensitive
  CHECK(tokenize("return")[0].kind == TokenKind::Ident);

  auto query_tokens = tokenize(kNeverendingQuery);
  auto count = [&](TokenKind kind) {
    return std::count_if(query_tokens.begin(), query_tokens.end(), [&](const Token& t) { return t.kind == kind; });
  };
  CHECK(count(TokenKind::Match) == 1);
  CHECK(count(TokenKind::Where) == 2);
  CHECK(count(TokenKind::With) == 2);
  CHECK(count(TokenKind::Return) == 1);
  // "{team}" sits inside a string literal and is substituted at bind time
  CHECK(count(TokenKind::Placeholder) == 2);
}

TEST_CASE("lexer rejects stray characters and open strings") {
  SyntaxError e(ErrorCode::LexError, 0, "", "", "");
  REQUIRE(syntax_error([] { tokenize("MATCH (i) RETURN i ~"); }, e));
  CHECK(e.code() == ErrorCode::LexError);
  CHECK(e.offset() == 19);
  REQUIRE(syntax_error([] { tokenize("WHERE i.title = \"open"); }, e));
  CHECK(e.code() == ErrorCode::LexError);
  // an unclosed pattern lexes fine and fails in the parser
  CHECK_NOTHROW(tokenize("MATCH (i:Issue"));
  REQUIRE(syntax_error([] { parse("MATCH (i:Issue"); }, e));
  CHECK(e.code() == ErrorCode::ParseError);
}

TEST_CASE("minimal query") {
  Query q = parse("MATCH (i:Issue) RETURN i");
  REQUIRE(q.clauses.size() == 2);
  const auto& m = std::get<MatchClause>(q.clauses[0]);
  REQUIRE(m.patterns.size() == 1);
  CHECK(m.patterns[0].nodes.size() == 1);
  CHECK(m.patterns[0].nodes[0].label == NodeLabel::Issue);
  CHECK(return_columns(q) == std::vector<std::string>{"i"});
}

TEST_CASE("neverending-story query shape") {
  Query q = parse(kNeverendingQuery);
  REQUIRE(q.clauses.size() == 6);
  const auto& m = std::get<MatchClause>(q.clauses[0]);
  REQUIRE(m.patterns.size() == 1);
  CHECK(m.patterns[0].nodes.size() == 3);
  CHECK(m.patterns[0].edges.size() == 2);
  for (const auto& e : m.patterns[0].edges) CHECK(e.direction == EdgeDirection::undirected);

  const auto& where = std::get<WhereClause>(q.clauses[1]);
  CHECK(where.condition.kind == ExprKind::And);
  int conjuncts = 0;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (e.kind == ExprKind::And) {
      for (const auto& a : e.args) walk(a);
    } else {
      ++conjuncts;
    }
  };
  walk(where.condition);
  CHECK(conjuncts == 3);

  const auto& with1 = std::get<WithClause>(q.clauses[2]);
  REQUIRE(with1.items.size() == 2);
  CHECK(with1.items[1].name == "Sprints");
  CHECK(with1.items[1].expr.fn == Function::Collect);
  CHECK(with1.items[1].expr.distinct);
  const auto& with2 = std::get<WithClause>(q.clauses[3]);
  CHECK(with2.items[2].name == "InSprints");
  CHECK(with2.items[2].expr.fn == Function::Length);
  CHECK(std::holds_alternative<WhereClause>(q.clauses[4]));
  CHECK(return_columns(q) == std::vector<std::string>{"Issues", "InSprints", "Sprints"});
  CHECK(placeholders(q) == std::set<std::string>{"sprint_list", "team", "threshold"});
}

TEST_CASE("queries must start with MATCH and use variables in scope") {
  SyntaxError e(ErrorCode::LexError, 0, "", "", "");
  REQUIRE(syntax_error([] { parse("WHERE x=1 RETURN x"); }, e));
  CHECK(e.code() == ErrorCode::ParseError);
  CHECK(e.offset() == 0);
  REQUIRE(syntax_error([] { parse("MATCH (i:Issue) RETURN j"); }, e));
  CHECK(e.code() == ErrorCode::ScopeError);
  CHECK(e.offset() == 23);
  // WITH resets the scope to its items
  REQUIRE(syntax_error([] { parse("MATCH (i:Issue)-[:labels]-(l:Label) WITH i RETURN l"); }, e));
  CHECK(e.code() == ErrorCode::ScopeError);
  // labels and types are checked against the schema
  CHECK_THROWS_AS(parse("MATCH (s:Sprint) RETURN s"), SyntaxError);
  CHECK_THROWS_AS(parse("MATCH (i:Issue)-[:blocks]-(j:Issue) RETURN i"), SyntaxError);
  // aggregates cannot nest or appear in WHERE
  CHECK_THROWS_AS(parse("MATCH (i:Issue) RETURN count(collect(i))"), SyntaxError);
  CHECK_THROWS_AS(parse("MATCH (i:Issue) WHERE count(i) > 1 RETURN i"), SyntaxError);
}

TEST_CASE("binding placeholders") {
  Query q = parse(kNeverendingQuery);
  Query bound = bind_placeholders(q, neverending_bindings(2));
  CHECK(placeholders(bound).empty());
  CHECK(code_of([&] {
          bind_placeholders(q, {{"team", Value("team-red")}, {"sprint_list", Value(List{})}});
        }) == ErrorCode::UnboundPlaceholder);
  auto wrong = neverending_bindings(2);
  wrong["threshold"] = Value(List{Value(std::int64_t(2))});
  CHECK(code_of([&] { bind_placeholders(q, wrong); }) == ErrorCode::PlaceholderTypeMismatch);
}

TEST_CASE("count over a full scan") {
  GraphStore g;
  for (int i = 0; i < 3; ++i) g.add_node(NodeLabel::Issue, {{"number", std::int64_t(i + 1)}});
  g.add_node(NodeLabel::Label, {{"name", std::string("team-red")}});
  auto t = run_query("MATCH (i:Issue) RETURN count(i)", {}, g);
  REQUIRE(t.rows.size() == 1);
  CHECK(*t.rows[0][0].get_if<std::int64_t>() == 3);
  // aggregating over nothing still yields one row
  auto none = run_query("MATCH (c:Commit) RETURN count(c) AS n", {}, g);
  REQUIRE(none.rows.size() == 1);
  CHECK(*none.rows[0][0].get_if<std::int64_t>() == 0);
}

TEST_CASE("neverending-story query against a brute-force enumeration") {
  GraphStore g = neverending_store();
  REQUIRE(g.node_count() == 12);
  for (std::int64_t threshold = 0; threshold <= 3; ++threshold) {
    CAPTURE(threshold);
    auto expected = neverending_oracle(g, "team-red", {"Sprint 01", "Sprint 02", "Sprint 03"}, threshold);
    auto t = run_query(kNeverendingQuery, neverending_bindings(threshold), g);
    REQUIRE(t.rows.size() == expected.size());
    for (const auto& row : t.rows) {
      NodeId issue = row[0].get_if<NodeRef>()->id;
      REQUIRE(expected.contains(issue));
      CHECK(*row[1].get_if<std::int64_t>() == std::int64_t(expected[issue].size()));
      std::vector<std::string> titles;
      for (const auto& v : *row[2].get_if<List>()) titles.push_back(*v.get_if<std::string>());
      std::sort(titles.begin(), titles.end());
      CHECK(titles == expected[issue]);
    }
  }
  auto t = run_query(kNeverendingQuery, neverending_bindings(2), g);
  REQUIRE(t.rows.size() == 1);
  CHECK(node_ref(g, t.rows[0][0].get_if<NodeRef>()->id) == "https://example.test/issues/4");
  CHECK(render(t.rows[0][2], g) == R"(["Sprint 01", "Sprint 02", "Sprint 03"])");
  CHECK(run_query(kNeverendingQuery, neverending_bindings(3), g).rows.empty());
}

TEST_CASE("missing properties drop the row instead of failing") {
  GraphStore g;
  g.add_node(NodeLabel::Issue, {{"number", std::int64_t(1)}, {"estimate", 5.0}});
  g.add_node(NodeLabel::Issue, {{"number", std::int64_t(2)}});
  CHECK(run_query("MATCH (i:Issue) WHERE i.estimate > 3 RETURN i", {}, g).rows.size() == 1);
  CHECK(run_query("MATCH (i:Issue) WHERE NOT i.estimate > 3 RETURN i", {}, g).rows.size() == 1);
  CHECK(code_of([&] { run_query("MATCH (i:Issue) WHERE i.number = \"1\" RETURN i", {}, g); }) ==
        ErrorCode::TypeError);
}

TEST_CASE("edges are distinct within one MATCH, nodes may repeat") {
  GraphStore g;
  g.add_node(NodeLabel::Issue);
  g.add_node(NodeLabel::Label);
  g.add_edge(0, RelType::labels, 1);
  // a -[]- b -[]- c would need the single edge twice
  CHECK(run_query("MATCH (a)-[:labels]-(b)-[:labels]-(c) RETURN a", {}, g).rows.empty());
  g.add_edge(0, RelType::labels, 1);
  // with two parallel edges the walk can come back to the start node
  auto t = run_query("MATCH (a:Issue)-[:labels]-(b)-[:labels]-(c) RETURN a, c", {}, g);
  CHECK(t.rows.size() == 2);
  for (const auto& row : t.rows) CHECK(row[0].get_if<NodeRef>()->id == row[1].get_if<NodeRef>()->id);
}

TEST_CASE("rows come out in rendered order") {
  GraphStore g;
  for (std::string t : {"b", "c", "a"}) g.add_node(NodeLabel::Issue, {{"title", t}});
  auto t = run_query("MATCH (i:Issue) RETURN i.title AS t", {}, g);
  REQUIRE(t.rows.size() == 3);
  CHECK(*t.rows[0][0].get_if<std::string>() == "a");
  CHECK(*t.rows[2][0].get_if<std::string>() == "c");
}

TEST_CASE("property: evaluator equals brute-force enumeration") {
  Rng rng(20260105);
  int nonempty = 0;
  for (int round = 0; round < 600; ++round) {
    GraphStore g = random_graph(rng);
    QQuery q = random_query(rng);
    std::string text = to_query_text(q);
    CAPTURE(text);
    auto expected = canonical(oracle_rows(q, g));
    auto got = evaluate(parse(text), g);
    auto actual = canonical(got.rows);
    INFO("expected\n" << describe(expected) << "actual\n" << describe(actual));
    CHECK(actual == expected);
    if (!expected.empty()) ++nonempty;
  }
  // the generator must not degenerate into empty results
  CHECK(nonempty > 200);
}

TEST_CASE("property: printing and reparsing gives the same AST") {
  Rng rng(7);
  for (int round = 0; round < 300; ++round) {
    Query q = parse(to_query_text(random_query(rng)));
    std::string printed = to_text(q);
    CAPTURE(printed);
    CHECK(parse(printed) == q);
  }
  Query t2 = parse(kNeverendingQuery);
  CHECK(parse(to_text(t2)) == t2);
}

TEST_CASE("property: binding is idempotent on a bound query") {
  Query once = bind_placeholders(parse(kNeverendingQuery), neverending_bindings(2));
  CHECK(bind_placeholders(once, {}) == once);
  CHECK(bind_placeholders(once, neverending_bindings(5)) == once);
}

TEST_CASE("property: aggregates agree with direct computation") {
  Rng rng(99);
  for (int round = 0; round < 200; ++round) {
    GraphStore g;
    int groups = rng.between(1, 4);
    std::vector<NodeId> labels;
    for (int k = 0; k < groups; ++k) {
      labels.push_back(g.add_node(NodeLabel::Label, {{"name", "g" + std::to_string(k)}}));
    }
    std::map<NodeId, std::vector<std::int64_t>> values;
    int issues = rng.between(0, 15);
    for (int i = 0; i < issues; ++i) {
      std::int64_t v = rng.between(-5, 20);
      NodeId label = rng.pick(labels);
      NodeId id = g.add_node(NodeLabel::Issue, {{"v", v}});
      g.add_edge(id, RelType::labels, label);
      values[label].push_back(v);
    }
    auto t = run_query(
        "MATCH (i:Issue)-[:labels]->(l:Label) "
        "RETURN l, count(i) AS c, sum(i.v) AS s, avg(i.v) AS a, min(i.v) AS lo, max(i.v) AS hi, collect(i.v) AS vs",
        {}, g);
    REQUIRE(t.rows.size() == values.size());
    for (const auto& row : t.rows) {
      const auto& vs = values[row[0].get_if<NodeRef>()->id];
      std::int64_t sum = 0;
      for (auto v : vs) sum += v;
      CHECK(*row[1].get_if<std::int64_t>() == std::int64_t(vs.size()));
      CHECK(*row[2].get_if<std::int64_t>() == sum);
      CHECK(*row[3].get_if<double>() == doctest::Approx(double(sum) / double(vs.size())));
      CHECK(*row[4].get_if<std::int64_t>() == *std::min_element(vs.begin(), vs.end()));
      CHECK(*row[5].get_if<std::int64_t>() == *std::max_element(vs.begin(), vs.end()));
      CHECK(row[6].get_if<List>()->size() == vs.size());
    }
  }
}

TEST_CASE("property: raising the threshold never adds rows") {
  Rng rng(5);
  for (int round = 0; round < 40; ++round) {
    GraphStore g;
    NodeId red = g.add_node(NodeLabel::Label, {{"name", std::string("team-red")}});
    int stories = rng.between(1, 10);
    for (int s = 0; s < stories; ++s) {
      NodeId issue = g.add_node(NodeLabel::Issue, {{"number", std::int64_t(s)}});
      g.add_edge(issue, RelType::labels, red);
      int events = rng.between(0, 6);
      for (int k = 0; k < events; ++k) {
        NodeId e = g.add_node(NodeLabel::Event, {{"event", std::string(rng.chance(0.8) ? "milestoned" : "renamed")},
                                                 {"milestone_title", sprint_title(rng.between(1, 5))}});
        g.add_edge(e, RelType::issue, issue);
      }
    }
    PlaceholderBindings b = {{"team", Value("team-red")}, {"sprint_list", Value(List{})}};
    List sprints;
    for (int k = 1; k <= 5; ++k) sprints.push_back(Value(sprint_title(k)));
    b["sprint_list"] = Value(sprints);
    std::size_t previous = SIZE_MAX;
    for (std::int64_t threshold = 0; threshold <= 5; ++threshold) {
      b["threshold"] = Value(threshold);
      std::size_t rows = run_query(kNeverendingQuery, b, g).rows.size();
      CHECK(rows <= previous);
      previous = rows;
    }
  }
}
