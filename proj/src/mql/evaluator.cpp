#include "agilelint/mql/evaluator.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <span>

#include "agilelint/error.hpp"
#include "agilelint/mql/parser.hpp"

namespace agilelint::mql {

std::size_t BindingTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::string::npos;
}

namespace {

using Row = std::vector<Value>;

struct Table {
  std::vector<std::string> columns;
  std::vector<Row> rows;
};

// Variable lookup plus, while projecting an aggregating item, the rows of the
// current group.
struct Context {
  const std::vector<std::string>* columns = nullptr;
  const Row* row = nullptr;
  std::span<const Row* const> group;
  bool grouped = false;
};

enum class Category { Null, Bool, Number, String, Time, Node, List };

Category category(const Value& v) {
  switch (v.data.index()) {
    case 0: return Category::Null;
    case 1: return Category::Bool;
    case 2:
    case 3: return Category::Number;
    case 4: return Category::String;
    case 5: return Category::Time;
    case 6: return Category::Node;
    default: return Category::List;
  }
}

std::size_t utf8_length(const std::string& s) {
  return std::size_t(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

class Evaluator {
 public:
  explicit Evaluator(const GraphStore& store) : store_(store) {}

  BindingTable run(const Query& query) {
    Table table;
    table.rows.emplace_back();  // a single empty row seeds the pipeline
    for (const auto& clause : query.clauses) {
      std::visit(
          [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, MatchClause>) {
              table = match(table, c);
            } else if constexpr (std::is_same_v<T, WhereClause>) {
              filter(table, c.condition);
            } else {
              table = project(table, c.items);
            }
          },
          clause);
    }
    BindingTable result{std::move(table.columns), std::move(table.rows)};
    sort_rows(result, store_);
    return result;
  }

 private:
  // --- MATCH -------------------------------------------------------------

  struct Step {
    std::size_t from;       // atom already assigned
    std::size_t to;         // atom assigned by this step
    std::size_t edge;       // edge atom index
    bool follow_out;        // traverse edges leaving `from`
    bool follow_in;         // traverse edges entering `from`
  };

  struct Plan {
    const Pattern* pattern;
    std::size_t anchor;
    std::vector<Step> steps;
    std::vector<std::size_t> slots;  // per node atom: row slot or npos
  };

  struct MatchState {
    const std::vector<Plan>* plans;
    std::size_t input_width;
    Row row;
    std::vector<std::vector<NodeId>> assigned;  // per plan, per atom
    std::vector<EdgeId> used_edges;
    std::vector<Row>* out;
  };

  Table match(const Table& input, const MatchClause& clause) {
    Table out;
    out.columns = input.columns;
    auto slot_of = [&](const std::string& name) {
      auto it = std::find(out.columns.begin(), out.columns.end(), name);
      if (it != out.columns.end()) return std::size_t(it - out.columns.begin());
      out.columns.push_back(name);
      return out.columns.size() - 1;
    };

    std::vector<Plan> plans;
    std::set<std::size_t> statically_bound;
    for (std::size_t i = 0; i < input.columns.size(); ++i) statically_bound.insert(i);

    for (const auto& pattern : clause.patterns) {
      Plan plan{&pattern, 0, {}, {}};
      for (const auto& node : pattern.nodes) {
        plan.slots.push_back(node.variable ? slot_of(*node.variable) : std::string::npos);
      }
      plan.anchor = choose_anchor(pattern, plan.slots, statically_bound);
      std::size_t n = pattern.nodes.size();
      for (std::size_t to = plan.anchor + 1; to < n; ++to) {
        const auto dir = pattern.edges[to - 1].direction;
        plan.steps.push_back({to - 1, to, to - 1, dir != EdgeDirection::left, dir != EdgeDirection::right});
      }
      for (std::size_t to = plan.anchor; to-- > 0;) {
        const auto dir = pattern.edges[to].direction;
        plan.steps.push_back({to + 1, to, to, dir != EdgeDirection::right, dir != EdgeDirection::left});
      }
      for (auto slot : plan.slots) {
        if (slot != std::string::npos) statically_bound.insert(slot);
      }
      plans.push_back(std::move(plan));
    }

    MatchState state;
    state.plans = &plans;
    state.input_width = input.columns.size();
    state.out = &out.rows;
    for (const auto& plan : plans) state.assigned.emplace_back(plan.pattern->nodes.size());
    for (const auto& row : input.rows) {
      state.row = row;
      state.row.resize(out.columns.size());
      state.used_edges.clear();
      extend(state, 0, 0);
    }
    return out;
  }

  std::size_t choose_anchor(const Pattern& pattern, const std::vector<std::size_t>& slots,
                            const std::set<std::size_t>& bound) const {
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i] != std::string::npos && bound.contains(slots[i])) return i;
    }
    std::size_t best = 0;
    std::size_t best_size = store_.node_count() + 1;
    for (std::size_t i = 0; i < pattern.nodes.size(); ++i) {
      if (!pattern.nodes[i].label) continue;
      std::size_t size = store_.nodes_with_label(*pattern.nodes[i].label).size();
      if (size < best_size) {
        best = i;
        best_size = size;
      }
    }
    return best;
  }

  enum class Assign { Fail, Matched, Bound };

  Assign try_assign(MatchState& st, const Plan& plan, std::size_t atom, NodeId node) const {
    const auto& pattern_node = plan.pattern->nodes[atom];
    if (pattern_node.label && store_.node(node).label != *pattern_node.label) return Assign::Fail;
    std::size_t slot = plan.slots[atom];
    if (slot == std::string::npos) return Assign::Matched;
    Value& cell = st.row[slot];
    if (auto ref = cell.get_if<NodeRef>()) return ref->id == node ? Assign::Matched : Assign::Fail;
    if (slot < st.input_width) return Assign::Fail;  // carried value that is not a node
    cell = NodeRef{node};
    return Assign::Bound;
  }

  void undo(MatchState& st, const Plan& plan, std::size_t atom, Assign how) const {
    if (how == Assign::Bound) st.row[plan.slots[atom]] = Value();
  }

  void extend(MatchState& st, std::size_t plan_index, std::size_t step) const {
    const auto& plans = *st.plans;
    if (plan_index == plans.size()) {
      st.out->push_back(st.row);
      return;
    }
    const Plan& plan = plans[plan_index];
    auto& assigned = st.assigned[plan_index];

    if (step == 0) {
      auto visit = [&](NodeId node) {
        Assign how = try_assign(st, plan, plan.anchor, node);
        if (how == Assign::Fail) return;
        assigned[plan.anchor] = node;
        extend(st, plan_index, 1);
        undo(st, plan, plan.anchor, how);
      };
      std::size_t slot = plan.slots[plan.anchor];
      const NodePattern& anchor = plan.pattern->nodes[plan.anchor];
      if (slot != std::string::npos && st.row[slot].get_if<NodeRef>()) {
        visit(st.row[slot].get_if<NodeRef>()->id);
      } else if (slot != std::string::npos && slot < st.input_width) {
        return;  // carried non-node value can never match
      } else if (anchor.label) {
        for (NodeId node : store_.nodes_with_label(*anchor.label)) visit(node);
      } else {
        for (NodeId node = 0; node < store_.node_count(); ++node) visit(node);
      }
      return;
    }
    if (step > plan.steps.size()) {
      extend(st, plan_index + 1, 0);
      return;
    }

    const Step& s = plan.steps[step - 1];
    const EdgePattern& edge_pattern = plan.pattern->edges[s.edge];
    NodeId from = assigned[s.from];
    auto visit_edge = [&](EdgeId e, NodeId other) {
      const Edge& edge = store_.edge(e);
      if (edge_pattern.type && edge.type != *edge_pattern.type) return;
      if (std::find(st.used_edges.begin(), st.used_edges.end(), e) != st.used_edges.end()) return;
      Assign how = try_assign(st, plan, s.to, other);
      if (how == Assign::Fail) return;
      assigned[s.to] = other;
      st.used_edges.push_back(e);
      extend(st, plan_index, step + 1);
      st.used_edges.pop_back();
      undo(st, plan, s.to, how);
    };
    if (s.follow_out) {
      for (EdgeId e : store_.out_edges(from)) visit_edge(e, store_.edge(e).target);
    }
    if (s.follow_in) {
      for (EdgeId e : store_.in_edges(from)) {
        const Edge& edge = store_.edge(e);
        if (s.follow_out && edge.source == edge.target) continue;  // self-loop already seen
        visit_edge(e, edge.source);
      }
    }
  }

  // --- WHERE -------------------------------------------------------------

  void filter(Table& table, const Expr& condition) {
    std::vector<Row> kept;
    for (auto& row : table.rows) {
      Context ctx{&table.columns, &row, {}, false};
      if (truthy(eval(condition, ctx), ctx)) kept.push_back(std::move(row));
    }
    table.rows = std::move(kept);
  }

  // --- WITH / RETURN -----------------------------------------------------

  Table project(const Table& input, const std::vector<Item>& items) {
    Table out;
    for (const auto& item : items) out.columns.push_back(item.name);

    std::vector<bool> aggregating(items.size());
    bool any_aggregate = false;
    for (std::size_t i = 0; i < items.size(); ++i) {
      aggregating[i] = contains_aggregate(items[i].expr);
      any_aggregate = any_aggregate || aggregating[i];
    }

    if (!any_aggregate) {
      for (const auto& row : input.rows) {
        Context ctx{&input.columns, &row, {}, false};
        Row projected;
        projected.reserve(items.size());
        for (const auto& item : items) projected.push_back(eval(item.expr, ctx));
        out.rows.push_back(std::move(projected));
      }
      return out;
    }

    std::map<Row, std::size_t, RowLess> group_index;
    std::vector<Row> keys;
    std::vector<std::vector<const Row*>> members;
    for (const auto& row : input.rows) {
      Context ctx{&input.columns, &row, {}, false};
      Row key;
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (!aggregating[i]) key.push_back(eval(items[i].expr, ctx));
      }
      auto [it, inserted] = group_index.try_emplace(key, keys.size());
      if (inserted) {
        keys.push_back(std::move(key));
        members.emplace_back();
      }
      members[it->second].push_back(&row);
    }
    bool has_keys = std::find(aggregating.begin(), aggregating.end(), false) != aggregating.end();
    if (!has_keys && keys.empty()) {
      keys.emplace_back();
      members.emplace_back();
    }

    for (std::size_t g = 0; g < keys.size(); ++g) {
      Context ctx{&input.columns, members[g].empty() ? nullptr : members[g].front(), members[g], true};
      Row projected;
      std::size_t k = 0;
      for (std::size_t i = 0; i < items.size(); ++i) {
        projected.push_back(aggregating[i] ? eval(items[i].expr, ctx) : keys[g][k++]);
      }
      out.rows.push_back(std::move(projected));
    }
    return out;
  }

  // --- expressions -------------------------------------------------------

  [[noreturn]] void type_error(const std::string& what, const Context& ctx) const {
    std::string context;
    if (ctx.row && ctx.columns) {
      for (std::size_t i = 0; i < ctx.columns->size() && i < ctx.row->size(); ++i) {
        if (i) context += ", ";
        context += (*ctx.columns)[i] + "=" + render((*ctx.row)[i], store_);
      }
    }
    throw Error(ErrorCode::TypeError, what + " (row: {" + context + "})");
  }

  bool truthy(const Value& v, const Context& ctx) const {
    if (v.is_null()) return false;
    if (auto b = v.get_if<bool>()) return *b;
    type_error("expected a boolean but got " + render(v, store_), ctx);
  }

  Value lookup(const std::string& name, const Context& ctx) const {
    if (!ctx.row) return Value();
    const auto& cols = *ctx.columns;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] == name) return (*ctx.row)[i];
    }
    throw Error(ErrorCode::ScopeError, "variable '" + name + "' is not in scope");
  }

  bool compare(const Value& a, const Value& b, CompareOp op, const Context& ctx) const {
    Category ca = category(a), cb = category(b);
    if (ca == Category::Null || cb == Category::Null) return false;
    bool ordering = op != CompareOp::Eq && op != CompareOp::Neq;
    if (ca != cb || (ordering && (ca == Category::List || ca == Category::Node))) {
      type_error("cannot compare " + render(a, store_) + " " + std::string(to_string(op)) + " " +
                     render(b, store_),
                 ctx);
    }
    std::partial_ordering order = std::partial_ordering::equivalent;
    if (ca == Category::Number) {
      auto ai = a.get_if<std::int64_t>();
      auto bi = b.get_if<std::int64_t>();
      order = (ai && bi) ? std::partial_ordering(*ai <=> *bi) : (a.as_number() <=> b.as_number());
    } else {
      order = total_order(a, b);
    }
    switch (op) {
      case CompareOp::Eq: return order == 0;
      case CompareOp::Neq: return order != 0 && order != std::partial_ordering::unordered;
      case CompareOp::Lt: return order < 0;
      case CompareOp::Le: return order <= 0;
      case CompareOp::Gt: return order > 0;
      case CompareOp::Ge: return order >= 0;
    }
    return false;
  }

  bool member(const Value& needle, const Value& haystack, const Context& ctx) const {
    if (needle.is_null() || haystack.is_null()) return false;
    auto list = haystack.get_if<List>();
    if (!list) type_error("IN expects a list but got " + render(haystack, store_), ctx);
    Category cn = category(needle);
    for (const auto& element : *list) {
      if (category(element) != cn) continue;
      if (cn == Category::Number ? needle.as_number() == element.as_number()
                                 : total_order(needle, element) == 0) {
        return true;
      }
    }
    return false;
  }

  Value eval(const Expr& e, const Context& ctx) const {
    switch (e.kind) {
      case ExprKind::Literal:
        return e.literal;
      case ExprKind::List: {
        List list;
        list.reserve(e.args.size());
        for (const auto& arg : e.args) list.push_back(eval(arg, ctx));
        return Value(std::move(list));
      }
      case ExprKind::Variable:
        return lookup(e.name, ctx);
      case ExprKind::Property: {
        Value target = lookup(e.name, ctx);
        if (target.is_null()) return Value();
        auto ref = target.get_if<NodeRef>();
        if (!ref) type_error("property access '" + e.name + "." + e.key + "' on a non-node value", ctx);
        const PropertyValue* p = store_.node(ref->id).find(e.key);
        return p ? from_property(*p) : Value();
      }
      case ExprKind::Placeholder:
        throw Error(ErrorCode::UnboundPlaceholder, "placeholder {" + e.name + "} is not bound");
      case ExprKind::Compare:
        return compare(eval(e.args[0], ctx), eval(e.args[1], ctx), e.op, ctx);
      case ExprKind::In:
        return member(eval(e.args[0], ctx), eval(e.args[1], ctx), ctx);
      case ExprKind::And:
        return truthy(eval(e.args[0], ctx), ctx) && truthy(eval(e.args[1], ctx), ctx);
      case ExprKind::Or:
        return truthy(eval(e.args[0], ctx), ctx) || truthy(eval(e.args[1], ctx), ctx);
      case ExprKind::Not:
        return !truthy(eval(e.args[0], ctx), ctx);
      case ExprKind::Call:
        return is_aggregate(e.fn) ? aggregate(e, ctx) : length(eval(e.args[0], ctx), ctx);
    }
    return Value();
  }

  Value length(const Value& v, const Context& ctx) const {
    if (v.is_null()) return Value();
    if (auto l = v.get_if<List>()) return Value(std::int64_t(l->size()));
    if (auto s = v.get_if<std::string>()) return Value(std::int64_t(utf8_length(*s)));
    type_error("length() expects a list or string but got " + render(v, store_), ctx);
  }

  Value aggregate(const Expr& e, const Context& ctx) const {
    if (!ctx.grouped) {
      throw Error(ErrorCode::ParseError, std::string(to_string(e.fn)) + "() outside WITH/RETURN");
    }
    std::vector<Value> values;
    values.reserve(ctx.group.size());
    for (const Row* row : ctx.group) {
      Context inner{ctx.columns, row, {}, false};
      Value v = eval(e.args[0], inner);
      if (!v.is_null()) values.push_back(std::move(v));
    }

    switch (e.fn) {
      case Function::Count:
        return Value(std::int64_t(values.size()));
      case Function::Collect: {
        if (!e.distinct) return Value(List(std::move(values)));
        List unique;
        std::set<Value, ValueLess> seen;
        for (auto& v : values) {
          if (seen.insert(v).second) unique.push_back(std::move(v));
        }
        return Value(std::move(unique));
      }
      case Function::Sum:
      case Function::Avg: {
        bool all_int = true;
        std::int64_t isum = 0;
        double dsum = 0;
        for (const auto& v : values) {
          if (!v.is_number()) type_error(std::string(to_string(e.fn)) + "() over non-numeric value " + render(v, store_), ctx);
          if (auto i = v.get_if<std::int64_t>()) {
            isum += *i;
          } else {
            all_int = false;
          }
          dsum += v.as_number();
        }
        if (e.fn == Function::Avg) {
          return values.empty() ? Value() : Value(dsum / double(values.size()));
        }
        return all_int ? Value(isum) : Value(dsum);
      }
      case Function::Min:
      case Function::Max: {
        if (values.empty()) return Value();
        const Value* best = &values.front();
        for (const auto& v : values) {
          Category c = category(v);
          if (c != category(*best) || c == Category::List || c == Category::Node || c == Category::Bool) {
            type_error(std::string(to_string(e.fn)) + "() over incomparable values", ctx);
          }
          bool better = e.fn == Function::Min ? compare(v, *best, CompareOp::Lt, ctx)
                                              : compare(v, *best, CompareOp::Gt, ctx);
          if (better) best = &v;
        }
        return *best;
      }
      case Function::Length:
        break;
    }
    return Value();
  }

  const GraphStore& store_;
};

}  // namespace

void sort_rows(BindingTable& table, const GraphStore& store) {
  const auto& rows = table.rows;
  std::vector<std::vector<std::string>> rendered(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rendered[r].reserve(rows[r].size());
    for (const auto& v : rows[r]) rendered[r].push_back(render(v, store));
  }
  auto node_ids = [&](std::size_t r) {
    std::vector<NodeId> ids;
    for (const auto& v : rows[r]) {
      if (auto ref = v.get_if<NodeRef>()) ids.push_back(ref->id);
    }
    return ids;
  };
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rendered[a] != rendered[b]) return rendered[a] < rendered[b];
    return node_ids(a) < node_ids(b);
  });
  std::vector<std::vector<Value>> sorted;
  sorted.reserve(rows.size());
  for (std::size_t i : order) sorted.push_back(std::move(table.rows[i]));
  table.rows = std::move(sorted);
}

BindingTable evaluate(const Query& query, const GraphStore& store) {
  return Evaluator(store).run(query);
}

BindingTable run_query(std::string_view text, const PlaceholderBindings& bindings,
                       const GraphStore& store) {
  return evaluate(bind_placeholders(parse(text), bindings), store);
}

}  // namespace agilelint::mql
