#include "agilelint/mql/value.hpp"

#include <charconv>
#include <cmath>

namespace agilelint::mql {

namespace {

// Rank of each alternative in the total order; ints and floats share a rank.
int type_rank(const Value& v) {
  switch (v.data.index()) {
    case 0: return 0;  // null
    case 1: return 1;  // bool
    case 2:
    case 3: return 2;  // number
    case 4: return 3;  // string
    case 5: return 4;  // timestamp
    case 6: return 5;  // node
    default: return 6;  // list
  }
}

std::strong_ordering compare_numbers(const Value& a, const Value& b) {
  auto ai = a.get_if<std::int64_t>();
  auto bi = b.get_if<std::int64_t>();
  if (ai && bi) return *ai <=> *bi;
  double x = a.as_number();
  double y = b.as_number();
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  if (x == y) {
    // Equal magnitudes: floats before ints so that 1 and 1.0 stay distinct keys.
    return (ai != nullptr) <=> (bi != nullptr);
  }
  bool xn = std::isnan(x), yn = std::isnan(y);
  return xn <=> yn;
}

void render_into(std::string& out, const Value& value, const GraphStore& store, bool nested) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          out += "null";
        } else if constexpr (std::is_same_v<T, bool>) {
          out += v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          out += std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          out += format_number(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (nested) {
            out += '"';
            for (char c : v) {
              if (c == '"' || c == '\\') out += '\\';
              out += c;
            }
            out += '"';
          } else {
            out += v;
          }
        } else if constexpr (std::is_same_v<T, Timestamp>) {
          out += format_iso8601(v);
        } else if constexpr (std::is_same_v<T, NodeRef>) {
          out += node_ref(store, v.id);
        } else {
          out += '[';
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ", ";
            render_into(out, v[i], store, true);
          }
          out += ']';
        }
      },
      value.data);
}

}  // namespace

double Value::as_number() const {
  if (auto i = get_if<std::int64_t>()) return double(*i);
  if (auto d = get_if<double>()) return *d;
  return std::nan("");
}

Value from_property(const PropertyValue& value) {
  return std::visit(
      [](const auto& v) -> Value {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TextList>) {
          List list;
          list.reserve(v.size());
          for (const auto& s : v) list.emplace_back(s);
          return Value(std::move(list));
        } else {
          return Value(v);
        }
      },
      value);
}

std::strong_ordering total_order(const Value& a, const Value& b) {
  int ra = type_rank(a), rb = type_rank(b);
  if (ra != rb) return ra <=> rb;
  switch (ra) {
    case 0: return std::strong_ordering::equal;
    case 1: return *a.get_if<bool>() <=> *b.get_if<bool>();
    case 2: return compare_numbers(a, b);
    case 3: return a.get_if<std::string>()->compare(*b.get_if<std::string>()) <=> 0;
    case 4: return *a.get_if<Timestamp>() <=> *b.get_if<Timestamp>();
    case 5: return *a.get_if<NodeRef>() <=> *b.get_if<NodeRef>();
    default: {
      const auto& la = *a.get_if<List>();
      const auto& lb = *b.get_if<List>();
      for (std::size_t i = 0; i < la.size() && i < lb.size(); ++i) {
        auto c = total_order(la[i], lb[i]);
        if (c != 0) return c;
      }
      return la.size() <=> lb.size();
    }
  }
}

bool RowLess::operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    auto c = total_order(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

std::string node_ref(const GraphStore& store, NodeId id) {
  const Node& node = store.node(id);
  for (const char* key : {"url", "sha", "login", "path", "title", "name"}) {
    if (auto p = node.find(key)) {
      if (auto s = std::get_if<std::string>(p)) return *s;
    }
  }
  return std::string(to_string(node.label)) + ":" + std::to_string(id);
}

std::string render(const Value& value, const GraphStore& store) {
  std::string out;
  render_into(out, value, store, false);
  return out;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "Infinity" : "-Infinity";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string text(buf, end);
  if (text.find_first_of(".en") == std::string::npos) text += ".0";
  return text;
}

}  // namespace agilelint::mql
