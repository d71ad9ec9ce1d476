#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "agilelint/engine/engine.hpp"
#include "agilelint/error.hpp"
#include "agilelint/fixture.hpp"
#include "agilelint/ingest.hpp"
#include "agilelint/mql/evaluator.hpp"
#include "agilelint/scoring/rating.hpp"
#include "agilelint/service/report.hpp"
#include "agilelint/snapshot.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace al = agilelint;

namespace {

json parse(const std::string& text) {
  if (text.empty()) return nullptr;
  return json::parse(text);
}

al::mql::Value to_value(const json& v) {
  switch (v.type()) {
    case json::value_t::boolean: return al::mql::Value(v.get<bool>());
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: return al::mql::Value(v.get<std::int64_t>());
    case json::value_t::number_float: return al::mql::Value(v.get<double>());
    case json::value_t::string: return al::mql::Value(v.get<std::string>());
    case json::value_t::array: {
      al::mql::List list;
      for (const auto& item : v) list.push_back(to_value(item));
      return al::mql::Value(std::move(list));
    }
    default: return al::mql::Value();
  }
}

al::engine::Catalog catalog_from(const std::string& text) {
  return text.empty() ? al::engine::builtin_catalog() : al::engine::load_catalog(json::parse(text));
}

al::ingest::ProjectConfig config_from(const std::string& text) {
  return text.empty() ? al::ingest::ProjectConfig{} : al::ingest::load_project_config(json::parse(text));
}

std::vector<al::engine::MetricResult> results_from(const std::string& text) {
  std::vector<al::engine::MetricResult> out;
  for (const auto& r : json::parse(text)) out.push_back(al::engine::result_from_json(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "agilelint core; documents cross the boundary as JSON text";

  static py::exception<al::Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const al::Error& e) {
      py::tuple args = py::make_tuple(std::string(al::to_string(e.code())), std::string(e.what()));
      PyErr_SetObject(error.ptr(), args.ptr());
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("eval_rating", [](const std::string& expression, const std::map<std::string, double>& bindings) {
    return al::scoring::eval_rating(al::scoring::parse_rating(expression),
                                    al::scoring::ScoreBindings(bindings.begin(), bindings.end()));
  });

  m.def(
      "run_query",
      [](const std::string& query, const std::string& snapshot, const std::string& placeholders) {
        al::GraphStore store = al::from_snapshot(json::parse(snapshot));
        al::mql::PlaceholderBindings bindings;
        json given = placeholders.empty() ? json::object() : json::parse(placeholders);
        for (const auto& [name, v] : given.items()) bindings[name] = to_value(v);
        auto table = al::mql::run_query(query, bindings, store);
        json rows = json::array();
        for (const auto& row : table.rows) {
          json cells = json::array();
          for (const auto& cell : row) cells.push_back(al::mql::render(cell, store));
          rows.push_back(std::move(cells));
        }
        return json{{"columns", table.columns}, {"rows", std::move(rows)}}.dump();
      },
      py::arg("query"), py::arg("snapshot"), py::arg("placeholders") = "");

  m.def("generate_fixture", [](std::uint64_t seed, const std::string& scale) {
    auto f = al::ingest::generate_fixture(seed, al::ingest::parse_scale(scale));
    return json{{"issues", f.issues}, {"commits", f.commits}, {"runs", f.runs}, {"manifest", f.manifest}}.dump();
  });

  m.def(
      "ingest",
      [](const std::string& issues, const std::string& commits, const std::string& runs) {
        auto project = al::ingest::load_project(parse(issues), parse(commits), parse(runs));
        return al::to_snapshot(project.store).dump();
      },
      py::arg("issues"), py::arg("commits") = "", py::arg("runs") = "");

  m.def("data_version", [](const std::string& snapshot) {
    return al::data_version(al::from_snapshot(json::parse(snapshot))).digest;
  });

  m.def("builtin_catalog", [] { return al::engine::to_json(al::engine::builtin_catalog()).dump(); });

  m.def("validate_catalog", [](const std::string& catalog) {
    return al::engine::to_json(al::engine::load_catalog(json::parse(catalog))).dump();
  });

  m.def(
      "evaluate",
      [](const std::string& snapshot, const std::string& catalog, const std::string& config) {
        al::engine::Engine engine(al::from_snapshot(json::parse(snapshot)), config_from(config),
                                  catalog_from(catalog));
        auto matrix = engine.evaluate_all(true);
        json out = json::array();
        for (const auto& cell : matrix.cells) {
          for (const auto& r : cell.results) out.push_back(al::engine::to_json(r));
        }
        return out.dump();
      },
      py::arg("snapshot"), py::arg("catalog") = "", py::arg("config") = "");

  m.def(
      "report",
      [](const std::string& results, const std::string& format, std::optional<std::string> team,
         std::optional<std::string> sprint) {
        auto matrix = al::engine::matrix_from_results(results_from(results));
        al::service::ReportOptions options{team, sprint};
        if (format == "text") return al::service::report_text(matrix, options);
        if (format != "json") throw py::value_error("format must be 'json' or 'text'");
        return al::service::report_json(matrix, options);
      },
      py::arg("results"), py::arg("format") = "json", py::arg("team") = py::none(), py::arg("sprint") = py::none());
}
