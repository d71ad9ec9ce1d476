#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "agilelint/engine/engine.hpp"
#include "agilelint/error.hpp"
#include "agilelint/fixture.hpp"
#include "agilelint/ingest.hpp"
#include "agilelint/remote.hpp"
#include "agilelint/service/report.hpp"
#include "agilelint/service/server.hpp"
#include "agilelint/snapshot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace agilelint;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kValidation = 2;
constexpr int kRuntime = 3;

/// Failure carrying the exit status it maps to.
struct Failure {
  int status;
  std::string code;
  std::string message;
  json details = nullptr;
};

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::AuthFailure:
    case ErrorCode::RateLimited:
    case ErrorCode::NetworkError:
    case ErrorCode::NothingToAggregate:
      return kRuntime;
    default:
      return kValidation;
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kUsage, "FileNotReadable", "cannot read " + path.string()};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw Failure{kValidation, "MalformedJson", path.string() + ": " + e.what()};
  }
}

void write_text(const fs::path& path, const std::string& text, bool append = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, append ? std::ios::binary | std::ios::app : std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Failure{kRuntime, "WriteFailed", "cannot write " + path.string()};
}

ingest::ProjectConfig project_config(const std::string& path) {
  return path.empty() ? ingest::ProjectConfig{} : ingest::load_project_config(read_json(path));
}

service::ServiceConfig service_config(const std::string& path) {
  return path.empty() ? service::ServiceConfig{} : service::load_service_config(read_json(path));
}

engine::Catalog catalog_from(const std::string& path) {
  return path.empty() ? engine::builtin_catalog() : engine::load_catalog(read_json(path));
}

std::unique_ptr<engine::Engine> make_engine(const std::string& snapshot, const std::string& catalog,
                                            const std::string& config) {
  auto project = project_config(config);
  auto svc = service_config(config);
  GraphStore store = read_snapshot(snapshot);
  auto e = std::make_unique<engine::Engine>(std::move(store), project, catalog_from(catalog),
                                            engine::EngineOptions{.cache_ttl_seconds = svc.cache_ttl_seconds});
  if (svc.severity_weights) e->set_severity_weights(*svc.severity_weights);
  return e;
}

std::vector<engine::MetricResult> read_results(const fs::path& path) {
  std::vector<engine::MetricResult> results;
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      results.push_back(engine::result_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Failure{kValidation, "MalformedResults", path.string() + ":" + std::to_string(number) + ": " + e.what()};
    }
  }
  return results;
}

struct Options {
  std::string format = "text";
  // ingest
  std::string issues, commits, tests, config, out;
  // evaluate / serve
  std::string snapshot, catalog;
  bool append = false;
  int port = -1;
  std::string host = "127.0.0.1";
  std::string static_dir;
  // report
  std::string results, team, sprint;
  std::size_t top = 5;
  // fixture
  std::uint64_t seed = 1;
  std::string scale = "full";
  // fetch
  std::string repo, token, base_url = "https://api.github.com";
  int max_pages = 0;
};

int run_ingest(const Options& o) {
  json issues = read_json(o.issues);
  json commits = o.commits.empty() ? json(nullptr) : read_json(o.commits);
  json runs = o.tests.empty() ? json(nullptr) : read_json(o.tests);
  auto project = ingest::load_project(issues, commits, runs);
  auto config = project_config(o.config);
  auto sprints = ingest::extract_sprints(project.store, config);
  auto teams = ingest::extract_teams(project.store, config);
  write_snapshot(project.store, o.out);
  for (const auto& w : project.report.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "nodes " << project.store.node_count() << ", edges " << project.store.edge_count() << ", teams "
            << teams.size() << ", sprints " << sprints.size() << "\n"
            << "data_version " << data_version(project.store).digest << "\n";
  return kOk;
}

int run_evaluate(const Options& o) {
  auto e = make_engine(o.snapshot, o.catalog, o.config);
  auto matrix = e->evaluate_all();
  std::string lines;
  std::size_t count = 0;
  for (const auto& cell : matrix.cells) {
    for (const auto& r : cell.results) {
      lines += engine::to_json(r).dump() + "\n";
      ++count;
    }
  }
  write_text(o.out, lines, o.append);
  std::cout << count << " results for " << matrix.teams.size() << " teams and " << matrix.sprints.size()
            << " sprints\n";
  return kOk;
}

int run_report(const Options& o) {
  auto matrix = engine::matrix_from_results(read_results(o.results));
  service::ReportOptions options;
  if (!o.team.empty()) options.team = o.team;
  if (!o.sprint.empty()) options.sprint = o.sprint;
  options.top_violations = o.top;
  std::string text = o.format == "json" ? service::report_json(matrix, options) : service::report_text(matrix, options);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_text(o.out, text);
  }
  return kOk;
}

service::ApiServer* active_server = nullptr;

void on_signal(int) {
  if (active_server) active_server->stop();
}

int run_serve(const Options& o) {
  auto e = make_engine(o.snapshot, o.catalog, o.config);
  auto svc = service_config(o.config);
  service::ServerOptions options;
  options.host = o.host;
  options.port = o.port >= 0 ? o.port : svc.port;
  if (!o.static_dir.empty()) options.static_dir = o.static_dir;
  service::ApiServer server(*e, options);
  active_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  int port = server.bind();
  std::cout << "listening on http://" << options.host << ":" << port << std::endl;
  server.serve();
  active_server = nullptr;
  return kOk;
}

int run_validate(const Options& o) {
  auto catalog = catalog_from(o.catalog);
  std::cout << catalog.metrics.size() << " metrics OK\n";
  return kOk;
}

int run_fixture(const Options& o) {
  auto fixture = ingest::generate_fixture(o.seed, ingest::parse_scale(o.scale == "full" ? "" : o.scale));
  fs::path dir(o.out);
  write_text(dir / "issues.json", fixture.issues.dump(2) + "\n");
  write_text(dir / "commits.json", fixture.commits.dump(2) + "\n");
  write_text(dir / "tests.json", fixture.runs.dump(2) + "\n");
  write_text(dir / "manifest.json", fixture.manifest.dump(2) + "\n");
  std::cout << fixture.issues["issues"].size() << " issues, " << fixture.commits["commits"].size() << " commits, "
            << fixture.manifest["violations"].size() << " injected violations\n";
  return kOk;
}

int run_fetch(const Options& o) {
  ingest::RemoteOptions options;
  options.repository = o.repo;
  options.token = o.token;
  options.base_url = o.base_url;
  options.max_pages = o.max_pages;
  ingest::fetch_remote_to(options, o.out);
  std::cout << "wrote " << (fs::path(o.out) / "issues.json").string() << " and "
            << (fs::path(o.out) / "commits.json").string() << "\n";
  return kOk;
}

void report_failure(const Failure& f, const std::string& format) {
  if (format == "json") {
    json body = {{"error", f.code}, {"message", f.message}, {"exit", f.status}};
    if (!f.details.is_null()) body["details"] = f.details;
    std::cerr << body.dump() << "\n";
  } else {
    std::cerr << "agilelint: " << f.message << "\n";
  }
}

Failure to_failure(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const Failure& f) {
    return f;
  } catch (const CatalogInvalid& e) {
    json issues = json::array();
    for (const auto& i : e.issues()) {
      issues.push_back({{"metric_id", i.metric_id}, {"field", i.field}, {"reason", i.reason}, {"offset", i.offset}});
    }
    std::string message = e.what();
    for (const auto& i : e.issues()) message += "\n  " + i.metric_id + " " + i.field + ": " + i.reason;
    return {kValidation, "CatalogInvalid", message, issues};
  } catch (const RateLimited& e) {
    return {kRuntime, "RateLimited", e.what(), {{"retry_after_seconds", e.retry_after_seconds()}}};
  } catch (const Error& e) {
    return {exit_status(e.code()), std::string(to_string(e.code())), e.what()};
  } catch (const fs::filesystem_error& e) {
    return {kRuntime, "FilesystemError", e.what()};
  } catch (const std::exception& e) {
    return {kRuntime, "InternalError", e.what()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agilelint: conformance metrics over agile process data"};
  app.require_subcommand(1);
  Options o;
  auto format = [&](CLI::App* sub, const char* help) {
    sub->add_option("--format", o.format, help)->check(CLI::IsMember({"text", "json"}));
  };

  auto* ingest_cmd = app.add_subcommand("ingest", "Load export files into a snapshot");
  ingest_cmd->add_option("--issues", o.issues, "Issue export")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--commits", o.commits, "Commit export")->check(CLI::ExistingFile);
  ingest_cmd->add_option("--tests", o.tests, "Test run export")->check(CLI::ExistingFile);
  ingest_cmd->add_option("--config", o.config, "Project config")->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", o.out, "Snapshot to write")->required();
  format(ingest_cmd, "Error format");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate the catalog over a snapshot");
  evaluate_cmd->add_option("--snapshot", o.snapshot, "Snapshot file")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--catalog", o.catalog, "Catalog file (default: built-in)")->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--config", o.config, "Project and service config")->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--out", o.out, "Results file (JSON lines)")->required();
  evaluate_cmd->add_flag("--append", o.append, "Append instead of overwrite");
  format(evaluate_cmd, "Error format");

  auto* report_cmd = app.add_subcommand("report", "Render a report from results");
  report_cmd->add_option("--results", o.results, "Results file")->required()->check(CLI::ExistingFile);
  format(report_cmd, "Output format");
  report_cmd->add_option("--team", o.team, "Restrict to one team label");
  report_cmd->add_option("--sprint", o.sprint, "Restrict to one sprint title");
  report_cmd->add_option("--top", o.top, "Violations listed per metric");
  report_cmd->add_option("--out", o.out, "Write to a file instead of stdout");

  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  serve_cmd->add_option("--snapshot", o.snapshot, "Snapshot file")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--catalog", o.catalog, "Catalog file (default: built-in)")->check(CLI::ExistingFile);
  serve_cmd->add_option("--config", o.config, "Project and service config")->check(CLI::ExistingFile);
  serve_cmd->add_option("--port", o.port, "Port (default: config, else 8080)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", o.host, "Bind address");
  serve_cmd->add_option("--static", o.static_dir, "Directory served at /")->check(CLI::ExistingDirectory);
  format(serve_cmd, "Error format");

  auto* validate_cmd = app.add_subcommand("validate-metrics", "Validate a metric catalog");
  validate_cmd->add_option("--catalog", o.catalog, "Catalog file (default: built-in)")->check(CLI::ExistingFile);
  format(validate_cmd, "Error format");

  auto* fixture_cmd = app.add_subcommand("fixture", "Generate a synthetic project");
  fixture_cmd->add_option("--seed", o.seed, "Generator seed");
  fixture_cmd->add_option("--scale", o.scale, "\"full\" or k=v,... (teams, sprints, stories, metric ids)");
  fixture_cmd->add_option("--out", o.out, "Output directory")->required();
  format(fixture_cmd, "Error format");

  auto* fetch_cmd = app.add_subcommand("fetch", "Download exports from a GitHub repository");
  fetch_cmd->add_option("--repo", o.repo, "owner/name")->required();
  fetch_cmd->add_option("--token", o.token, "API token")->envname("GITHUB_TOKEN");
  fetch_cmd->add_option("--base-url", o.base_url, "API base URL");
  fetch_cmd->add_option("--max-pages", o.max_pages, "Page limit per listing (0: none)");
  fetch_cmd->add_option("--out", o.out, "Output directory")->required();
  format(fetch_cmd, "Error format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string fmt;
    for (int k = 1; k + 1 < argc; ++k) {
      if (std::string(argv[k]) == "--format") fmt = argv[k + 1];
    }
    report_failure({kUsage, "UsageError", e.what()}, fmt);
    return kUsage;
  }

  try {
    if (*ingest_cmd) return run_ingest(o);
    if (*evaluate_cmd) return run_evaluate(o);
    if (*report_cmd) return run_report(o);
    if (*serve_cmd) return run_serve(o);
    if (*validate_cmd) return run_validate(o);
    if (*fixture_cmd) return run_fixture(o);
    if (*fetch_cmd) return run_fetch(o);
  } catch (...) {
    Failure f = to_failure(std::current_exception());
    report_failure(f, o.format);
    return f.status;
  }
  return kUsage;
}
