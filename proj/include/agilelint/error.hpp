#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace agilelint {

enum class ErrorCode {
  // graph store
  UnknownLabel,
  UnknownRelType,
  UnknownNode,
  DanglingEndpoint,
  // ingest
  SchemaViolation,
  DuplicateIssueNumber,
  DuplicateSha,
  AmbiguousSprintTitles,
  InvalidConfig,
  AuthFailure,
  RateLimited,
  NetworkError,
  // query language
  LexError,
  ParseError,
  ScopeError,
  UnboundPlaceholder,
  PlaceholderTypeMismatch,
  TypeError,
  // rating expressions and aggregation
  UnknownFunction,
  ArityError,
  UnknownBinding,
  DegenerateInput,
  AliasTargetMissing,
  NothingToAggregate,
  // engine
  CatalogInvalid,
  UnknownMetric,
  DetectorUnknown,
  UnknownTeam,
  UnknownSprint,
  StaleRevision,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the library. `code()` identifies the failure
/// class; `what()` carries a human readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Lexing, parsing and scope errors of the two expression languages. `offset`
/// is a byte offset into the source text.
class SyntaxError : public Error {
 public:
  SyntaxError(ErrorCode code, std::size_t offset, std::string expected, std::string found,
              const std::string& message)
      : Error(code, message),
        offset_(offset),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  std::size_t offset_;
  std::string expected_;
  std::string found_;
};

class SchemaViolation : public Error {
 public:
  SchemaViolation(std::string path, const std::string& reason)
      : Error(ErrorCode::SchemaViolation, path + ": " + reason), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class RateLimited : public Error {
 public:
  RateLimited(long retry_after_seconds, const std::string& message)
      : Error(ErrorCode::RateLimited, message), retry_after_(retry_after_seconds) {}

  long retry_after_seconds() const noexcept { return retry_after_; }

 private:
  long retry_after_;
};

struct CatalogIssue {
  std::string metric_id;
  std::string field;
  std::string reason;
  std::ptrdiff_t offset = -1;  // into the offending text, -1 when not applicable
};

class CatalogInvalid : public Error {
 public:
  explicit CatalogInvalid(std::vector<CatalogIssue> issues);

  const std::vector<CatalogIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<CatalogIssue> issues_;
};

}  // namespace agilelint
