#include "agilelint/error.hpp"

namespace agilelint {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::UnknownRelType: return "UnknownRelType";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::DuplicateIssueNumber: return "DuplicateIssueNumber";
    case ErrorCode::DuplicateSha: return "DuplicateSha";
    case ErrorCode::AmbiguousSprintTitles: return "AmbiguousSprintTitles";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::LexError: return "LexError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ScopeError: return "ScopeError";
    case ErrorCode::UnboundPlaceholder: return "UnboundPlaceholder";
    case ErrorCode::PlaceholderTypeMismatch: return "PlaceholderTypeMismatch";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::UnknownBinding: return "UnknownBinding";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::AliasTargetMissing: return "AliasTargetMissing";
    case ErrorCode::NothingToAggregate: return "NothingToAggregate";
    case ErrorCode::CatalogInvalid: return "CatalogInvalid";
    case ErrorCode::UnknownMetric: return "UnknownMetric";
    case ErrorCode::DetectorUnknown: return "DetectorUnknown";
    case ErrorCode::UnknownTeam: return "UnknownTeam";
    case ErrorCode::UnknownSprint: return "UnknownSprint";
    case ErrorCode::StaleRevision: return "StaleRevision";
  }
  return "Unknown";
}

namespace {

std::string describe(const std::vector<CatalogIssue>& issues) {
  std::string message = "catalog invalid:";
  for (const auto& issue : issues) {
    message += " [" + issue.metric_id + "." + issue.field + ": " + issue.reason + "]";
  }
  return message;
}

}  // namespace

CatalogInvalid::CatalogInvalid(std::vector<CatalogIssue> issues)
    : Error(ErrorCode::CatalogInvalid, describe(issues)), issues_(std::move(issues)) {}

}  // namespace agilelint
