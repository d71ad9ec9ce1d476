#pragma once

#include <string>

#include <json.hpp>

namespace agilelint::ingest {

struct RemoteOptions {
  /// "owner/name".
  std::string repository;
  std::string token;
  /// Scheme, host and optional port of the REST API.
  std::string base_url = "https://api.github.com";
  int timeout_seconds = 30;
  /// Stop paging after this many pages per listing; 0 means no limit.
  int max_pages = 0;
};

struct RemoteExport {
  nlohmann::json issues;   // issue-export document
  nlohmann::json commits;  // commit-export document
};

/// Downloads issues, their events, milestones and commits through the GitHub
/// REST API and converts them into export documents. Pull requests are
/// skipped. Throws Error(AuthFailure) on 401, RateLimited on an exhausted
/// quota and Error(NetworkError) on transport failures or other statuses.
RemoteExport fetch_remote(const RemoteOptions& options);

/// fetch_remote, then writes issues.json and commits.json into `directory`.
void fetch_remote_to(const RemoteOptions& options, const std::string& directory);

}  // namespace agilelint::ingest
