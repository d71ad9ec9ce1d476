#pragma once

#include <compare>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "agilelint/engine/evaluate.hpp"

namespace agilelint::engine {

struct CacheKey {
  std::string metric_id;
  std::int64_t metric_revision = 0;
  std::string team;
  std::string sprint;
  std::string data_version;

  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

/// Thread-safe result cache. An entry is served only for an exact key and
/// while younger than the ttl.
class ResultCache {
 public:
  explicit ResultCache(std::int64_t ttl_seconds = 900, std::function<Timestamp()> clock = now_utc);

  std::optional<MetricResult> get(const CacheKey& key) const;
  void put(const CacheKey& key, MetricResult result);

  void invalidate_metric(std::string_view metric_id);
  void invalidate_data_version(std::string_view digest);
  void clear();

  std::size_t size() const;
  std::int64_t ttl_seconds() const { return ttl_; }

 private:
  struct Entry {
    MetricResult result;
    Timestamp stored_at;
  };

  std::int64_t ttl_;
  std::function<Timestamp()> clock_;
  mutable std::mutex mutex_;
  std::map<CacheKey, Entry> entries_;
};

}  // namespace agilelint::engine
