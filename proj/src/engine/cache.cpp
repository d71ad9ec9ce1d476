#include "agilelint/engine/cache.hpp"

#include <algorithm>

namespace agilelint::engine {

ResultCache::ResultCache(std::int64_t ttl_seconds, std::function<Timestamp()> clock)
    : ttl_(ttl_seconds), clock_(std::move(clock)) {}

std::optional<MetricResult> ResultCache::get(const CacheKey& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  if (clock_().seconds - it->second.stored_at.seconds >= ttl_) return std::nullopt;
  return it->second.result;
}

void ResultCache::put(const CacheKey& key, MetricResult result) {
  Timestamp now = clock_();
  std::lock_guard lock(mutex_);
  entries_.insert_or_assign(key, Entry{std::move(result), now});
}

void ResultCache::invalidate_metric(std::string_view metric_id) {
  std::lock_guard lock(mutex_);
  std::erase_if(entries_, [&](const auto& kv) { return kv.first.metric_id == metric_id; });
}

void ResultCache::invalidate_data_version(std::string_view digest) {
  std::lock_guard lock(mutex_);
  std::erase_if(entries_, [&](const auto& kv) { return kv.first.data_version == digest; });
}

void ResultCache::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
}

std::size_t ResultCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace agilelint::engine
