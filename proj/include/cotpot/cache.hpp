#pragma once

// Append-only completion cache.
//
// Persistent layout, one pair of files per provider under the cache directory:
//   <provider>.jsonl  one CacheRecord per line, never rewritten
//   <provider>.idx    "key offset length" per line; rebuilt from the JSONL
//                     file when missing or inconsistent with it
// A default-constructed cache keeps records in memory only.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cotpot/core.hpp"
#include "cotpot/provider.hpp"

namespace cotpot {

struct CacheKey {
    std::string provider_id;
    std::string model;
    std::string prompt;
    std::string prefix;
    SamplingParams params;
    std::int64_t max_new_tokens = 0;
    Seed seed = 0;

    /// 128-bit hex digest of the canonical key fields. n_samples is excluded:
    /// rollout i of a batch is keyed by its own seed.
    std::string digest() const;
};

struct CacheRecord {
    std::string key;
    Completion completion;
    std::optional<std::string> extracted_answer;
    bool correct = false;
};

nlohmann::json to_json(const CacheRecord& r);
CacheRecord cache_record_from_json(const nlohmann::json& j);

class RolloutCache {
public:
    RolloutCache();
    explicit RolloutCache(std::filesystem::path dir);
    ~RolloutCache();

    RolloutCache(const RolloutCache&) = delete;
    RolloutCache& operator=(const RolloutCache&) = delete;

    std::optional<CacheRecord> get(const std::string& provider_id, const std::string& key) const;
    /// First write wins; re-putting an existing key is a no-op.
    void put(const std::string& provider_id, const CacheRecord& record);

    std::size_t size(const std::string& provider_id) const;
    bool persistent() const { return !dir_.empty(); }
    const std::filesystem::path& dir() const { return dir_; }

    std::filesystem::path records_path(const std::string& provider_id) const;
    std::filesystem::path index_path(const std::string& provider_id) const;

private:
    struct Store;
    Store& store(const std::string& provider_id) const;

    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<std::string, std::unique_ptr<Store>> stores_;
};

}  // namespace cotpot
