#include "cotpot/cache.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "cotpot/text.hpp"

namespace cotpot {

namespace {

std::string hash128(std::string_view data) {
    return to_hex(fnv1a64(data)) + to_hex(fnv1a64(data, 0x84222325cbf29ce4ULL));
}

std::string sanitize(const std::string& id) {
    std::string out;
    for (char c : id) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_' ? c : '_');
    return out;
}

struct IndexEntry {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;  // excluding the newline
};

}  // namespace

std::string CacheKey::digest() const {
    char params_buf[128];
    std::snprintf(params_buf, sizeof(params_buf), "%.17g|%.17g|%lld|%lld|%llu", params.temperature, params.top_p,
                  static_cast<long long>(params.max_total_tokens), static_cast<long long>(max_new_tokens),
                  static_cast<unsigned long long>(seed));
    std::string canonical;
    canonical.reserve(256);
    canonical += provider_id;
    canonical += '\x1f';
    canonical += model;
    canonical += '\x1f';
    canonical += hash128(prompt);
    canonical += '\x1f';
    canonical += hash128(prefix);
    canonical += '\x1f';
    canonical += params_buf;
    return hash128(canonical);
}

nlohmann::json to_json(const CacheRecord& r) {
    return {{"key", r.key},
            {"completion",
             {{"text", r.completion.text},
              {"token_count", r.completion.token_count},
              {"finish_reason", to_string(r.completion.finish_reason)},
              {"provider_id", r.completion.provider_id}}},
            {"extracted_answer", r.extracted_answer ? nlohmann::json(*r.extracted_answer) : nlohmann::json(nullptr)},
            {"correct", r.correct}};
}

CacheRecord cache_record_from_json(const nlohmann::json& j) {
    CacheRecord r;
    r.key = j.at("key").get<std::string>();
    const auto& c = j.at("completion");
    r.completion.text = c.at("text").get<std::string>();
    r.completion.token_count = c.at("token_count").get<std::int64_t>();
    r.completion.finish_reason = parse_finish_reason(c.at("finish_reason").get<std::string>());
    r.completion.provider_id = c.at("provider_id").get<std::string>();
    if (j.contains("extracted_answer") && !j["extracted_answer"].is_null())
        r.extracted_answer = j["extracted_answer"].get<std::string>();
    r.correct = j.at("correct").get<bool>();
    return r;
}

struct RolloutCache::Store {
    mutable std::shared_mutex mutex;
    std::unordered_map<std::string, IndexEntry> index;
    std::unordered_map<std::string, CacheRecord> memory;
    std::filesystem::path records;
    std::filesystem::path index_file;
    std::ofstream records_out;
    std::ofstream index_out;
    std::uint64_t records_size = 0;

    bool load_index() {
        std::ifstream in(index_file);
        if (!in) return false;
        std::string line;
        std::uint64_t end = 0;
        std::string last_key;
        while (std::getline(in, line)) {
            std::istringstream ss(line);
            std::string key;
            IndexEntry e;
            if (!(ss >> key >> e.offset >> e.length)) return false;
            if (e.offset + e.length + 1 > records_size) return false;
            index[key] = e;
            end = std::max(end, e.offset + e.length + 1);
            last_key = key;
        }
        if (end != records_size) return false;
        if (last_key.empty()) return records_size == 0;
        // Spot-check the newest entry against the records file.
        auto rec = read(index[last_key]);
        return rec && rec->key == last_key;
    }

    void rebuild_index() {
        index.clear();
        std::ifstream in(records, std::ios::binary);
        std::string line;
        std::uint64_t offset = 0;
        std::uint64_t valid_end = 0;
        while (std::getline(in, line)) {
            const bool complete = !in.eof();
            const std::uint64_t length = line.size();
            if (complete) {
                try {
                    auto j = nlohmann::json::parse(line);
                    index.emplace(j.at("key").get<std::string>(), IndexEntry{offset, length});
                } catch (const nlohmann::json::exception&) {
                    // corrupt line: leave it in place, just do not index it
                }
                valid_end = offset + length + 1;
            }
            offset += length + 1;
        }
        in.close();
        if (valid_end < records_size) {
            // torn write from an interrupted run
            std::filesystem::resize_file(records, valid_end);
            records_size = valid_end;
        }
        std::ofstream out(index_file, std::ios::trunc);
        std::vector<std::pair<std::string, IndexEntry>> sorted(index.begin(), index.end());
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second.offset < b.second.offset; });
        for (const auto& [key, e] : sorted) out << key << ' ' << e.offset << ' ' << e.length << '\n';
    }

    std::optional<CacheRecord> read(const IndexEntry& e) const {
        std::ifstream in(records, std::ios::binary);
        in.seekg(static_cast<std::streamoff>(e.offset));
        std::string line(e.length, '\0');
        if (!in.read(line.data(), static_cast<std::streamsize>(e.length))) return std::nullopt;
        try {
            return cache_record_from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception&) {
            return std::nullopt;
        }
    }

    void open(const std::filesystem::path& dir, const std::string& provider_id) {
        std::filesystem::create_directories(dir);
        records = dir / (sanitize(provider_id) + ".jsonl");
        index_file = dir / (sanitize(provider_id) + ".idx");
        records_size = std::filesystem::exists(records) ? std::filesystem::file_size(records) : 0;
        if (!load_index()) {
            index.clear();
            rebuild_index();
        }
        records_out.open(records, std::ios::binary | std::ios::app);
        index_out.open(index_file, std::ios::app);
        if (!records_out || !index_out) throw Error("cannot open cache files under " + dir.string());
    }
};

RolloutCache::RolloutCache() = default;

RolloutCache::RolloutCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

RolloutCache::~RolloutCache() = default;

std::filesystem::path RolloutCache::records_path(const std::string& provider_id) const {
    return dir_ / (sanitize(provider_id) + ".jsonl");
}

std::filesystem::path RolloutCache::index_path(const std::string& provider_id) const {
    return dir_ / (sanitize(provider_id) + ".idx");
}

RolloutCache::Store& RolloutCache::store(const std::string& provider_id) const {
    {
        std::shared_lock lock(mutex_);
        if (auto it = stores_.find(provider_id); it != stores_.end()) return *it->second;
    }
    std::unique_lock lock(mutex_);
    auto& slot = stores_[provider_id];
    if (!slot) {
        auto s = std::make_unique<Store>();
        if (!dir_.empty()) s->open(dir_, provider_id);
        slot = std::move(s);
    }
    return *slot;
}

std::optional<CacheRecord> RolloutCache::get(const std::string& provider_id, const std::string& key) const {
    auto& s = store(provider_id);
    std::shared_lock lock(s.mutex);
    if (dir_.empty()) {
        auto it = s.memory.find(key);
        if (it == s.memory.end()) return std::nullopt;
        return it->second;
    }
    auto it = s.index.find(key);
    if (it == s.index.end()) return std::nullopt;
    return s.read(it->second);
}

void RolloutCache::put(const std::string& provider_id, const CacheRecord& record) {
    auto& s = store(provider_id);
    std::unique_lock lock(s.mutex);
    if (dir_.empty()) {
        s.memory.emplace(record.key, record);
        return;
    }
    if (s.index.count(record.key)) return;
    const std::string line = to_json(record).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    const IndexEntry e{s.records_size, line.size()};
    s.records_out << line << '\n';
    s.records_out.flush();
    s.index_out << record.key << ' ' << e.offset << ' ' << e.length << '\n';
    s.index_out.flush();
    if (!s.records_out || !s.index_out) throw Error("cache write failed for provider " + provider_id);
    s.records_size += line.size() + 1;
    s.index.emplace(record.key, e);
}

std::size_t RolloutCache::size(const std::string& provider_id) const {
    auto& s = store(provider_id);
    std::shared_lock lock(s.mutex);
    return dir_.empty() ? s.memory.size() : s.index.size();
}

}  // namespace cotpot
