#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotpot/cache.hpp"
#include "cotpot/core.hpp"
#include "cotpot/provider.hpp"
#include "cotpot/sampler.hpp"
#include "cotpot/toy_lm.hpp"

namespace cotpot::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(COTPOT_FIXTURE_DIR) / name;
}

inline nlohmann::json fixture_json(const std::string& name) {
    std::ifstream in(fixture_path(name));
    return nlohmann::json::parse(in);
}

inline ToyLM load_toy(const std::string& name) { return ToyLM::load(fixture_path(name)); }

inline Question make_question(std::string id, std::string gold, AnswerKind kind = AnswerKind::integer,
                              std::string prompt = "") {
    Question q;
    q.prompt = prompt.empty() ? "Prompt for " + id : std::move(prompt);
    q.id = std::move(id);
    q.gold_answer = std::move(gold);
    q.kind = kind;
    return q;
}

inline SamplingParams params_with(std::int64_t n, Seed seed = 0, std::int64_t max_tokens = 32768) {
    SamplingParams p;
    p.n_samples = n;
    p.seed = seed;
    p.max_total_tokens = max_tokens;
    return p;
}

/// Toy provider, in-memory cache and sampler bundled for tests.
struct ToyHarness {
    explicit ToyHarness(ToyLM toy, std::string id = "toy")
        : provider(std::move(id), std::move(toy)), sampler(provider, cache) {}
    explicit ToyHarness(const std::string& fixture) : ToyHarness(load_toy(fixture)) {}

    ToyProvider provider;
    RolloutCache cache;
    Sampler sampler;
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("cotpot-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline PotentialCurve curve_from(const std::vector<double>& estimates, std::string qid = "q") {
    PotentialCurve c;
    c.question_id = std::move(qid);
    for (std::size_t i = 0; i < estimates.size(); ++i)
        c.points.push_back({static_cast<double>(i + 1) / static_cast<double>(estimates.size()), estimates[i], 1024});
    return c;
}

/// Twenty 20-point curves whose flags count to 8 insights, 1 tangent,
/// 4 late spikes and 9 monotone curves under the default thresholds.
inline std::vector<PotentialCurve> mixed_shape_curves() {
    std::vector<PotentialCurve> out;
    auto add = [&](std::vector<double> v) { out.push_back(curve_from(v, "q" + std::to_string(out.size()))); };
    for (int i = 0; i < 8; ++i) {  // insight at chunk 7, otherwise monotone
        std::vector<double> v(20, 0.2);
        for (std::size_t j = 7; j < 20; ++j) v[j] = 0.8;
        add(v);
    }
    for (int i = 0; i < 4; ++i) {  // near zero with 0.12 wiggles, spike on the last chunk
        std::vector<double> v(20, 0.0);
        for (std::size_t j = 0; j < 18; j += 2) v[j] = 0.12;
        v[19] = 1.0;
        add(v);
    }
    {  // single 0.35 drop
        std::vector<double> v(20, 0.25);
        for (std::size_t j = 0; j < 6; ++j) v[j] = 0.6;
        v[19] = 0.5;
        add(v);
    }
    add(std::vector<double>(20, 0.5));  // flat
    for (int i = 0; i < 6; ++i) {  // 0.15 wiggles: breaks monotonicity, nothing else
        std::vector<double> v(20, 0.5);
        for (std::size_t j = 1; j < 20; j += 2) v[j] = 0.35;
        add(v);
    }
    return out;
}

inline bool within_sigmas(double estimate, double p, std::int64_t n, double k = 3.0) {
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return std::abs(estimate - p) <= k * sigma + 1e-12;
}

inline std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

/// Brute-force potential computed straight from fixture JSON, sharing no code
/// with ToyLM or the library oracle. Histories are space-joined symbol names.
class ReferenceOracle {
public:
    explicit ReferenceOracle(const nlohmann::json& j) : horizon_(j.at("horizon").get<std::size_t>()) {
        for (const auto& row : j.at("transitions")) {
            std::map<std::string, double> next;
            for (const auto& [sym, p] : row.at("next").items()) next[sym] = p.get<double>();
            rows_[row.at("history").get<std::string>()] = next;
        }
        if (j.contains("answer_rule")) {
            const auto& r = j.at("answer_rule");
            if (r.contains("by_history"))
                for (const auto& [h, a] : r.at("by_history").items()) by_history_[h] = a.get<std::string>();
            if (r.contains("by_last_symbol"))
                for (const auto& [s, a] : r.at("by_last_symbol").items()) by_last_[s] = a.get<std::string>();
            if (r.contains("default") && !r.at("default").is_null()) default_ = r.at("default").get<std::string>();
        }
    }
    explicit ReferenceOracle(const std::string& fixture) : ReferenceOracle(fixture_json(fixture)) {}
    explicit ReferenceOracle(const char* fixture) : ReferenceOracle(std::string(fixture)) {}

    std::optional<std::string> answer(const std::vector<std::string>& history) const {
        if (auto it = by_history_.find(join(history, 0)); it != by_history_.end()) return it->second;
        if (!history.empty())
            if (auto it = by_last_.find(history.back()); it != by_last_.end()) return it->second;
        return default_;
    }

    /// P(answer satisfies `accept` | the symbol prefix), where "</s>" may end the prefix.
    double value(const std::vector<std::string>& prefix,
                 const std::function<bool(const std::optional<std::string>&)>& accept) const {
        std::vector<std::string> history;
        double mass = 1.0;
        bool ended = false;
        for (const auto& s : prefix) {
            if (ended || history.size() >= horizon_) return std::nan("");
            const double p = next_prob(history, s);
            mass *= p;
            if (s == "</s>")
                ended = true;
            else
                history.push_back(s);
        }
        if (mass <= 0.0) return std::nan("");
        return walk(history, ended, accept);
    }

    double potential(const std::vector<std::string>& prefix, const std::string& gold) const {
        return value(prefix, [&](const std::optional<std::string>& a) { return a && *a == gold; });
    }

    /// Sum of all full-path probabilities from the empty prefix.
    double total_mass() const {
        return value({}, [](const std::optional<std::string>&) { return true; });
    }

private:
    static std::string join(const std::vector<std::string>& h, std::size_t from) {
        std::string out;
        for (std::size_t i = from; i < h.size(); ++i) out += (out.empty() ? "" : " ") + h[i];
        return out;
    }

    const std::map<std::string, double>& row(const std::vector<std::string>& h) const {
        for (std::size_t from = 0; from <= h.size(); ++from)
            if (auto it = rows_.find(join(h, from)); it != rows_.end()) return it->second;
        throw std::runtime_error("reference oracle: no row");
    }

    double next_prob(const std::vector<std::string>& h, const std::string& s) const {
        const auto& r = row(h);
        auto it = r.find(s);
        return it == r.end() ? 0.0 : it->second;
    }

    double walk(std::vector<std::string>& h, bool ended,
                const std::function<bool(const std::optional<std::string>&)>& accept) const {
        if (ended || h.size() >= horizon_) return accept(answer(h)) ? 1.0 : 0.0;
        double total = 0.0;
        for (const auto& [s, p] : row(h)) {
            if (p <= 0.0) continue;
            if (s == "</s>") {
                total += p * walk(h, true, accept);
                continue;
            }
            h.push_back(s);
            total += p * walk(h, false, accept);
            h.pop_back();
        }
        return total;
    }

    std::size_t horizon_;
    std::map<std::string, std::map<std::string, double>> rows_;
    std::map<std::string, std::string> by_history_;
    std::map<std::string, std::string> by_last_;
    std::optional<std::string> default_;
};

}  // namespace cotpot::testing
