#include "cotpot/toy_lm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "cotpot/text.hpp"

namespace cotpot {

namespace {

constexpr std::string_view kBoxedPrefix = "\\boxed{";

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> out;
    for (const auto& t : whitespace_tokens(s)) out.emplace_back(s.substr(t.begin, t.end - t.begin));
    return out;
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::uint64_t ToyLM::key(const std::vector<Symbol>& history, std::size_t from) const {
    std::uint64_t k = 1;
    for (std::size_t i = from; i < history.size(); ++i) k = k * 33 + static_cast<std::uint64_t>(history[i] + 1);
    return k;
}

Symbol ToyLM::symbol(std::string_view name) const {
    auto s = find_symbol(name);
    if (!s) throw UsageError("unknown toy symbol: " + std::string(name));
    return *s;
}

std::optional<Symbol> ToyLM::find_symbol(std::string_view name) const {
    if (name == kEndSymbolName) return kEndSymbol;
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::string& ToyLM::name(Symbol s) const {
    static const std::string end_name(kEndSymbolName);
    if (s == kEndSymbol) return end_name;
    return vocabulary_.at(static_cast<std::size_t>(s));
}

const std::vector<Transition>& ToyLM::next(const std::vector<Symbol>& history) const {
    for (std::size_t from = 0; from <= history.size(); ++from) {
        auto it = rows_.find(key(history, from));
        if (it != rows_.end()) return it->second;
    }
    throw UsageError("toy model has no transition row for history '" + render(history) + "'");
}

double ToyLM::probability(const std::vector<Symbol>& history, Symbol s) const {
    for (const auto& t : next(history))
        if (t.next == s) return t.probability;
    return 0.0;
}

std::optional<std::string> ToyLM::answer(const std::vector<Symbol>& history) const {
    if (auto it = answers_by_history_.find(key(history, 0)); it != answers_by_history_.end()) return it->second;
    if (!history.empty() && answers_by_last_[static_cast<std::size_t>(history.back())])
        return answers_by_last_[static_cast<std::size_t>(history.back())];
    return default_answer_;
}

std::string ToyLM::render(const std::vector<Symbol>& symbols) const {
    std::string out;
    for (Symbol s : symbols) {
        if (!out.empty()) out.push_back(' ');
        out += name(s);
    }
    return out;
}

std::optional<ToyState> ToyLM::parse_prefix(std::string_view text) const {
    ToyState state;
    for (const auto& t : whitespace_tokens(text)) {
        const auto word = text.substr(t.begin, t.end - t.begin);
        if (word.substr(0, kBoxedPrefix.size()) == kBoxedPrefix) {
            auto content = word.substr(kBoxedPrefix.size());
            if (!content.empty() && content.back() == '}') content.remove_suffix(1);
            state.emitted_answer = std::string(content);
            state.ended = true;
            return state;
        }
        if (state.lead_emitted < answer_lead_.size() && word == answer_lead_[state.lead_emitted]) {
            // The lead-in follows a finished path only.
            if (!state.ended && !is_terminal(state.history, false) && probability(state.history, kEndSymbol) <= 0.0)
                return std::nullopt;
            state.ended = true;
            ++state.lead_emitted;
            continue;
        }
        if (state.ended || is_terminal(state.history, false)) return std::nullopt;
        const Symbol s = symbol(word);
        if (s == kEndSymbol || probability(state.history, s) <= 0.0) return std::nullopt;
        state.history.push_back(s);
    }
    state.ended = state.ended || is_terminal(state.history, false);
    return state;
}

Enumeration ToyLM::enumerate_paths(const std::vector<Symbol>& prefix) const {
    Enumeration result;
    if (prefix.size() > horizon_) {
        result.zero_probability_prefix = true;
        return result;
    }
    std::vector<Symbol> history;
    for (Symbol s : prefix) {
        if (s == kEndSymbol || probability(history, s) <= 0.0) {
            result.zero_probability_prefix = true;
            return result;
        }
        history.push_back(s);
    }

    std::vector<Symbol> continuation;
    std::function<void(double, bool)> walk = [&](double prob, bool ended) {
        if (is_terminal(history, ended)) {
            result.paths.push_back({continuation, prob, answer(history)});
            return;
        }
        for (const auto& t : next(history)) {
            if (t.probability <= 0.0) continue;
            if (t.next == kEndSymbol) {
                walk(prob * t.probability, true);
                continue;
            }
            history.push_back(t.next);
            continuation.push_back(t.next);
            walk(prob * t.probability, false);
            continuation.pop_back();
            history.pop_back();
        }
    };
    walk(1.0, false);
    return result;
}

void ToyLM::validate() const {
    if (vocabulary_.empty() || vocabulary_.size() > kMaxVocabulary)
        throw UsageError("toy vocabulary size must be in [1, 32]");
    if (horizon_ < 1 || horizon_ > kMaxHorizon) throw UsageError("toy horizon must be in [1, 8]");
    if (std::pow(static_cast<double>(vocabulary_.size()), static_cast<double>(horizon_)) > kMaxPaths)
        throw UsageError("toy model too large to enumerate (|V|^H > 1e6)");
    if (rows_.find(key({}, 0)) == rows_.end()) throw UsageError("toy model needs a row for the empty history");
    for (const auto& [history, row] : row_list_) {
        double sum = 0.0;
        for (const auto& t : row) {
            if (t.probability < 0.0) throw UsageError("negative transition probability");
            sum += t.probability;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw UsageError("transition row '" + render(history) + "' does not sum to 1");
    }
}

ToyLM ToyLM::from_json(const nlohmann::json& j) {
    ToyLM m;
    try {
        m.vocabulary_ = j.at("vocabulary").get<std::vector<std::string>>();
        m.horizon_ = j.at("horizon").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed toy fixture: ") + e.what());
    }
    for (std::size_t i = 0; i < m.vocabulary_.size(); ++i) {
        const auto& v = m.vocabulary_[i];
        if (v.empty() || v == kEndSymbolName || v.find_first_of(" \t\n\r") != std::string::npos ||
            v.rfind(kBoxedPrefix, 0) == 0)
            throw UsageError("invalid toy symbol: '" + v + "'");
        if (!m.index_.emplace(v, static_cast<Symbol>(i)).second) throw UsageError("duplicate toy symbol: " + v);
    }
    auto parse_history = [&](const std::string& s) {
        std::vector<Symbol> h;
        for (const auto& w : split_words(s)) {
            const Symbol sym = m.symbol(w);
            if (sym == kEndSymbol) throw UsageError("end symbol cannot appear inside a history");
            h.push_back(sym);
        }
        return h;
    };
    try {
        for (const auto& row : j.at("transitions")) {
            auto history = parse_history(row.at("history").get<std::string>());
            std::vector<Transition> dist;
            for (const auto& [sym, p] : row.at("next").items()) dist.push_back({m.symbol(sym), p.get<double>()});
            // Keep vocabulary order so sampling does not depend on JSON key order.
            std::sort(dist.begin(), dist.end(), [](const auto& a, const auto& b) { return a.next < b.next; });
            if (!m.rows_.emplace(m.key(history, 0), dist).second)
                throw UsageError("duplicate transition row: '" + row.at("history").get<std::string>() + "'");
            m.row_list_.emplace_back(std::move(history), std::move(dist));
        }
        m.answers_by_last_.assign(m.vocabulary_.size(), std::nullopt);
        if (j.contains("answer_rule")) {
            const auto& rule = j.at("answer_rule");
            if (rule.contains("by_history"))
                for (const auto& [h, a] : rule.at("by_history").items()) {
                    auto history = parse_history(h);
                    m.answers_by_history_[m.key(history, 0)] = a.get<std::string>();
                    m.answer_list_.emplace_back(std::move(history), a.get<std::string>());
                }
            if (rule.contains("by_last_symbol"))
                for (const auto& [s, a] : rule.at("by_last_symbol").items())
                    m.answers_by_last_[static_cast<std::size_t>(m.symbol(s))] = a.get<std::string>();
            if (rule.contains("default") && !rule.at("default").is_null())
                m.default_answer_ = rule.at("default").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed toy fixture: ") + e.what());
    }
    try {
        if (j.contains("answer_lead")) m.answer_lead_ = split_words(j.at("answer_lead").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed toy fixture: ") + e.what());
    }
    for (const auto& w : m.answer_lead_)
        if (m.find_symbol(w) || w.rfind(kBoxedPrefix, 0) == 0)
            throw UsageError("answer lead word '" + w + "' collides with a toy symbol");
    m.validate();
    return m;
}

ToyLM ToyLM::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open toy fixture: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("malformed toy fixture " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json ToyLM::to_json() const {
    nlohmann::json j;
    j["vocabulary"] = vocabulary_;
    j["horizon"] = horizon_;
    auto rows = nlohmann::json::array();
    for (const auto& [history, dist] : row_list_) {
        nlohmann::json next = nlohmann::json::object();
        for (const auto& t : dist) next[name(t.next)] = t.probability;
        rows.push_back({{"history", render(history)}, {"next", next}});
    }
    j["transitions"] = rows;
    if (!answer_lead_.empty()) {
        std::string lead;
        for (const auto& w : answer_lead_) lead += (lead.empty() ? "" : " ") + w;
        j["answer_lead"] = lead;
    }
    nlohmann::json rule = nlohmann::json::object();
    nlohmann::json by_history = nlohmann::json::object();
    for (const auto& [history, a] : answer_list_) by_history[render(history)] = a;
    rule["by_history"] = by_history;
    nlohmann::json by_last = nlohmann::json::object();
    for (std::size_t i = 0; i < answers_by_last_.size(); ++i)
        if (answers_by_last_[i]) by_last[vocabulary_[i]] = *answers_by_last_[i];
    rule["by_last_symbol"] = by_last;
    rule["default"] = default_answer_ ? nlohmann::json(*default_answer_) : nlohmann::json(nullptr);
    j["answer_rule"] = rule;
    return j;
}

ToyLM ToyLM::random(Seed seed) {
    std::mt19937_64 rng(seed);
    const std::size_t vocab = 2 + rng() % 3;
    const std::size_t horizon = 2 + rng() % 4;
    static const char* kAnswers[] = {"0", "1", "2"};

    nlohmann::json j;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < vocab; ++i) names.push_back("s" + std::to_string(i));
    j["vocabulary"] = names;
    j["horizon"] = horizon;

    auto rows = nlohmann::json::array();
    nlohmann::json by_history = nlohmann::json::object();
    for (std::size_t len = 0; len < horizon; ++len) {
        std::size_t count = 1;
        for (std::size_t i = 0; i < len; ++i) count *= vocab;
        for (std::size_t code = 0; code < count; ++code) {
            std::string history;
            bool all_first = true;
            for (std::size_t i = 0, c = code; i < len; ++i, c /= vocab) {
                if (!history.empty()) history.push_back(' ');
                history += names[c % vocab];
                all_first = all_first && c % vocab == 0;
            }
            std::vector<double> w(vocab + 1, 0.0);
            for (std::size_t s = 0; s < vocab; ++s)
                w[s] = unit_uniform(rng) < 0.2 ? 0.0 : 0.05 + unit_uniform(rng);
            if (all_first) w[0] = std::max(w[0], 0.05);
            if (len > 0 && unit_uniform(rng) < 0.15) w[vocab] = 0.05 + 0.5 * unit_uniform(rng);
            double total = 0.0;
            for (double x : w) total += x;
            if (total == 0.0) {
                w[0] = 1.0;
                total = 1.0;
            }
            nlohmann::json next = nlohmann::json::object();
            for (std::size_t s = 0; s < vocab; ++s)
                if (w[s] > 0.0) next[names[s]] = w[s] / total;
            if (w[vocab] > 0.0) next[std::string(kEndSymbolName)] = w[vocab] / total;
            rows.push_back({{"history", history}, {"next", next}});
            if (len > 0) by_history[history] = kAnswers[rng() % 3];
        }
    }
    // Terminal histories of full length.
    std::size_t count = 1;
    for (std::size_t i = 0; i < horizon; ++i) count *= vocab;
    for (std::size_t code = 0; code < count; ++code) {
        std::string history;
        for (std::size_t i = 0, c = code; i < horizon; ++i, c /= vocab) {
            if (!history.empty()) history.push_back(' ');
            history += names[c % vocab];
        }
        by_history[history] = code == 0 ? "1" : kAnswers[rng() % 3];
    }
    j["transitions"] = rows;
    j["answer_rule"] = {{"by_history", by_history}, {"default", "0"}};
    return from_json(j);
}

}  // namespace cotpot
