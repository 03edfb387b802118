#pragma once

// A small, fully enumerable probabilistic token model.
//
// Symbols are whitespace-free strings; rendered text is the symbols joined by
// single spaces. A path ends when it reaches the horizon or samples the
// reserved end symbol "</s>". Once a path ends, its answer is a function of
// the history and is rendered as "\boxed{answer}", optionally preceded by the
// fixture's fixed lead-in words (e.g. "the answer is").
//
// Transition rows are keyed by history; lookup uses the longest suffix of the
// current history that has a row, so both full-history tables and first-order
// Markov chains are expressible.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotpot/core.hpp"

namespace cotpot {

using Symbol = int;
inline constexpr Symbol kEndSymbol = -1;
inline constexpr std::string_view kEndSymbolName = "</s>";

inline constexpr std::size_t kMaxVocabulary = 32;
inline constexpr std::size_t kMaxHorizon = 8;
inline constexpr double kMaxPaths = 1e6;

struct Transition {
    Symbol next = 0;
    double probability = 0.0;
};

/// State reached after reading a text prefix.
struct ToyState {
    std::vector<Symbol> history;
    bool ended = false;  // end symbol sampled or horizon reached
    // Answer already present in the prefix text as a \boxed{} token.
    std::optional<std::string> emitted_answer;
    // Words of the answer lead-in already present in the prefix.
    std::size_t lead_emitted = 0;
};

struct ToyPath {
    std::vector<Symbol> continuation;  // excludes the end symbol
    double probability = 0.0;
    std::optional<std::string> answer;
};

struct Enumeration {
    std::vector<ToyPath> paths;
    bool zero_probability_prefix = false;
};

class ToyLM {
public:
    ToyLM() = default;

    static ToyLM from_json(const nlohmann::json& j);
    static ToyLM load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    /// Random valid model: full-history transition table with random weights
    /// and answers drawn from {"0", "1", "2"}; the symbol path "s0 s0 ..." is
    /// forced to answer "1" so at least one path is correct for gold "1".
    static ToyLM random(Seed seed);

    const std::vector<std::string>& vocabulary() const { return vocabulary_; }
    std::size_t horizon() const { return horizon_; }
    const std::vector<std::string>& answer_lead() const { return answer_lead_; }

    Symbol symbol(std::string_view name) const;  // throws on unknown
    std::optional<Symbol> find_symbol(std::string_view name) const;
    const std::string& name(Symbol s) const;

    /// Next-symbol distribution for a history (may contain kEndSymbol).
    const std::vector<Transition>& next(const std::vector<Symbol>& history) const;

    /// Probability of `s` following `history`.
    double probability(const std::vector<Symbol>& history, Symbol s) const;

    bool is_terminal(const std::vector<Symbol>& history, bool ended) const {
        return ended || history.size() >= horizon_;
    }

    std::optional<std::string> answer(const std::vector<Symbol>& history) const;

    /// Parses whitespace tokens of a text prefix. Throws UsageError on
    /// unknown symbols; returns nullopt for zero-probability prefixes.
    std::optional<ToyState> parse_prefix(std::string_view text) const;

    /// Every completion of `prefix` with its exact conditional probability.
    Enumeration enumerate_paths(const std::vector<Symbol>& prefix) const;

    std::string render(const std::vector<Symbol>& symbols) const;

    void validate() const;

private:
    std::uint64_t key(const std::vector<Symbol>& history, std::size_t from) const;

    std::vector<std::string> vocabulary_;
    std::unordered_map<std::string, Symbol> index_;
    std::size_t horizon_ = 0;
    std::unordered_map<std::uint64_t, std::vector<Transition>> rows_;
    std::vector<std::pair<std::vector<Symbol>, std::vector<Transition>>> row_list_;
    std::unordered_map<std::uint64_t, std::string> answers_by_history_;
    std::vector<std::pair<std::vector<Symbol>, std::string>> answer_list_;
    std::vector<std::optional<std::string>> answers_by_last_;
    std::optional<std::string> default_answer_;
    std::vector<std::string> answer_lead_;
};

}  // namespace cotpot
