#include "cotpot/text.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace cotpot {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<TokenSpan> whitespace_tokens(std::string_view text) {
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        if (i == text.size()) break;
        const std::size_t begin = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        out.push_back({begin, i});
    }
    return out;
}

std::int64_t count_tokens(std::string_view text) { return static_cast<std::int64_t>(whitespace_tokens(text).size()); }

Trace chunk_trace(const Trace& trace, int n_chunks) {
    if (trace.text.empty()) throw UsageError("empty trace");
    if (n_chunks < 1) throw UsageError("n_chunks must be >= 1");
    const auto tokens = whitespace_tokens(trace.text);
    const auto n_tokens = static_cast<std::int64_t>(tokens.size());
    if (n_tokens == 0) throw UsageError("empty trace");
    if (n_chunks > n_tokens) throw UsageError("too many chunks");

    Trace out = trace;
    out.chunk_boundaries.clear();
    out.chunk_boundaries.reserve(static_cast<std::size_t>(n_chunks));
    for (std::int64_t i = 1; i < n_chunks; ++i) {
        const std::int64_t upto = i * n_tokens / n_chunks;
        out.chunk_boundaries.push_back(tokens[static_cast<std::size_t>(upto - 1)].end);
    }
    out.chunk_boundaries.push_back(trace.text.size());
    return out;
}

std::string prefix_at(const Trace& trace, std::size_t index) {
    if (index == 0) return {};
    if (index > trace.chunk_boundaries.size()) throw UsageError("chunk index out of range");
    return trace.text.substr(0, trace.chunk_boundaries[index - 1]);
}

std::string cut_at_fraction(std::string_view text, double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw UsageError("cut fraction must lie in [0, 1]");
    const auto tokens = whitespace_tokens(text);
    // The epsilon keeps decimal fractions such as 0.3 * 10 from flooring to 2.
    const auto keep = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(tokens.size()) + 1e-9));
    if (keep == 0) return {};
    return std::string(text.substr(0, tokens[std::min(keep, tokens.size()) - 1].end));
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
    std::uint64_t hash = seed;
    for (unsigned char byte : data) {
        hash ^= byte;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace cotpot
