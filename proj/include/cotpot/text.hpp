#pragma once

// Whitespace tokenization, trace chunking and prefix cutting.
//
// No tokenizer is bundled: a token is a maximal run of non-whitespace bytes.
// Providers that report their own token counts still get chunked on these
// edges, since none of them expose token offsets.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cotpot/core.hpp"

namespace cotpot {

struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::vector<TokenSpan> whitespace_tokens(std::string_view text);
std::int64_t count_tokens(std::string_view text);

/// Populates chunk_boundaries with n_chunks near-equal token-count chunks.
/// Boundary i (1-based) sits right after token floor(i * tokens / n_chunks);
/// the last boundary is the end of the text.
Trace chunk_trace(const Trace& trace, int n_chunks);

/// Text of the prefix ending at chunk boundary `index` (0 gives the empty prefix).
std::string prefix_at(const Trace& trace, std::size_t index);

/// First floor(fraction * tokens) whitespace tokens of `text`, ending at a token edge.
std::string cut_at_fraction(std::string_view text, double fraction);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ULL);
std::string to_hex(std::uint64_t value);

std::string trim(std::string_view s);

}  // namespace cotpot
