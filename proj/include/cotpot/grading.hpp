#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cotpot/core.hpp"

namespace cotpot {

enum class ExtractionMethod { boxed, final_answer_phrase, last_integer, choice_letter, none };

std::string_view to_string(ExtractionMethod method);

struct GradeResult {
    std::optional<std::string> extracted;
    bool correct = false;
    ExtractionMethod method = ExtractionMethod::none;
    // Byte offset where the matched answer expression starts (boxed command,
    // answer phrase, or the bare integer/letter). Meaningless when method is none.
    std::size_t span_begin = 0;
};

/// Extraction precedence: last \boxed{...}, then the last "answer is X" /
/// "final answer: X" phrase, then (integer kind) the last standalone integer or
/// (multiple-choice kind) the last standalone choice letter.
GradeResult extract_answer(std::string_view text, AnswerKind kind);

/// Normalized comparison of an extracted answer against the gold answer.
bool grade(const std::optional<std::string>& extracted, std::string_view gold, AnswerKind kind);

/// Extraction followed by grading.
GradeResult grade_text(std::string_view text, std::string_view gold, AnswerKind kind);

/// Canonical integer form ("+007" -> "7", "-0" -> "0"), or nullopt when unparsable.
std::optional<std::string> normalize_integer(std::string_view s);

/// Text with its final-answer sentence removed, trailing whitespace trimmed.
/// Returns the text unchanged (minus trailing whitespace) when no answer is found.
std::string strip_final_answer(std::string_view text, AnswerKind kind);

}  // namespace cotpot
