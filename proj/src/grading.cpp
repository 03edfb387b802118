#include "cotpot/grading.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "cotpot/text.hpp"

namespace cotpot {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), lower);
    return out;
}

struct Match {
    std::string value;
    std::size_t begin = 0;
};

std::optional<Match> last_boxed(std::string_view text) {
    static constexpr std::string_view kBoxed = "\\boxed{";
    std::optional<Match> best;
    std::size_t pos = text.find(kBoxed);
    while (pos != std::string_view::npos) {
        std::size_t i = pos + kBoxed.size();
        int depth = 1;
        const std::size_t content_begin = i;
        while (i < text.size() && depth > 0) {
            if (text[i] == '{') ++depth;
            if (text[i] == '}') --depth;
            ++i;
        }
        if (depth == 0) {
            auto value = trim(text.substr(content_begin, i - 1 - content_begin));
            if (!value.empty()) best = Match{std::move(value), pos};
        }
        pos = text.find(kBoxed, pos + 1);
    }
    return best;
}

// Integers in [begin, end) whose neighbours are not word characters.
std::vector<Match> standalone_integers(std::string_view text, std::size_t begin, std::size_t end) {
    std::vector<Match> out;
    std::size_t i = begin;
    while (i < end) {
        if (!is_digit(text[i])) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < end && is_digit(text[i])) ++i;
        const bool left_ok = start == 0 || (!is_alnum(text[start - 1]) && text[start - 1] != '_' &&
                                            text[start - 1] != '.');
        const bool decimal = i + 1 < text.size() && text[i] == '.' && is_digit(text[i + 1]);
        const bool right_ok = (i >= text.size() || (!is_alnum(text[i]) && text[i] != '_')) && !decimal;
        if (decimal) {
            // skip the fractional part so it is not read as an integer of its own
            ++i;
            while (i < end && is_digit(text[i])) ++i;
            continue;
        }
        if (!left_ok || !right_ok) continue;
        if (start > 0 && (text[start - 1] == '-' || text[start - 1] == '+') &&
            (start == 1 || !is_alnum(text[start - 2])))
            --start;
        out.push_back({std::string(text.substr(start, i - start)), start});
    }
    return out;
}

std::vector<Match> standalone_letters(std::string_view text, std::size_t begin, std::size_t end) {
    std::vector<Match> out;
    for (std::size_t i = begin; i < end; ++i) {
        const char c = text[i];
        if (c < 'A' || c > 'D') continue;
        const bool left_ok = i == 0 || !is_alnum(text[i - 1]);
        const bool right_ok = i + 1 >= text.size() || !is_alnum(text[i + 1]);
        if (left_ok && right_ok) out.push_back({std::string(1, c), i});
    }
    return out;
}

std::size_t sentence_end(std::string_view text, std::size_t from) {
    for (std::size_t i = from; i < text.size(); ++i) {
        if (text[i] == '\n') return i;
        if (text[i] == '.' && !(i + 1 < text.size() && is_digit(text[i + 1]))) return i;
    }
    return text.size();
}

std::string strip_decorations(std::string_view s) {
    auto out = trim(s);
    auto strip = [&](char c) {
        while (!out.empty() && out.back() == c) out.pop_back();
        while (!out.empty() && out.front() == c) out.erase(out.begin());
    };
    for (char c : {'$', '*', '"', '\'', ',', ';', ':', '!', '?'}) strip(c);
    return trim(out);
}

std::optional<Match> last_phrase(std::string_view text, AnswerKind kind) {
    static constexpr std::array<std::string_view, 4> kPhrases = {
        "final answer:", "final answer is", "answer is", "answer:"};
    const std::string lowered = to_lower(text);

    // Collect every phrase hit, latest first; longer phrases win on ties.
    std::vector<std::pair<std::size_t, std::size_t>> hits;  // (position, phrase length)
    for (auto phrase : kPhrases) {
        std::size_t pos = lowered.find(phrase);
        while (pos != std::string::npos) {
            hits.emplace_back(pos, phrase.size());
            pos = lowered.find(phrase, pos + 1);
        }
    }
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        return a.first + a.second != b.first + b.second ? a.first + a.second > b.first + b.second
                                                        : a.second > b.second;
    });

    for (const auto& [pos, len] : hits) {
        const std::size_t value_begin = pos + len;
        const std::size_t value_end = sentence_end(text, value_begin);
        switch (kind) {
            case AnswerKind::integer: {
                auto ints = standalone_integers(text, value_begin, value_end);
                if (!ints.empty()) return Match{ints.front().value, pos};
                break;
            }
            case AnswerKind::multiple_choice: {
                auto letters = standalone_letters(text, value_begin, value_end);
                if (!letters.empty()) return Match{letters.front().value, pos};
                break;
            }
            case AnswerKind::exact_string: {
                auto value = strip_decorations(text.substr(value_begin, value_end - value_begin));
                if (!value.empty()) return Match{std::move(value), pos};
                break;
            }
        }
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(ExtractionMethod method) {
    switch (method) {
        case ExtractionMethod::boxed: return "boxed";
        case ExtractionMethod::final_answer_phrase: return "final-answer-phrase";
        case ExtractionMethod::last_integer: return "last-integer";
        case ExtractionMethod::choice_letter: return "choice-letter";
        case ExtractionMethod::none: return "none";
    }
    return "none";
}

GradeResult extract_answer(std::string_view text, AnswerKind kind) {
    GradeResult r;
    if (auto m = last_boxed(text)) {
        r.extracted = std::move(m->value);
        r.method = ExtractionMethod::boxed;
        r.span_begin = m->begin;
        return r;
    }
    if (auto m = last_phrase(text, kind)) {
        r.extracted = std::move(m->value);
        r.method = ExtractionMethod::final_answer_phrase;
        r.span_begin = m->begin;
        return r;
    }
    if (kind == AnswerKind::integer) {
        auto ints = standalone_integers(text, 0, text.size());
        if (!ints.empty()) {
            r.extracted = ints.back().value;
            r.method = ExtractionMethod::last_integer;
            r.span_begin = ints.back().begin;
        }
    } else if (kind == AnswerKind::multiple_choice) {
        auto letters = standalone_letters(text, 0, text.size());
        if (!letters.empty()) {
            r.extracted = letters.back().value;
            r.method = ExtractionMethod::choice_letter;
            r.span_begin = letters.back().begin;
        }
    }
    return r;
}

std::optional<std::string> normalize_integer(std::string_view s) {
    std::string t = trim(s);
    while (!t.empty() && t.front() == '$') t.erase(t.begin());
    while (!t.empty() && (t.back() == '$' || t.back() == '.')) t.pop_back();
    t = trim(t);
    if (t.empty()) return std::nullopt;
    bool negative = false;
    std::size_t i = 0;
    if (t[0] == '+' || t[0] == '-') {
        negative = t[0] == '-';
        i = 1;
    }
    if (i == t.size()) return std::nullopt;
    std::string digits;
    for (; i < t.size(); ++i) {
        if (!is_digit(t[i])) return std::nullopt;
        digits.push_back(t[i]);
    }
    const auto nz = digits.find_first_not_of('0');
    digits = nz == std::string::npos ? "0" : digits.substr(nz);
    if (digits == "0") negative = false;
    return negative ? "-" + digits : digits;
}

bool grade(const std::optional<std::string>& extracted, std::string_view gold, AnswerKind kind) {
    if (!extracted) return false;
    switch (kind) {
        case AnswerKind::integer: {
            auto a = normalize_integer(*extracted);
            auto b = normalize_integer(gold);
            return a && b && *a == *b;
        }
        case AnswerKind::exact_string:
            return to_lower(trim(*extracted)) == to_lower(trim(gold));
        case AnswerKind::multiple_choice: {
            auto letter = [](std::string_view s) {
                std::string t = trim(s);
                if (t.size() == 3 && t.front() == '(' && t.back() == ')') t = t.substr(1, 1);
                return to_lower(t);
            };
            return letter(*extracted) == letter(gold);
        }
    }
    return false;
}

GradeResult grade_text(std::string_view text, std::string_view gold, AnswerKind kind) {
    auto r = extract_answer(text, kind);
    r.correct = grade(r.extracted, gold, kind);
    return r;
}

std::string strip_final_answer(std::string_view text, AnswerKind kind) {
    const auto r = extract_answer(text, kind);
    std::size_t cut = r.extracted ? r.span_begin : text.size();
    for (std::size_t i = cut; r.extracted && i > 0; --i) {
        const char c = text[i - 1];
        const bool sentence_break =
            c == '\n' || ((c == '.' || c == '!' || c == '?') && i < text.size() &&
                          std::isspace(static_cast<unsigned char>(text[i])));
        if (sentence_break) {
            cut = i;
            break;
        }
    }
    std::string out(text.substr(0, cut));
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
    // keep leading whitespace intact so the result stays a byte prefix of `text`
    return out;
}

}  // namespace cotpot
