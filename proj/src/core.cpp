#include "cotpot/core.hpp"

#include <cmath>

namespace cotpot {

std::string_view to_string(AnswerKind kind) {
    switch (kind) {
        case AnswerKind::integer: return "integer";
        case AnswerKind::exact_string: return "exact-string";
        case AnswerKind::multiple_choice: return "multiple-choice";
    }
    return "integer";
}

AnswerKind parse_answer_kind(std::string_view name) {
    if (name == "integer") return AnswerKind::integer;
    if (name == "exact-string" || name == "exact_string" || name == "string") return AnswerKind::exact_string;
    if (name == "multiple-choice" || name == "multiple_choice" || name == "choice")
        return AnswerKind::multiple_choice;
    throw UsageError("unknown answer kind: " + std::string(name));
}

void Question::validate() const {
    if (id.empty()) throw UsageError("question id must be non-empty");
    if (gold_answer.empty()) throw UsageError("question " + id + ": gold answer must be non-empty");
    if (kind == AnswerKind::multiple_choice) {
        if (gold_answer.size() != 1 || gold_answer[0] < 'A' || gold_answer[0] > 'D')
            throw UsageError("question " + id + ": multiple-choice gold answer must be one of A-D");
    }
}

void SamplingParams::validate() const {
    if (!(temperature >= 0.0)) throw UsageError("temperature must be non-negative");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw UsageError("top_p must lie in (0, 1]");
    if (max_total_tokens < 1) throw UsageError("max_total_tokens must be >= 1");
    if (n_samples < 1) throw UsageError("n_samples must be >= 1");
}

std::string Trace::ref() const { return question_id + ":" + provider_id + ":" + std::to_string(seed_used); }

void Trace::validate() const {
    std::size_t prev = 0;
    for (std::size_t i = 0; i < chunk_boundaries.size(); ++i) {
        if (i > 0 && chunk_boundaries[i] <= prev)
            throw UsageError("trace " + ref() + ": chunk boundaries must be strictly increasing");
        prev = chunk_boundaries[i];
    }
    if (!chunk_boundaries.empty() && chunk_boundaries.back() > text.size())
        throw UsageError("trace " + ref() + ": chunk boundary beyond end of text");
}

bool PotentialCurve::degraded() const {
    for (const auto& p : points)
        if (p.degraded) return true;
    return false;
}

void PotentialCurve::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (i > 0 && !(p.prefix_fraction > points[i - 1].prefix_fraction))
            throw UsageError("curve " + question_id + ": prefix fractions must be strictly increasing");
        if (!(p.estimate >= 0.0 && p.estimate <= 1.0))
            throw UsageError("curve " + question_id + ": estimate outside [0, 1]");
        if (!exact && p.n_used > 0) {
            const double scaled = p.estimate * static_cast<double>(p.n_used);
            if (std::abs(scaled - std::round(scaled)) > 1e-6)
                throw UsageError("curve " + question_id + ": estimate is not a multiple of 1/n_used");
        }
    }
}

void ShapeThresholds::validate() const {
    for (double t : {insight_jump, tangent_drop, late_spike_level, monotonicity_slack})
        if (!(t > 0.0 && t < 1.0)) throw UsageError("shape thresholds must lie in (0, 1)");
    if (n_chunks < 1) throw UsageError("n_chunks must be >= 1");
    if (insight_tail_exclusion < 0 || insight_tail_exclusion >= n_chunks)
        throw UsageError("insight tail exclusion must be in [0, n_chunks)");
}

double BudgetEstimate::approximate_total() const {
    return static_cast<double>(n_samples) * static_cast<double>(n_chunks) * static_cast<double>(per_run_tokens) / 2.0;
}

}  // namespace cotpot
