#pragma once

// Domain types shared by every cotpot module.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cotpot {

using Seed = std::uint64_t;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or malformed input files.
class UsageError : public Error {
public:
    using Error::Error;
};

enum class AnswerKind { integer, exact_string, multiple_choice };

std::string_view to_string(AnswerKind kind);
AnswerKind parse_answer_kind(std::string_view name);

struct Question {
    std::string id;
    std::string prompt;
    std::string gold_answer;
    AnswerKind kind = AnswerKind::integer;

    void validate() const;
};

/// Sampling configuration for one rollout campaign. Defaults follow the
/// reference experimental setup (N=128, temperature 0.6, top-p 0.95, 32k tokens).
struct SamplingParams {
    double temperature = 0.6;
    double top_p = 0.95;
    std::int64_t max_total_tokens = 32768;
    std::int64_t n_samples = 128;
    Seed seed = 0;

    void validate() const;
};

struct Trace {
    std::string question_id;
    std::string text;
    std::int64_t token_count = 0;
    std::vector<std::size_t> chunk_boundaries;
    std::optional<std::string> extracted_answer;
    bool correct = false;
    std::string provider_id;
    Seed seed_used = 0;

    /// Stable identifier used to link curves back to the trace they came from.
    std::string ref() const;
    void validate() const;
};

struct CurvePoint {
    double prefix_fraction = 0.0;
    double estimate = 0.0;
    std::int64_t n_used = 0;
    bool degraded = false;
};

struct PotentialCurve {
    std::string question_id;
    std::optional<std::string> trace_ref;
    std::vector<CurvePoint> points;
    bool exact = false;
    // Correctness of the underlying trace, when known.
    std::optional<bool> trace_correct;

    bool degraded() const;
    void validate() const;
};

/// A potential curve whose grading target is the trace's own answer.
struct StabilityCurve {
    PotentialCurve curve;
    std::string target_answer;
};

struct ShapeThresholds {
    double insight_jump = 0.40;
    double tangent_drop = 0.30;
    double late_spike_level = 0.05;
    double monotonicity_slack = 0.10;
    int n_chunks = 20;
    int insight_tail_exclusion = 2;

    void validate() const;
};

struct ShapeReport {
    bool insight = false;
    std::optional<std::size_t> insight_index;
    bool tangent = false;
    std::optional<std::size_t> tangent_peak;
    std::optional<std::size_t> tangent_trough;
    bool late_spike = false;
    bool monotone = false;
    ShapeThresholds thresholds_used;
};

struct BudgetEstimate {
    std::int64_t n_samples = 0;
    std::int64_t n_chunks = 0;
    std::int64_t per_run_tokens = 0;
    std::int64_t total_tokens = 0;

    /// The closed-form approximation N * N_chunks * T / 2.
    double approximate_total() const;
};

}  // namespace cotpot
