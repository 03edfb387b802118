#pragma once

// Greedy potential-optimized chain-of-thought construction: at every step,
// sample M candidate chunks, score each by Monte-Carlo potential, keep the best.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotpot/core.hpp"
#include "cotpot/sampler.hpp"

namespace cotpot {

struct OptimizerConfig {
    std::int64_t chunk_tokens = 256;  // C
    std::int64_t n_candidates = 8;    // M
    std::int64_t n_eval = 128;        // rollouts per candidate score
    std::int64_t max_steps = 64;
    Seed seed = 0;

    void validate() const;
};

struct Candidate {
    std::string text;
    std::int64_t token_count = 0;
    FinishReason finish_reason = FinishReason::stop;
    double potential = 0.0;
    std::int64_t n_used = 0;
    std::int64_t n_correct = 0;
    // Generated tokens of the scoring rollouts, continuation only.
    std::int64_t rollout_tokens = 0;
};

struct OptimizerStep {
    std::vector<Candidate> candidates;
    std::size_t chosen = 0;
};

enum class OptimizerStatus { answered, ended_without_answer, unterminated };

std::string_view to_string(OptimizerStatus status);
OptimizerStatus parse_optimizer_status(std::string_view name);

struct OptimizerTrace {
    std::string question_id;
    OptimizerConfig config;
    std::vector<OptimizerStep> steps;
    std::string final_cot;
    double final_potential = 0.0;
    OptimizerStatus status = OptimizerStatus::unterminated;
    std::optional<std::string> extracted_answer;
    bool correct = false;
    // Some chosen chunk came back shorter than chunk_tokens.
    bool short_chunks = false;
    std::int64_t candidate_tokens = 0;
    // Scoring cost: for every scoring rollout, its continuation plus the
    // candidate chunk it extends.
    std::int64_t scoring_tokens = 0;
};

/// Candidate m at step s is sampled with seed derive_seed(config.seed, s, m);
/// every score uses rollout seeds params.seed + 0 ... + n_eval-1, so identical
/// prefixes share cached rollouts. Ties go to the lowest candidate index. The
/// loop stops once the accumulated text carries a boxed or explicitly phrased
/// final answer, when the chosen chunk stopped on its own, or after max_steps.
/// Degraded scoring batches throw DegradedBatchError.
OptimizerTrace optimize_cot(Sampler& sampler, const Question& question, const OptimizerConfig& config,
                            const SamplingParams& params);

Seed derive_seed(Seed base, std::uint64_t step, std::uint64_t candidate);

nlohmann::json to_json(const OptimizerTrace& trace);
OptimizerTrace optimizer_trace_from_json(const nlohmann::json& j);

}  // namespace cotpot
