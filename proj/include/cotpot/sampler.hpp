#pragma once

// Rollout campaigns: N seeded, cached, graded completions per prefix.

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cotpot/cache.hpp"
#include "cotpot/core.hpp"
#include "cotpot/provider.hpp"

namespace cotpot {

struct RolloutOutcome {
    Seed seed = 0;
    Completion completion;
    std::optional<std::string> extracted;
    bool correct = false;
    bool failed = false;
    bool from_cache = false;
    std::string error;
};

struct RolloutBatch {
    std::string question_id;
    std::string prefix;
    double prefix_fraction = 0.0;
    std::vector<RolloutOutcome> completions;  // index i used seed base + i
    std::int64_t n_requested = 0;

    std::int64_t n_used() const;
    std::int64_t n_correct() const;
    std::int64_t n_failed() const;
    /// n_correct / n_used, or 0 when nothing succeeded.
    double estimate() const;
    /// Number of successful rollouts whose answer matches `target` under `kind`.
    std::int64_t count_matching(std::string_view target, AnswerKind kind) const;
    std::int64_t generated_tokens() const;
};

/// More than 20% of a batch failed after retries.
class DegradedBatchError : public Error {
public:
    explicit DegradedBatchError(RolloutBatch partial);
    const RolloutBatch& partial() const { return partial_; }

private:
    RolloutBatch partial_;
};

inline constexpr double kDegradedFailureFraction = 0.20;

struct SamplerStats {
    std::uint64_t requests = 0;        // completions asked for, cached or not
    std::uint64_t cache_hits = 0;
    std::uint64_t provider_calls = 0;  // requests that reached the provider
    std::uint64_t failures = 0;
    std::uint64_t generated_tokens = 0;  // tokens of every served completion, cached included
};

class Sampler {
public:
    Sampler(Provider& provider, RolloutCache& cache);

    /// Exactly params.n_samples rollouts with seeds params.seed + 0 ... + N-1,
    /// conditioned on `prefix`, graded against the question's gold answer on
    /// the full text prefix + continuation.
    RolloutBatch run_rollouts(const Question& question, const std::string& prefix, const SamplingParams& params,
                              double prefix_fraction = 0.0);

    /// One cached, graded completion. Provider errors are reported in the
    /// outcome rather than thrown.
    RolloutOutcome sample(const Question& question, const CompletionRequest& request, Seed seed);

    Provider& provider() { return provider_; }
    RolloutCache& cache() { return cache_; }

    SamplerStats stats() const;
    void reset_stats();

private:
    Provider& provider_;
    RolloutCache& cache_;
    std::atomic<std::uint64_t> requests_{0};
    std::atomic<std::uint64_t> cache_hits_{0};
    std::atomic<std::uint64_t> provider_calls_{0};
    std::atomic<std::uint64_t> failures_{0};
    std::atomic<std::uint64_t> generated_tokens_{0};
};

/// Runs fn(0..n-1) on up to `max_parallel` threads (inline when <= 1).
void parallel_for(std::size_t n, std::size_t max_parallel, const std::function<void(std::size_t)>& fn);

/// Generated-token budget of a potential-curve campaign:
/// N * sum_{i=1..n_chunks} (i / n_chunks) * T = N * T * (n_chunks + 1) / 2,
/// rounded up when the product is odd. Throws on int64 overflow.
BudgetEstimate estimate_budget(std::int64_t n_samples, std::int64_t n_chunks, std::int64_t per_run_tokens);

/// Budget of an optimizer run: every step scores M candidates with n_eval rollouts each.
BudgetEstimate estimate_optimizer_budget(std::int64_t n_candidates, std::int64_t n_eval, std::int64_t n_steps,
                                         std::int64_t per_run_tokens);

}  // namespace cotpot
