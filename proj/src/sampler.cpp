#include "cotpot/sampler.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

#include "cotpot/grading.hpp"

namespace cotpot {

std::int64_t RolloutBatch::n_used() const {
    std::int64_t n = 0;
    for (const auto& c : completions) n += c.failed ? 0 : 1;
    return n;
}

std::int64_t RolloutBatch::n_correct() const {
    std::int64_t n = 0;
    for (const auto& c : completions) n += (!c.failed && c.correct) ? 1 : 0;
    return n;
}

std::int64_t RolloutBatch::n_failed() const { return static_cast<std::int64_t>(completions.size()) - n_used(); }

double RolloutBatch::estimate() const {
    const auto used = n_used();
    return used == 0 ? 0.0 : static_cast<double>(n_correct()) / static_cast<double>(used);
}

std::int64_t RolloutBatch::count_matching(std::string_view target, AnswerKind kind) const {
    std::int64_t n = 0;
    for (const auto& c : completions)
        if (!c.failed && grade(c.extracted, target, kind)) ++n;
    return n;
}

std::int64_t RolloutBatch::generated_tokens() const {
    std::int64_t n = 0;
    for (const auto& c : completions)
        if (!c.failed) n += c.completion.token_count;
    return n;
}

DegradedBatchError::DegradedBatchError(RolloutBatch partial)
    : Error("degraded batch: " + std::to_string(partial.n_failed()) + " of " + std::to_string(partial.n_requested) +
            " rollouts failed for question " + partial.question_id),
      partial_(std::move(partial)) {}

Sampler::Sampler(Provider& provider, RolloutCache& cache) : provider_(provider), cache_(cache) {}

RolloutOutcome Sampler::sample(const Question& question, const CompletionRequest& request, Seed seed) {
    RolloutOutcome out;
    out.seed = seed;
    ++requests_;

    CacheKey key{provider_.id(), provider_.model(), request.prompt, request.prefix, request.params,
                 request.max_new_tokens, seed};
    const std::string digest = key.digest();

    if (auto hit = cache_.get(provider_.id(), digest)) {
        ++cache_hits_;
        out.completion = std::move(hit->completion);
        out.from_cache = true;
    } else {
        ++provider_calls_;
        try {
            out.completion = provider_.complete(request, seed);
        } catch (const std::exception& e) {
            ++failures_;
            out.failed = true;
            out.error = e.what();
            out.completion.finish_reason = FinishReason::error;
            out.completion.provider_id = provider_.id();
            return out;
        }
    }

    // Grade on the whole text so answers inside the prefix still count.
    const auto graded = grade_text(request.prefix + out.completion.text, question.gold_answer, question.kind);
    out.extracted = graded.extracted;
    out.correct = graded.correct;
    generated_tokens_ += static_cast<std::uint64_t>(std::max<std::int64_t>(0, out.completion.token_count));

    if (!out.from_cache) cache_.put(provider_.id(), CacheRecord{digest, out.completion, out.extracted, out.correct});
    return out;
}

RolloutBatch Sampler::run_rollouts(const Question& question, const std::string& prefix, const SamplingParams& params,
                                   double prefix_fraction) {
    params.validate();
    RolloutBatch batch;
    batch.question_id = question.id;
    batch.prefix = prefix;
    batch.prefix_fraction = prefix_fraction;
    batch.n_requested = params.n_samples;
    batch.completions.resize(static_cast<std::size_t>(params.n_samples));

    const auto request = CompletionRequest::for_prefix(question.prompt, prefix, params);
    parallel_for(batch.completions.size(), provider_.max_in_flight(), [&](std::size_t i) {
        batch.completions[i] = sample(question, request, params.seed + static_cast<Seed>(i));
    });

    if (static_cast<double>(batch.n_failed()) > kDegradedFailureFraction * static_cast<double>(batch.n_requested))
        throw DegradedBatchError(std::move(batch));
    return batch;
}

SamplerStats Sampler::stats() const {
    return {requests_.load(), cache_hits_.load(), provider_calls_.load(), failures_.load(), generated_tokens_.load()};
}

void Sampler::reset_stats() {
    requests_ = 0;
    cache_hits_ = 0;
    provider_calls_ = 0;
    failures_ = 0;
    generated_tokens_ = 0;
}

void parallel_for(std::size_t n, std::size_t max_parallel, const std::function<void(std::size_t)>& fn) {
    if (max_parallel <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    const std::size_t count = std::min(n, max_parallel);
    threads.reserve(count);
    for (std::size_t t = 0; t < count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

BudgetEstimate estimate_budget(std::int64_t n_samples, std::int64_t n_chunks, std::int64_t per_run_tokens) {
    if (n_samples < 1 || n_chunks < 1 || per_run_tokens < 1) throw UsageError("budget arguments must be >= 1");
    std::int64_t product = 0;
    if (__builtin_mul_overflow(n_samples, per_run_tokens, &product) ||
        __builtin_mul_overflow(product, n_chunks + 1, &product))
        throw UsageError("token budget overflows 64-bit integers");
    return {n_samples, n_chunks, per_run_tokens, product / 2 + product % 2};
}

BudgetEstimate estimate_optimizer_budget(std::int64_t n_candidates, std::int64_t n_eval, std::int64_t n_steps,
                                         std::int64_t per_run_tokens) {
    std::int64_t rollouts = 0;
    if (n_candidates < 1 || n_eval < 1) throw UsageError("budget arguments must be >= 1");
    if (__builtin_mul_overflow(n_candidates, n_eval, &rollouts))
        throw UsageError("token budget overflows 64-bit integers");
    return estimate_budget(rollouts, n_steps, per_run_tokens);
}

}  // namespace cotpot
