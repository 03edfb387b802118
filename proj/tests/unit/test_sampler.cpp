#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cotpot/sampler.hpp"
#include "test_support.hpp"

using namespace cotpot;
using namespace cotpot::testing;

TEST(Sampler, DeterministicModelIsAlwaysCorrect) {
    ToyHarness h("det.json");
    const auto q = make_question("q", "7");
    const auto batch = h.sampler.run_rollouts(q, "", params_with(8));
    EXPECT_EQ(batch.n_requested, 8);
    EXPECT_EQ(batch.n_used(), 8);
    EXPECT_EQ(batch.n_correct(), 8);
    EXPECT_DOUBLE_EQ(batch.estimate(), 1.0);
    for (std::size_t i = 0; i < batch.completions.size(); ++i) EXPECT_EQ(batch.completions[i].seed, i);
}

TEST(Sampler, RerunIsServedFromCache) {
    TempDir dir;
    const auto q = make_question("q", "1");
    std::vector<std::string> first_texts;
    {
        ToyProvider provider("toy", load_toy("chain3.json"));
        RolloutCache cache(dir.path());
        Sampler sampler(provider, cache);
        for (const auto& c : sampler.run_rollouts(q, "A", params_with(16, 5)).completions)
            first_texts.push_back(c.completion.text);
        EXPECT_EQ(sampler.stats().provider_calls, 16u);
    }
    ToyProvider provider("toy", load_toy("chain3.json"));
    RolloutCache cache(dir.path());
    Sampler sampler(provider, cache);
    const auto again = sampler.run_rollouts(q, "A", params_with(16, 5));
    EXPECT_EQ(provider.calls(), 0u);
    EXPECT_EQ(sampler.stats().cache_hits, 16u);
    EXPECT_EQ(sampler.stats().provider_calls, 0u);
    for (std::size_t i = 0; i < first_texts.size(); ++i) {
        EXPECT_EQ(again.completions[i].completion.text, first_texts[i]);
        EXPECT_TRUE(again.completions[i].from_cache);
    }
}

TEST(Sampler, ChainPrefixEstimateWithinThreeSigma) {
    ToyHarness h("chain3.json");
    const auto q = make_question("q", "1");
    const double expected = ReferenceOracle("chain3.json").potential({"A"}, "1");
    EXPECT_DOUBLE_EQ(expected, 0.375);
    const auto batch = h.sampler.run_rollouts(q, "A", params_with(1024));
    EXPECT_TRUE(within_sigmas(batch.estimate(), expected, 1024)) << batch.estimate();
}

TEST(Sampler, OverlappingBatchesShareSeeds) {
    ToyHarness h("chain3.json");
    const auto q = make_question("q", "1");
    const auto small = h.sampler.run_rollouts(q, "", params_with(8, 100));
    h.sampler.reset_stats();
    const auto large = h.sampler.run_rollouts(q, "", params_with(16, 100));
    EXPECT_EQ(h.sampler.stats().cache_hits, 8u);
    for (std::size_t i = 0; i < small.completions.size(); ++i)
        EXPECT_EQ(small.completions[i].completion.text, large.completions[i].completion.text);
}

TEST(Sampler, GradesPrefixPlusContinuation) {
    ToyHarness h("uniform2.json");
    const auto q = make_question("q", "1");
    const auto batch = h.sampler.run_rollouts(q, "x x \\boxed{1}", params_with(4));
    EXPECT_EQ(batch.n_correct(), 4);
}

TEST(Sampler, InvalidParamsAreRejected) {
    ToyHarness h("det.json");
    const auto q = make_question("q", "7");
    EXPECT_THROW(h.sampler.run_rollouts(q, "", params_with(0)), UsageError);
    auto p = params_with(1);
    p.temperature = -1.0;
    EXPECT_THROW(h.sampler.run_rollouts(q, "", p), UsageError);
}

namespace {

// Fails the first time each listed seed is requested.
class FlakyProvider final : public Provider {
public:
    FlakyProvider(ToyLM toy, std::vector<Seed> failing) : inner_("flaky", std::move(toy)), failing_(std::move(failing)) {}
    const std::string& id() const override { return inner_.id(); }
    std::string model() const override { return inner_.model(); }
    std::size_t max_in_flight() const override { return 1; }

protected:
    Completion do_complete(const CompletionRequest& request, Seed seed) override {
        if (std::find(failing_.begin(), failing_.end(), seed) != failing_.end()) throw TransportError("boom");
        return inner_.complete(request, seed);
    }

private:
    ToyProvider inner_;
    std::vector<Seed> failing_;
};

}  // namespace

TEST(Sampler, DegradedBatchCarriesPartialResult) {
    FlakyProvider provider(load_toy("det.json"), {0, 1, 2});
    RolloutCache cache;
    Sampler sampler(provider, cache);
    const auto q = make_question("q", "7");
    try {
        sampler.run_rollouts(q, "", params_with(10));
        FAIL();
    } catch (const DegradedBatchError& e) {
        EXPECT_EQ(e.partial().n_failed(), 3);
        EXPECT_EQ(e.partial().n_used(), 7);
        EXPECT_DOUBLE_EQ(e.partial().estimate(), 1.0);
        EXPECT_EQ(e.partial().completions[0].completion.finish_reason, FinishReason::error);
    }
    // Failures are not cached and exactly 20% is tolerated.
    EXPECT_EQ(cache.size("flaky"), 7u);
    const auto ok = sampler.run_rollouts(q, "", params_with(10, 1));
    EXPECT_EQ(ok.n_failed(), 2);
    EXPECT_DOUBLE_EQ(ok.estimate(), 1.0);
}

TEST(Budget, DefaultCampaign) {
    const auto b = estimate_budget(128, 20, 32768);
    EXPECT_EQ(b.total_tokens, 44040192);
    EXPECT_DOUBLE_EQ(b.approximate_total(), 41943040.0);
    EXPECT_EQ(estimate_budget(128, 15, 32768).total_tokens, 33554432);
    EXPECT_EQ(estimate_budget(1, 1, 1).total_tokens, 1);
    EXPECT_EQ(estimate_budget(3, 2, 1).total_tokens, 5);  // 4.5 rounded up
}

TEST(Budget, MatchesExplicitSumAndIsLinear) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 512);
        const std::int64_t chunks = 1 + static_cast<std::int64_t>(rng() % 64);
        const std::int64_t t = 2 * (1 + static_cast<std::int64_t>(rng() % 20000));
        // T is even, so the closed form is exact; compare against the sum scaled by 2 * chunks.
        std::int64_t doubled = 0;
        for (std::int64_t k = 1; k <= chunks; ++k) doubled += 2 * n * k * t;
        EXPECT_EQ(2 * chunks * estimate_budget(n, chunks, t).total_tokens, doubled) << n << " " << chunks << " " << t;
        EXPECT_EQ(estimate_budget(2 * n, chunks, t).total_tokens, 2 * estimate_budget(n, chunks, t).total_tokens);
        EXPECT_EQ(estimate_budget(n, chunks, 2 * t).total_tokens, 2 * estimate_budget(n, chunks, t).total_tokens);
    }
}

TEST(Budget, RejectsBadArguments) {
    EXPECT_THROW(estimate_budget(0, 20, 10), UsageError);
    EXPECT_THROW(estimate_budget(1LL << 40, 1LL << 20, 1LL << 20), UsageError);
    EXPECT_EQ(estimate_optimizer_budget(8, 128, 4, 100).total_tokens, estimate_budget(1024, 4, 100).total_tokens);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
    std::vector<std::atomic<int>> hits(200);
    parallel_for(hits.size(), 8, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(10, 4, [](std::size_t i) { if (i == 7) throw Error("x"); }), Error);
}
