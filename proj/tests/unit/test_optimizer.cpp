#include <gtest/gtest.h>

#include "cotpot/metrics.hpp"
#include "cotpot/optimizer.hpp"
#include "cotpot/text.hpp"
#include "test_support.hpp"

using namespace cotpot;
using namespace cotpot::testing;

namespace {

OptimizerConfig config(std::int64_t m, std::int64_t chunk, std::int64_t n_eval, std::int64_t max_steps, Seed seed = 0) {
    OptimizerConfig c;
    c.n_candidates = m;
    c.chunk_tokens = chunk;
    c.n_eval = n_eval;
    c.max_steps = max_steps;
    c.seed = seed;
    return c;
}

// Always returns the same text with the same finish reason.
class ScriptedProvider final : public Provider {
public:
    ScriptedProvider(std::string text, FinishReason finish) : text_(std::move(text)), finish_(finish) {}
    const std::string& id() const override { return id_; }
    std::string model() const override { return "scripted"; }
    std::size_t max_in_flight() const override { return 1; }

protected:
    Completion do_complete(const CompletionRequest&, Seed) override {
        return {text_, count_tokens(text_), finish_, id_};
    }

private:
    std::string id_ = "scripted";
    std::string text_;
    FinishReason finish_;
};

void expect_argmax(const OptimizerTrace& t) {
    for (const auto& step : t.steps) {
        double best = 0.0;
        for (const auto& c : step.candidates) best = std::max(best, c.potential);
        EXPECT_EQ(step.candidates[step.chosen].potential, best);
        for (std::size_t m = 0; m < step.chosen; ++m) EXPECT_LT(step.candidates[m].potential, best);
    }
}

}  // namespace

TEST(Optimizer, SingleCandidateIsPlainSampling) {
    ToyHarness h("chain3.json");
    const auto q = make_question("q", "1");
    const auto params = params_with(1, 0, 64);
    for (Seed seed = 0; seed < 20; ++seed) {
        const auto t = optimize_cot(h.sampler, q, config(1, 64, 4, 8, seed), params);
        const auto plain = sample_trace(h.sampler, q, params, derive_seed(seed, 0, 0));
        EXPECT_EQ(t.final_cot, plain.text);
        EXPECT_EQ(t.correct, plain.correct);
        EXPECT_EQ(t.steps.size(), 1u);
        EXPECT_EQ(t.status, OptimizerStatus::answered);
    }
}

TEST(Optimizer, PicksTheBetterChunk) {
    ToyHarness h("optimizer_pair.json");
    const auto q = make_question("q", "1");
    const auto t = optimize_cot(h.sampler, q, config(16, 1, 1024, 1, 3), params_with(1, 0, 16));
    ASSERT_EQ(t.steps.size(), 1u);
    EXPECT_EQ(t.final_cot, "g");
    EXPECT_TRUE(within_sigmas(t.final_potential, 0.8, 1024));
    EXPECT_EQ(t.status, OptimizerStatus::unterminated);
    expect_argmax(t);
}

TEST(Optimizer, StepCountFollowsChunkSize) {
    const auto q = make_question("q", "1");
    // Every run of this fixture is eight symbols plus the answer token.
    for (std::int64_t chunk : {1, 2, 3, 4, 9, 20}) {
        ToyHarness h("full_length.json");
        const auto t = optimize_cot(h.sampler, q, config(2, chunk, 8, 64, 11), params_with(1, 0, 64));
        EXPECT_EQ(static_cast<std::int64_t>(t.steps.size()), (9 + chunk - 1) / chunk) << chunk;
        EXPECT_EQ(t.status, OptimizerStatus::answered);
        EXPECT_EQ(count_tokens(t.final_cot), 9);
        EXPECT_EQ(t.short_chunks, 9 % chunk != 0) << chunk;
        expect_argmax(t);
    }
}

TEST(Optimizer, TokenAccountingOnFullLengthRuns) {
    ToyHarness h("full_length.json");
    const auto q = make_question("q", "1");
    const std::int64_t m = 3, n_eval = 16, chunk = 3, total = 9;
    const auto t = optimize_cot(h.sampler, q, config(m, chunk, n_eval, 64, 5), params_with(1, 0, 64));
    ASSERT_EQ(t.steps.size(), 3u);
    // M * n_eval * sum_{i=1..3} (i/3) * 9
    EXPECT_EQ(t.scoring_tokens, m * n_eval * 18);
    EXPECT_EQ(t.candidate_tokens, m * total);
    EXPECT_EQ(estimate_optimizer_budget(m, n_eval, 3, total).total_tokens, m * n_eval * 18);
}

TEST(Optimizer, ReproducibleAndRoundTrips) {
    const auto q = make_question("q", "1");
    std::string first;
    for (int run = 0; run < 2; ++run) {
        ToyHarness h("chain3.json");
        const auto t = optimize_cot(h.sampler, q, config(4, 1, 32, 8, 42), params_with(1, 7, 64));
        const auto dumped = to_json(t).dump();
        if (run == 0)
            first = dumped;
        else
            EXPECT_EQ(dumped, first);
        EXPECT_EQ(to_json(optimizer_trace_from_json(nlohmann::json::parse(dumped))).dump(), dumped);
    }
    EXPECT_THROW(optimizer_trace_from_json(nlohmann::json{{"question_id", "q"}}), UsageError);
}

TEST(Optimizer, StatusWithoutAnswer) {
    const auto q = make_question("q", "1");
    {
        ScriptedProvider p("just thinking", FinishReason::stop);
        RolloutCache cache;
        Sampler sampler(p, cache);
        const auto t = optimize_cot(sampler, q, config(2, 4, 4, 5), params_with(1));
        EXPECT_EQ(t.status, OptimizerStatus::ended_without_answer);
        EXPECT_EQ(t.steps.size(), 1u);
        EXPECT_FALSE(t.correct);
    }
    {
        ScriptedProvider p("step 3 of many", FinishReason::length);
        RolloutCache cache;
        Sampler sampler(p, cache);
        const auto t = optimize_cot(sampler, q, config(2, 4, 4, 3), params_with(1));
        EXPECT_EQ(t.status, OptimizerStatus::unterminated);
        EXPECT_EQ(t.steps.size(), 3u);
        EXPECT_FALSE(t.short_chunks);
    }
}

TEST(Optimizer, RejectsBadConfig) {
    ToyHarness h("det.json");
    EXPECT_THROW(optimize_cot(h.sampler, make_question("q", "7"), config(0, 4, 4, 4), params_with(1)), UsageError);
    EXPECT_NE(derive_seed(0, 0, 1), derive_seed(0, 1, 0));
    EXPECT_NE(derive_seed(0, 0, 0), derive_seed(1, 0, 0));
}
