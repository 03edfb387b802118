#include "cotpot/optimizer.hpp"

#include <map>

#include "cotpot/grading.hpp"
#include "cotpot/text.hpp"

namespace cotpot {

void OptimizerConfig::validate() const {
    if (chunk_tokens < 1 || n_candidates < 1 || n_eval < 1 || max_steps < 1)
        throw UsageError("optimizer chunk_tokens, n_candidates, n_eval and max_steps must be >= 1");
}

std::string_view to_string(OptimizerStatus status) {
    switch (status) {
        case OptimizerStatus::answered: return "answered";
        case OptimizerStatus::ended_without_answer: return "ended-without-answer";
        case OptimizerStatus::unterminated: return "unterminated";
    }
    return "unterminated";
}

OptimizerStatus parse_optimizer_status(std::string_view name) {
    if (name == "answered") return OptimizerStatus::answered;
    if (name == "ended-without-answer") return OptimizerStatus::ended_without_answer;
    if (name == "unterminated") return OptimizerStatus::unterminated;
    throw UsageError("unknown optimizer status: " + std::string(name));
}

Seed derive_seed(Seed base, std::uint64_t step, std::uint64_t candidate) {
    std::uint64_t h = fnv1a64("optimizer-candidate", base);
    h = fnv1a64(std::to_string(step), h);
    return fnv1a64(std::to_string(candidate), h);
}

namespace {

// The integer fallback of extract_answer fires on any number in running prose,
// so only explicit answers stop the loop.
bool has_final_answer(const std::string& text, AnswerKind kind) {
    const auto r = extract_answer(text, kind);
    return r.extracted &&
           (r.method == ExtractionMethod::boxed || r.method == ExtractionMethod::final_answer_phrase);
}

}  // namespace

OptimizerTrace optimize_cot(Sampler& sampler, const Question& question, const OptimizerConfig& config,
                            const SamplingParams& params) {
    config.validate();
    params.validate();
    SamplingParams eval_params = params;
    eval_params.n_samples = config.n_eval;

    OptimizerTrace trace;
    trace.question_id = question.id;
    trace.config = config;
    std::string prefix;

    for (std::int64_t step = 0; step < config.max_steps; ++step) {
        OptimizerStep record;
        record.candidates.resize(static_cast<std::size_t>(config.n_candidates));
        const auto request = CompletionRequest::capped(question.prompt, prefix, params, config.chunk_tokens);
        for (std::size_t m = 0; m < record.candidates.size(); ++m) {
            auto outcome = sampler.sample(question, request, derive_seed(config.seed, static_cast<std::uint64_t>(step), m));
            if (outcome.failed) throw TransportError("candidate sampling failed: " + outcome.error);
            auto& c = record.candidates[m];
            c.text = outcome.completion.text;
            c.token_count = outcome.completion.token_count;
            c.finish_reason = outcome.completion.finish_reason;
        }
        // Batches run one after another; each already saturates the provider cap.
        // Identical candidate texts would draw identical batches, so each is scored once.
        std::map<std::string, RolloutBatch> scored;
        for (auto& c : record.candidates) {
            auto it = scored.find(c.text);
            if (it == scored.end())
                it = scored.emplace(c.text, sampler.run_rollouts(question, prefix + c.text, eval_params)).first;
            const auto& batch = it->second;
            c.n_used = batch.n_used();
            c.n_correct = batch.n_correct();
            c.potential = batch.estimate();
            c.rollout_tokens = batch.generated_tokens();
            trace.candidate_tokens += c.token_count;
            trace.scoring_tokens += c.rollout_tokens + c.n_used * c.token_count;
        }
        for (std::size_t m = 1; m < record.candidates.size(); ++m)
            if (record.candidates[m].potential > record.candidates[record.chosen].potential) record.chosen = m;

        const auto& chosen = record.candidates[record.chosen];
        prefix += chosen.text;
        trace.final_potential = chosen.potential;
        if (chosen.token_count < config.chunk_tokens) trace.short_chunks = true;
        const bool stopped = chosen.finish_reason == FinishReason::stop;
        trace.steps.push_back(std::move(record));

        if (has_final_answer(prefix, question.kind)) {
            trace.status = OptimizerStatus::answered;
            break;
        }
        if (stopped) {
            trace.status = OptimizerStatus::ended_without_answer;
            break;
        }
    }
    trace.final_cot = prefix;
    const auto graded = grade_text(prefix, question.gold_answer, question.kind);
    trace.extracted_answer = graded.extracted;
    trace.correct = graded.correct;
    return trace;
}

nlohmann::json to_json(const OptimizerTrace& t) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : t.steps) {
        nlohmann::json candidates = nlohmann::json::array();
        for (const auto& c : s.candidates)
            candidates.push_back({{"text", c.text},
                                  {"token_count", c.token_count},
                                  {"finish_reason", to_string(c.finish_reason)},
                                  {"potential", c.potential},
                                  {"n_used", c.n_used},
                                  {"n_correct", c.n_correct},
                                  {"rollout_tokens", c.rollout_tokens}});
        steps.push_back({{"candidates", candidates}, {"chosen", s.chosen}});
    }
    return {{"question_id", t.question_id},
            {"config",
             {{"chunk_tokens", t.config.chunk_tokens},
              {"n_candidates", t.config.n_candidates},
              {"n_eval", t.config.n_eval},
              {"max_steps", t.config.max_steps},
              {"seed", t.config.seed}}},
            {"steps", steps},
            {"final_cot", t.final_cot},
            {"final_potential", t.final_potential},
            {"status", to_string(t.status)},
            {"extracted_answer", t.extracted_answer ? nlohmann::json(*t.extracted_answer) : nlohmann::json(nullptr)},
            {"correct", t.correct},
            {"short_chunks", t.short_chunks},
            {"candidate_tokens", t.candidate_tokens},
            {"scoring_tokens", t.scoring_tokens}};
}

OptimizerTrace optimizer_trace_from_json(const nlohmann::json& j) {
    OptimizerTrace t;
    try {
        t.question_id = j.at("question_id").get<std::string>();
        const auto& cfg = j.at("config");
        t.config.chunk_tokens = cfg.at("chunk_tokens").get<std::int64_t>();
        t.config.n_candidates = cfg.at("n_candidates").get<std::int64_t>();
        t.config.n_eval = cfg.at("n_eval").get<std::int64_t>();
        t.config.max_steps = cfg.at("max_steps").get<std::int64_t>();
        t.config.seed = cfg.at("seed").get<Seed>();
        for (const auto& s : j.at("steps")) {
            OptimizerStep step;
            step.chosen = s.at("chosen").get<std::size_t>();
            for (const auto& c : s.at("candidates")) {
                Candidate cand;
                cand.text = c.at("text").get<std::string>();
                cand.token_count = c.at("token_count").get<std::int64_t>();
                cand.finish_reason = parse_finish_reason(c.at("finish_reason").get<std::string>());
                cand.potential = c.at("potential").get<double>();
                cand.n_used = c.at("n_used").get<std::int64_t>();
                cand.n_correct = c.at("n_correct").get<std::int64_t>();
                cand.rollout_tokens = c.at("rollout_tokens").get<std::int64_t>();
                step.candidates.push_back(std::move(cand));
            }
            if (step.chosen >= step.candidates.size()) throw UsageError("chosen index out of range");
            t.steps.push_back(std::move(step));
        }
        t.final_cot = j.at("final_cot").get<std::string>();
        t.final_potential = j.at("final_potential").get<double>();
        t.status = parse_optimizer_status(j.at("status").get<std::string>());
        if (!j.at("extracted_answer").is_null()) t.extracted_answer = j.at("extracted_answer").get<std::string>();
        t.correct = j.at("correct").get<bool>();
        t.short_chunks = j.value("short_chunks", false);
        t.candidate_tokens = j.at("candidate_tokens").get<std::int64_t>();
        t.scoring_tokens = j.at("scoring_tokens").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed optimizer trace: ") + e.what());
    }
    return t;
}

}  // namespace cotpot
