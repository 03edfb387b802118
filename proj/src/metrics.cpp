#include "cotpot/metrics.hpp"

#include <algorithm>

#include "cotpot/grading.hpp"
#include "cotpot/text.hpp"

namespace cotpot {

namespace {

struct PrefixGrid {
    std::vector<double> fractions;
    std::vector<std::string> prefixes;
};

PrefixGrid prefix_grid(const Trace& trace, const CurveOptions& options) {
    Trace chunked = trace;
    if (chunked.chunk_boundaries.size() != static_cast<std::size_t>(options.n_chunks))
        chunked = chunk_trace(trace, options.n_chunks);
    PrefixGrid grid;
    for (int i = options.include_empty ? 0 : 1; i <= options.n_chunks; ++i) {
        grid.fractions.push_back(static_cast<double>(i) / options.n_chunks);
        grid.prefixes.push_back(prefix_at(chunked, static_cast<std::size_t>(i)));
    }
    return grid;
}

template <typename Score>
PotentialCurve build_curve(Sampler& sampler, const Question& question, const Trace& trace, const CurveOptions& options,
                           const SamplingParams& params, Score&& score) {
    const auto grid = prefix_grid(trace, options);
    PotentialCurve curve;
    curve.question_id = question.id;
    curve.trace_ref = trace.ref();
    curve.trace_correct = trace.correct;
    for (std::size_t i = 0; i < grid.prefixes.size(); ++i) {
        CurvePoint point;
        point.prefix_fraction = grid.fractions[i];
        RolloutBatch batch;
        try {
            batch = sampler.run_rollouts(question, grid.prefixes[i], params, grid.fractions[i]);
        } catch (const DegradedBatchError& e) {
            batch = e.partial();
            point.degraded = true;
        }
        point.n_used = batch.n_used();
        point.estimate = point.n_used == 0 ? 0.0
                                           : static_cast<double>(score(batch)) / static_cast<double>(point.n_used);
        curve.points.push_back(point);
    }
    return curve;
}

}  // namespace

PotentialCurve estimate_potential(Sampler& sampler, const Question& question, const Trace& trace,
                                  const CurveOptions& options, const SamplingParams& params) {
    return build_curve(sampler, question, trace, options, params,
                       [](const RolloutBatch& b) { return b.n_correct(); });
}

StabilityCurve estimate_stability(Sampler& sampler, const Question& question, const Trace& trace,
                                  const CurveOptions& options, const SamplingParams& params) {
    if (!trace.extracted_answer) throw UsageError("unstable target");
    const std::string target = *trace.extracted_answer;
    StabilityCurve out;
    out.target_answer = target;
    out.curve = build_curve(sampler, question, trace, options, params,
                            [&](const RolloutBatch& b) { return b.count_matching(target, question.kind); });
    return out;
}

Trace sample_trace(Sampler& sampler, const Question& question, const SamplingParams& params, Seed seed) {
    const auto request = CompletionRequest::for_prefix(question.prompt, "", params);
    auto outcome = sampler.sample(question, request, seed);
    if (outcome.failed) throw TransportError("trace sampling failed for " + question.id + ": " + outcome.error);
    Trace t;
    t.question_id = question.id;
    t.text = outcome.completion.text;
    t.token_count = outcome.completion.token_count;
    t.extracted_answer = outcome.extracted;
    t.correct = outcome.correct;
    t.provider_id = outcome.completion.provider_id;
    t.seed_used = seed;
    return t;
}

namespace {

double solved_fraction(const OutcomePool& outcomes, const OutcomePool* flags, std::size_t k) {
    if (k < 1) throw UsageError("k must be >= 1");
    if (outcomes.empty()) throw UsageError("empty outcome pool");
    const bool use_flags = flags != nullptr;
    if (use_flags && flags->size() != outcomes.size()) throw UsageError("flags misaligned with outcomes");
    std::size_t solved = 0;
    for (std::size_t q = 0; q < outcomes.size(); ++q) {
        const auto& samples = outcomes[q];
        if (samples.size() < k)
            throw UsageError("question " + std::to_string(q) + " has fewer than k=" + std::to_string(k) + " samples");
        if (use_flags && (*flags)[q].size() != samples.size()) throw UsageError("flags misaligned with outcomes");
        for (std::size_t i = 0; i < k; ++i) {
            if (samples[i] && !(use_flags && (*flags)[q][i])) {
                ++solved;
                break;
            }
        }
    }
    return static_cast<double>(solved) / static_cast<double>(outcomes.size());
}

}  // namespace

double pass_at_k(const OutcomePool& outcomes, std::size_t k) { return solved_fraction(outcomes, nullptr, k); }

double corrected_pass_at_k(const OutcomePool& outcomes, const OutcomePool& late_spike_flags, std::size_t k) {
    return solved_fraction(outcomes, &late_spike_flags, k);
}

PassKReport pass_at_k_report(const std::vector<std::string>& question_ids, const OutcomePool& outcomes,
                             const OutcomePool& late_spike_flags, const std::vector<std::size_t>& k_values) {
    if (question_ids.size() != outcomes.size()) throw UsageError("question ids misaligned with outcomes");
    PassKReport report;
    report.k_values = k_values;
    for (auto k : k_values) {
        report.raw.push_back(pass_at_k(outcomes, k));
        report.corrected.push_back(corrected_pass_at_k(outcomes, late_spike_flags, k));
    }
    if (!k_values.empty()) {
        const std::size_t k_max = *std::max_element(k_values.begin(), k_values.end());
        for (std::size_t q = 0; q < outcomes.size(); ++q) {
            bool raw = false, corrected = false;
            for (std::size_t i = 0; i < k_max && i < outcomes[q].size(); ++i) {
                raw = raw || outcomes[q][i];
                corrected = corrected || (outcomes[q][i] && !late_spike_flags[q][i]);
            }
            if (raw && !corrected) report.flagged_questions.push_back(question_ids[q]);
        }
    }
    return report;
}

}  // namespace cotpot
