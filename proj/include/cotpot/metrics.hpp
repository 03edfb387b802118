#pragma once

#include <string>
#include <vector>

#include "cotpot/core.hpp"
#include "cotpot/sampler.hpp"

namespace cotpot {

struct CurveOptions {
    int n_chunks = 20;
    // Include the empty-CoT point at fraction 0.
    bool include_empty = true;
};

/// Monte-Carlo potential curve: for each prefix i/n_chunks of the trace, the
/// fraction of rollouts reaching the gold answer. Points whose batch came back
/// degraded keep their partial estimate and are flagged.
PotentialCurve estimate_potential(Sampler& sampler, const Question& question, const Trace& trace,
                                  const CurveOptions& options, const SamplingParams& params);

/// Like estimate_potential but graded against the trace's own final answer.
/// Reuses the same cached rollouts. Throws UsageError("unstable target") when
/// the trace has no extracted answer.
StabilityCurve estimate_stability(Sampler& sampler, const Question& question, const Trace& trace,
                                  const CurveOptions& options, const SamplingParams& params);

/// Samples one full trace from the empty prefix.
Trace sample_trace(Sampler& sampler, const Question& question, const SamplingParams& params, Seed seed);

using OutcomePool = std::vector<std::vector<bool>>;  // per question, in seed order

/// Fraction of questions with at least one correct answer among their first k samples.
double pass_at_k(const OutcomePool& outcomes, std::size_t k);

/// pass@k where a correct sample flagged as a late spike counts as incorrect.
double corrected_pass_at_k(const OutcomePool& outcomes, const OutcomePool& late_spike_flags, std::size_t k);

struct PassKReport {
    std::vector<std::size_t> k_values;
    std::vector<double> raw;
    std::vector<double> corrected;
    // Questions credited by raw pass@k but not by the corrected one, at the largest k.
    std::vector<std::string> flagged_questions;
};

PassKReport pass_at_k_report(const std::vector<std::string>& question_ids, const OutcomePool& outcomes,
                             const OutcomePool& late_spike_flags, const std::vector<std::size_t>& k_values);

}  // namespace cotpot
