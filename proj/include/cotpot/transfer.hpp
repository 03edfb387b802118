#pragma once

// Cross-model transfer: condition a recipient on growing fractions of a donor's
// chain of thought and measure its accuracy.

#include <optional>
#include <string>
#include <vector>

#include "cotpot/core.hpp"
#include "cotpot/sampler.hpp"

namespace cotpot {

struct TransferConfig {
    std::vector<double> fractions{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

    void validate() const;
};

struct TransferCell {
    double fraction = 0.0;
    std::int64_t n_correct = 0;
    std::int64_t n_used = 0;
    double accuracy = 0.0;  // n_correct / n_used
    bool degraded = false;
};

struct TransferRow {
    std::string question_id;
    std::string donor_ref;
    std::vector<TransferCell> cells;  // aligned with the config's fractions
};

struct TransferPoint {
    double fraction = 0.0;
    double mean_accuracy = 0.0;
    double min_accuracy = 0.0;
    double max_accuracy = 0.0;
};

struct SkippedQuestion {
    std::string question_id;
    std::string reason;
};

struct TransferReport {
    std::vector<double> fractions;
    std::vector<TransferRow> rows;
    std::vector<TransferPoint> points;
    std::vector<SkippedQuestion> skipped;

    bool degraded() const;
};

/// Picks the donor trace for a question: the correct trace whose curve has the
/// highest mean estimate when curves are given, else the first correct trace.
std::optional<Trace> select_donor(const std::string& question_id, const std::vector<Trace>& traces,
                                  const std::vector<PotentialCurve>& curves = {});

/// Donor prefix at `fraction`: the donor text without its final-answer
/// sentence, cut after floor(fraction * tokens) whitespace tokens.
std::string donor_prefix(const Trace& donor, AnswerKind kind, double fraction);

/// Runs params.n_samples recipient rollouts per (question, fraction) through
/// `recipient`. Questions without a usable donor are skipped and listed in the
/// report. Throws UsageError when nothing is left to run.
TransferReport run_transfer(Sampler& recipient, const std::vector<Question>& questions,
                            const std::vector<Trace>& donor_traces, const TransferConfig& config,
                            const SamplingParams& params, const std::vector<PotentialCurve>& donor_curves = {});

}  // namespace cotpot
