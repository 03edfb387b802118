#pragma once

// Summary statistics of potential curves: insights, tangents, late spikes
// (guesses) and monotonicity.

#include <optional>
#include <string>
#include <vector>

#include "cotpot/core.hpp"

namespace cotpot {

/// Comparisons treat values within this distance of a threshold as equal to it,
/// so decimal boundaries such as 0.5 - 0.1 == 0.40 behave as written.
inline constexpr double kThresholdTolerance = 1e-9;

/// Thresholds used for multiple-choice curves, where random guessing already
/// reaches 25%.
ShapeThresholds multiple_choice_thresholds();

/// Classifies the curve's points as given.
///   insight:    some consecutive rise e[i+1] - e[i] > insight_jump, with i+1 outside
///               the last insight_tail_exclusion points
///   tangent:    max over i < j of e[i] - e[j] >= tangent_drop
///   late spike: second-to-last estimate < late_spike_level
///   monotone:   every consecutive drop e[i] - e[i+1] <= monotonicity_slack
ShapeReport classify(const PotentialCurve& curve, const ShapeThresholds& thresholds = {});

/// The curve without its fraction-0 (empty prefix) point, plus that point's estimate.
struct ClassificationInput {
    PotentialCurve curve;
    std::optional<double> baseline;
};
ClassificationInput split_baseline(const PotentialCurve& curve);

struct ClassifiedCurve {
    std::string question_id;
    std::optional<std::string> trace_ref;
    ShapeReport report;
    std::optional<bool> trace_correct;
    // Potential of the empty prefix, when the curve carried one.
    std::optional<double> baseline;
};

struct AggregateFilter {
    bool correct_only = true;
    // Drop questions whose empty-prefix potential is exactly 0 or 1.
    bool exclude_saturated_baseline = true;
};

struct SummaryRow {
    std::string label;
    std::size_t n_traces = 0;
    double insight_pct = 0.0;
    double tangent_pct = 0.0;
    double late_spike_pct = 0.0;
    double monotone_pct = 0.0;
};

/// Per-statistic percentages over the filtered set. Throws UsageError
/// ("no qualifying traces") when the filter leaves nothing.
SummaryRow aggregate(const std::vector<ClassifiedCurve>& curves, const AggregateFilter& filter,
                     std::string label = "model");

std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string summary_markdown(const std::vector<SummaryRow>& rows);

}  // namespace cotpot
