#include "cotpot/shapes.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace cotpot {

ShapeThresholds multiple_choice_thresholds() {
    ShapeThresholds t;
    t.late_spike_level = 0.25;
    return t;
}

ShapeReport classify(const PotentialCurve& curve, const ShapeThresholds& thresholds) {
    thresholds.validate();
    const auto& pts = curve.points;
    const std::size_t n = pts.size();
    if (n < 3) throw UsageError("curve " + curve.question_id + " has fewer than 3 points");

    ShapeReport r;
    r.thresholds_used = thresholds;
    constexpr double tol = kThresholdTolerance;
    const auto tail = static_cast<std::size_t>(thresholds.insight_tail_exclusion);

    for (std::size_t i = 0; i + 1 < n && i + 1 + tail < n; ++i) {
        if (pts[i + 1].estimate - pts[i].estimate > thresholds.insight_jump + tol) {
            r.insight = true;
            r.insight_index = i + 1;
            break;
        }
    }

    // Running-max drawdown.
    std::size_t peak = 0;
    double best_drop = -1.0;
    std::size_t best_peak = 0, best_trough = 0;
    for (std::size_t j = 1; j < n; ++j) {
        if (pts[j - 1].estimate > pts[peak].estimate) peak = j - 1;
        const double drop = pts[peak].estimate - pts[j].estimate;
        if (drop > best_drop) {
            best_drop = drop;
            best_peak = peak;
            best_trough = j;
        }
    }
    if (best_drop >= thresholds.tangent_drop - tol) {
        r.tangent = true;
        r.tangent_peak = best_peak;
        r.tangent_trough = best_trough;
    }

    r.late_spike = pts[n - 2].estimate < thresholds.late_spike_level - tol;

    r.monotone = true;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (pts[i].estimate - pts[i + 1].estimate > thresholds.monotonicity_slack + tol) r.monotone = false;
    return r;
}

ClassificationInput split_baseline(const PotentialCurve& curve) {
    ClassificationInput out;
    out.curve = curve;
    if (!curve.points.empty() && curve.points.front().prefix_fraction == 0.0) {
        out.baseline = curve.points.front().estimate;
        out.curve.points.erase(out.curve.points.begin());
    }
    return out;
}

SummaryRow aggregate(const std::vector<ClassifiedCurve>& curves, const AggregateFilter& filter, std::string label) {
    SummaryRow row;
    row.label = std::move(label);
    std::size_t insight = 0, tangent = 0, late = 0, monotone = 0;
    const ShapeThresholds* first = nullptr;
    for (const auto& c : curves) {
        if (first == nullptr) {
            first = &c.report.thresholds_used;
        } else {
            const auto& t = c.report.thresholds_used;
            if (t.insight_jump != first->insight_jump || t.tangent_drop != first->tangent_drop ||
                t.late_spike_level != first->late_spike_level || t.monotonicity_slack != first->monotonicity_slack ||
                t.insight_tail_exclusion != first->insight_tail_exclusion)
                throw UsageError("reports were classified with different thresholds");
        }
        if (filter.correct_only && !c.trace_correct.value_or(false)) continue;
        if (filter.exclude_saturated_baseline && c.baseline && (*c.baseline == 0.0 || *c.baseline == 1.0)) continue;
        ++row.n_traces;
        insight += c.report.insight ? 1 : 0;
        tangent += c.report.tangent ? 1 : 0;
        late += c.report.late_spike ? 1 : 0;
        monotone += c.report.monotone ? 1 : 0;
    }
    if (row.n_traces == 0) throw UsageError("no qualifying traces");
    const auto pct = [&](std::size_t k) { return 100.0 * static_cast<double>(k) / static_cast<double>(row.n_traces); };
    row.insight_pct = pct(insight);
    row.tangent_pct = pct(tangent);
    row.late_spike_pct = pct(late);
    row.monotone_pct = pct(monotone);
    return row;
}

namespace {

std::string format_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "model,n_traces,insights_pct,tangents_pct,late_spike_pct,monotonicity_pct\n";
    for (const auto& r : rows)
        out << r.label << ',' << r.n_traces << ',' << format_pct(r.insight_pct) << ',' << format_pct(r.tangent_pct)
            << ',' << format_pct(r.late_spike_pct) << ',' << format_pct(r.monotone_pct) << '\n';
    return out.str();
}

std::string summary_markdown(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "| Model | Insights | Tangents | Late spike | Monotonicity |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto& r : rows)
        out << "| " << r.label << " | " << format_pct(r.insight_pct) << "% | " << format_pct(r.tangent_pct) << "% | "
            << format_pct(r.late_spike_pct) << "% | " << format_pct(r.monotone_pct) << "% |\n";
    return out.str();
}

}  // namespace cotpot
