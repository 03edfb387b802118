#include "cotpot/transfer.hpp"

#include <algorithm>
#include <limits>

#include "cotpot/grading.hpp"
#include "cotpot/text.hpp"

namespace cotpot {

void TransferConfig::validate() const {
    if (fractions.empty()) throw UsageError("transfer needs at least one fraction");
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        if (!(fractions[i] >= 0.0 && fractions[i] <= 1.0)) throw UsageError("transfer fractions must lie in [0,1]");
        if (i > 0 && fractions[i] <= fractions[i - 1]) throw UsageError("transfer fractions must be strictly increasing");
    }
}

bool TransferReport::degraded() const {
    for (const auto& r : rows)
        for (const auto& c : r.cells)
            if (c.degraded) return true;
    return false;
}

std::optional<Trace> select_donor(const std::string& question_id, const std::vector<Trace>& traces,
                                  const std::vector<PotentialCurve>& curves) {
    std::optional<Trace> first;
    std::optional<Trace> best;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (const auto& t : traces) {
        if (t.question_id != question_id || !t.correct) continue;
        if (!first) first = t;
        const auto ref = t.ref();
        for (const auto& c : curves) {
            if (c.trace_ref != ref || c.points.empty()) continue;
            double mean = 0.0;
            for (const auto& p : c.points) mean += p.estimate;
            mean /= static_cast<double>(c.points.size());
            if (mean > best_mean) {
                best_mean = mean;
                best = t;
            }
        }
    }
    return best ? best : first;
}

std::string donor_prefix(const Trace& donor, AnswerKind kind, double fraction) {
    if (fraction <= 0.0) return "";
    return cut_at_fraction(strip_final_answer(donor.text, kind), fraction);
}

TransferReport run_transfer(Sampler& recipient, const std::vector<Question>& questions,
                            const std::vector<Trace>& donor_traces, const TransferConfig& config,
                            const SamplingParams& params, const std::vector<PotentialCurve>& donor_curves) {
    config.validate();
    params.validate();
    TransferReport report;
    report.fractions = config.fractions;
    for (const auto& t : donor_traces) {
        const bool known = std::any_of(questions.begin(), questions.end(),
                                       [&](const Question& q) { return q.id == t.question_id; });
        if (!known) throw UsageError("donor trace for unknown question " + t.question_id);
    }

    for (const auto& q : questions) {
        const auto donor = select_donor(q.id, donor_traces, donor_curves);
        if (!donor) {
            report.skipped.push_back({q.id, "no correct donor trace"});
            continue;
        }
        TransferRow row;
        row.question_id = q.id;
        row.donor_ref = donor->ref();
        for (double f : config.fractions) {
            TransferCell cell;
            cell.fraction = f;
            RolloutBatch batch;
            try {
                batch = recipient.run_rollouts(q, donor_prefix(*donor, q.kind, f), params, f);
            } catch (const DegradedBatchError& e) {
                batch = e.partial();
                cell.degraded = true;
            }
            cell.n_used = batch.n_used();
            cell.n_correct = batch.n_correct();
            cell.accuracy = batch.estimate();
            row.cells.push_back(cell);
        }
        report.rows.push_back(std::move(row));
    }
    if (report.rows.empty()) throw UsageError("no question has a usable donor trace");

    for (std::size_t i = 0; i < config.fractions.size(); ++i) {
        TransferPoint p;
        p.fraction = config.fractions[i];
        p.min_accuracy = 1.0;
        for (const auto& r : report.rows) {
            const double a = r.cells[i].accuracy;
            p.mean_accuracy += a;
            p.min_accuracy = std::min(p.min_accuracy, a);
            p.max_accuracy = std::max(p.max_accuracy, a);
        }
        p.mean_accuracy /= static_cast<double>(report.rows.size());
        report.points.push_back(p);
    }
    return report;
}

}  // namespace cotpot
