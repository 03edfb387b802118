#pragma once

// File formats: JSONL datasets, traces, curves, shape reports and pools, plus
// the CSV/Markdown reports. Every writer's output is readable by the matching
// reader. Doubles are written in shortest round-trip form.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotpot/core.hpp"
#include "cotpot/metrics.hpp"
#include "cotpot/shapes.hpp"
#include "cotpot/transfer.hpp"

namespace cotpot::io {

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
std::string to_jsonl(const std::vector<nlohmann::json>& rows);
std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename; creates parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

std::string format_double(double v);

// Dataset lines: {"id", "prompt", "answer", "answer_kind"}.
Question question_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Question& q);
std::vector<Question> read_dataset(const std::filesystem::path& path);
const Question& find_question(const std::vector<Question>& dataset, const std::string& id);

nlohmann::json to_json(const Trace& t);
Trace trace_from_json(const nlohmann::json& j);
std::vector<Trace> read_traces(const std::filesystem::path& path);

nlohmann::json to_json(const PotentialCurve& c);
PotentialCurve curve_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StabilityCurve& c);

/// Columns question_id, prefix_fraction, estimate, n_used.
std::string curves_csv(const std::vector<PotentialCurve>& curves);
std::vector<PotentialCurve> curves_from_csv(const std::string& content);
/// Reads JSONL or, for a .csv extension, CSV curves.
std::vector<PotentialCurve> read_curves(const std::filesystem::path& path);

ShapeThresholds thresholds_from_json(const nlohmann::json& j, ShapeThresholds base = {});
nlohmann::json to_json(const ShapeThresholds& t);
nlohmann::json to_json(const ClassifiedCurve& c);

// Pool lines: {"question_id", "outcomes": [bool...], "late_spike": [bool...]}.
struct OutcomePoolFile {
    std::vector<std::string> question_ids;
    OutcomePool outcomes;
    OutcomePool late_spike_flags;
};
OutcomePoolFile read_pool(const std::filesystem::path& path);
std::string pool_jsonl(const OutcomePoolFile& pool);

std::string passk_csv(const PassKReport& report);
nlohmann::json to_json(const PassKReport& report);

/// Columns fraction, mean_accuracy, min_accuracy, max_accuracy, then one per question.
std::string transfer_csv(const TransferReport& report);
nlohmann::json to_json(const TransferReport& report);

}  // namespace cotpot::io
