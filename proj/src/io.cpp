#include "cotpot/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace cotpot::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (quoted) {
            if (c == '"' && i + 1 < content.size() && content[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
        } else {
            field.push_back(c);
            any = true;
        }
    }
    if (quoted) throw UsageError("unterminated quoted CSV field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename T>
T parse_number(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        T v{};
        if constexpr (std::is_floating_point_v<T>)
            v = static_cast<T>(std::stod(s, &used));
        else
            v = static_cast<T>(std::stoll(s, &used));
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string("bad ") + what + " value '" + s + "'");
    }
}

json optional_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::string> optional_string(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

template <typename Fn>
auto wrap_json_errors(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed ") + what + ": " + e.what());
    }
}

}  // namespace

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<json> read_jsonl(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::vector<json> rows;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            rows.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw UsageError(path.string() + ":" + std::to_string(number) + ": invalid JSON: " + e.what());
        }
    }
    return rows;
}

std::string to_jsonl(const std::vector<json>& rows) {
    std::string out;
    for (const auto& r : rows) {
        out += r.dump(-1, ' ', false, json::error_handler_t::replace);
        out.push_back('\n');
    }
    return out;
}

std::string format_double(double v) { return json(v).dump(); }

Question question_from_json(const json& j) {
    Question q = wrap_json_errors("question", [&] {
        Question r;
        r.id = j.at("id").get<std::string>();
        r.prompt = j.at("prompt").get<std::string>();
        const auto& a = j.at("answer");
        r.gold_answer = a.is_number_integer() ? std::to_string(a.get<std::int64_t>()) : a.get<std::string>();
        r.kind = parse_answer_kind(j.value("answer_kind", std::string("integer")));
        return r;
    });
    q.validate();
    return q;
}

json to_json(const Question& q) {
    return {{"id", q.id}, {"prompt", q.prompt}, {"answer", q.gold_answer}, {"answer_kind", to_string(q.kind)}};
}

std::vector<Question> read_dataset(const fs::path& path) {
    std::vector<Question> out;
    std::set<std::string> ids;
    for (const auto& j : read_jsonl(path)) {
        auto q = question_from_json(j);
        if (!ids.insert(q.id).second) throw UsageError("duplicate question id " + q.id + " in " + path.string());
        out.push_back(std::move(q));
    }
    if (out.empty()) throw UsageError("dataset " + path.string() + " is empty");
    return out;
}

const Question& find_question(const std::vector<Question>& dataset, const std::string& id) {
    for (const auto& q : dataset)
        if (q.id == id) return q;
    throw UsageError("unknown question id " + id);
}

json to_json(const Trace& t) {
    return {{"question_id", t.question_id},
            {"text", t.text},
            {"token_count", t.token_count},
            {"chunk_boundaries", t.chunk_boundaries},
            {"extracted_answer", optional_json(t.extracted_answer)},
            {"correct", t.correct},
            {"provider_id", t.provider_id},
            {"seed_used", t.seed_used}};
}

Trace trace_from_json(const json& j) {
    Trace t = wrap_json_errors("trace", [&] {
        Trace r;
        r.question_id = j.at("question_id").get<std::string>();
        r.text = j.at("text").get<std::string>();
        r.token_count = j.value("token_count", std::int64_t{0});
        r.chunk_boundaries = j.value("chunk_boundaries", std::vector<std::size_t>{});
        r.extracted_answer = optional_string(j, "extracted_answer");
        r.correct = j.value("correct", false);
        r.provider_id = j.value("provider_id", std::string{});
        r.seed_used = j.value("seed_used", Seed{0});
        return r;
    });
    t.validate();
    return t;
}

std::vector<Trace> read_traces(const fs::path& path) {
    std::vector<Trace> out;
    for (const auto& j : read_jsonl(path)) out.push_back(trace_from_json(j));
    return out;
}

json to_json(const PotentialCurve& c) {
    json points = json::array();
    for (const auto& p : c.points) {
        json jp = {{"prefix_fraction", p.prefix_fraction}, {"estimate", p.estimate}, {"n_used", p.n_used}};
        if (p.degraded) jp["degraded"] = true;
        points.push_back(std::move(jp));
    }
    return {{"question_id", c.question_id},
            {"trace_ref", optional_json(c.trace_ref)},
            {"trace_correct", c.trace_correct ? json(*c.trace_correct) : json(nullptr)},
            {"exact", c.exact},
            {"points", points}};
}

PotentialCurve curve_from_json(const json& j) {
    PotentialCurve c = wrap_json_errors("curve", [&] {
        PotentialCurve r;
        r.question_id = j.at("question_id").get<std::string>();
        r.trace_ref = optional_string(j, "trace_ref");
        if (j.contains("trace_correct") && !j.at("trace_correct").is_null())
            r.trace_correct = j.at("trace_correct").get<bool>();
        r.exact = j.value("exact", false);
        for (const auto& p : j.at("points")) {
            CurvePoint cp;
            cp.prefix_fraction = p.at("prefix_fraction").get<double>();
            cp.estimate = p.at("estimate").get<double>();
            cp.n_used = p.value("n_used", std::int64_t{0});
            cp.degraded = p.value("degraded", false);
            r.points.push_back(cp);
        }
        return r;
    });
    c.validate();
    return c;
}

json to_json(const StabilityCurve& c) {
    auto j = to_json(c.curve);
    j["target_answer"] = c.target_answer;
    return j;
}

std::string curves_csv(const std::vector<PotentialCurve>& curves) {
    std::string out = "question_id,prefix_fraction,estimate,n_used\n";
    for (const auto& c : curves)
        for (const auto& p : c.points)
            out += csv_field(c.question_id) + ',' + format_double(p.prefix_fraction) + ',' + format_double(p.estimate) +
                   ',' + std::to_string(p.n_used) + '\n';
    return out;
}

std::vector<PotentialCurve> curves_from_csv(const std::string& content) {
    const auto rows = parse_csv(content);
    if (rows.empty() || rows[0] != std::vector<std::string>{"question_id", "prefix_fraction", "estimate", "n_used"})
        throw UsageError("curve CSV must start with header question_id,prefix_fraction,estimate,n_used");
    std::vector<PotentialCurve> curves;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 4) throw UsageError("curve CSV row " + std::to_string(i + 1) + " has " +
                                            std::to_string(r.size()) + " fields");
        CurvePoint p;
        p.prefix_fraction = parse_number<double>(r[1], "prefix_fraction");
        p.estimate = parse_number<double>(r[2], "estimate");
        p.n_used = parse_number<std::int64_t>(r[3], "n_used");
        // A new curve starts at a new id or when the fractions restart.
        if (curves.empty() || curves.back().question_id != r[0] ||
            p.prefix_fraction <= curves.back().points.back().prefix_fraction) {
            curves.emplace_back();
            curves.back().question_id = r[0];
        }
        curves.back().points.push_back(p);
    }
    for (const auto& c : curves) c.validate();
    return curves;
}

std::vector<PotentialCurve> read_curves(const fs::path& path) {
    if (path.extension() == ".csv") return curves_from_csv(read_file(path));
    std::vector<PotentialCurve> out;
    for (const auto& j : read_jsonl(path)) out.push_back(curve_from_json(j));
    return out;
}

ShapeThresholds thresholds_from_json(const json& j, ShapeThresholds t) {
    wrap_json_errors("thresholds", [&] {
        if (!j.is_object()) throw UsageError("thresholds file must hold a JSON object");
        t.insight_jump = j.value("insight_jump", t.insight_jump);
        t.tangent_drop = j.value("tangent_drop", t.tangent_drop);
        t.late_spike_level = j.value("late_spike_level", t.late_spike_level);
        t.monotonicity_slack = j.value("monotonicity_slack", t.monotonicity_slack);
        t.n_chunks = j.value("n_chunks", t.n_chunks);
        t.insight_tail_exclusion = j.value("insight_tail_exclusion", t.insight_tail_exclusion);
        return 0;
    });
    t.validate();
    return t;
}

json to_json(const ShapeThresholds& t) {
    return {{"insight_jump", t.insight_jump},
            {"tangent_drop", t.tangent_drop},
            {"late_spike_level", t.late_spike_level},
            {"monotonicity_slack", t.monotonicity_slack},
            {"n_chunks", t.n_chunks},
            {"insight_tail_exclusion", t.insight_tail_exclusion}};
}

json to_json(const ClassifiedCurve& c) {
    const auto& r = c.report;
    const auto opt_index = [](const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); };
    return {{"question_id", c.question_id},
            {"trace_ref", optional_json(c.trace_ref)},
            {"trace_correct", c.trace_correct ? json(*c.trace_correct) : json(nullptr)},
            {"baseline", c.baseline ? json(*c.baseline) : json(nullptr)},
            {"insight", r.insight},
            {"insight_index", opt_index(r.insight_index)},
            {"tangent", r.tangent},
            {"tangent_peak", opt_index(r.tangent_peak)},
            {"tangent_trough", opt_index(r.tangent_trough)},
            {"late_spike", r.late_spike},
            {"monotone", r.monotone},
            {"thresholds", to_json(r.thresholds_used)}};
}

OutcomePoolFile read_pool(const fs::path& path) {
    OutcomePoolFile pool;
    for (const auto& j : read_jsonl(path)) {
        wrap_json_errors("pool line", [&] {
            pool.question_ids.push_back(j.at("question_id").get<std::string>());
            pool.outcomes.push_back(j.at("outcomes").get<std::vector<bool>>());
            if (j.contains("late_spike"))
                pool.late_spike_flags.push_back(j.at("late_spike").get<std::vector<bool>>());
            else
                pool.late_spike_flags.emplace_back(pool.outcomes.back().size(), false);
            return 0;
        });
    }
    return pool;
}

std::string pool_jsonl(const OutcomePoolFile& pool) {
    std::vector<json> rows;
    for (std::size_t i = 0; i < pool.question_ids.size(); ++i)
        rows.push_back({{"question_id", pool.question_ids[i]},
                        {"outcomes", pool.outcomes[i]},
                        {"late_spike", pool.late_spike_flags[i]}});
    return to_jsonl(rows);
}

std::string passk_csv(const PassKReport& report) {
    std::string out = "k,pass_at_k,corrected_pass_at_k\n";
    for (std::size_t i = 0; i < report.k_values.size(); ++i)
        out += std::to_string(report.k_values[i]) + ',' + format_double(report.raw[i]) + ',' +
               format_double(report.corrected[i]) + '\n';
    return out;
}

json to_json(const PassKReport& report) {
    return {{"k_values", report.k_values},
            {"raw", report.raw},
            {"corrected", report.corrected},
            {"flagged_questions", report.flagged_questions}};
}

std::string transfer_csv(const TransferReport& report) {
    std::string out = "fraction,mean_accuracy,min_accuracy,max_accuracy";
    for (const auto& r : report.rows) out += ',' + csv_field(r.question_id);
    out.push_back('\n');
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const auto& p = report.points[i];
        out += format_double(p.fraction) + ',' + format_double(p.mean_accuracy) + ',' + format_double(p.min_accuracy) +
               ',' + format_double(p.max_accuracy);
        for (const auto& r : report.rows) out += ',' + format_double(r.cells[i].accuracy);
        out.push_back('\n');
    }
    return out;
}

json to_json(const TransferReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        json cells = json::array();
        for (const auto& c : r.cells)
            cells.push_back({{"fraction", c.fraction},
                             {"n_correct", c.n_correct},
                             {"n_used", c.n_used},
                             {"accuracy", c.accuracy},
                             {"degraded", c.degraded}});
        rows.push_back({{"question_id", r.question_id}, {"donor_ref", r.donor_ref}, {"cells", cells}});
    }
    json skipped = json::array();
    for (const auto& s : report.skipped) skipped.push_back({{"question_id", s.question_id}, {"reason", s.reason}});
    return {{"fractions", report.fractions}, {"rows", rows}, {"skipped", skipped}};
}

}  // namespace cotpot::io
