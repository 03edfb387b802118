#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cotpot/cli.hpp"
#include "cotpot/grading.hpp"
#include "cotpot/io.hpp"
#include "cotpot/metrics.hpp"
#include "cotpot/oracle.hpp"
#include "cotpot/shapes.hpp"
#include "cotpot/text.hpp"

namespace py = pybind11;
using namespace cotpot;

namespace {

ToyLM parse_toy(const std::string& fixture_json) { return ToyLM::from_json(nlohmann::json::parse(fixture_json)); }

Question question_for(const std::string& gold, const std::string& kind) {
    Question q;
    q.id = "q";
    q.prompt = "";
    q.gold_answer = gold;
    q.kind = parse_answer_kind(kind);
    return q;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of cotpot. JSON documents cross this boundary as strings.";

    auto& error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<DegradedBatchError>(m, "DegradedBatchError", error.ptr());

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line with `args`; returns (exit_code, stdout, stderr).");

    m.def("count_tokens", [](const std::string& text) { return count_tokens(text); }, py::arg("text"));

    m.def(
        "grade_text",
        [](const std::string& text, const std::string& gold, const std::string& kind) {
            const auto r = grade_text(text, gold, parse_answer_kind(kind));
            py::dict d;
            d["extracted"] = r.extracted ? py::cast(*r.extracted) : py::none();
            d["correct"] = r.correct;
            d["method"] = std::string(to_string(r.method));
            return d;
        },
        py::arg("text"), py::arg("gold"), py::arg("kind") = "integer");

    m.def(
        "estimate_budget",
        [](std::int64_t n_samples, std::int64_t n_chunks, std::int64_t tokens) {
            return estimate_budget(n_samples, n_chunks, tokens).total_tokens;
        },
        py::arg("n_samples"), py::arg("n_chunks"), py::arg("tokens"));

    m.def("pass_at_k", &pass_at_k, py::arg("outcomes"), py::arg("k"));
    m.def("corrected_pass_at_k", &corrected_pass_at_k, py::arg("outcomes"), py::arg("late_spike_flags"), py::arg("k"));

    m.def(
        "classify",
        [](const std::vector<double>& estimates, const std::string& thresholds_json) {
            PotentialCurve curve;
            curve.question_id = "q";
            for (std::size_t i = 0; i < estimates.size(); ++i)
                curve.points.push_back(
                    {static_cast<double>(i + 1) / static_cast<double>(estimates.size()), estimates[i], 0});
            const auto thresholds =
                thresholds_json.empty() ? ShapeThresholds{} : io::thresholds_from_json(nlohmann::json::parse(thresholds_json));
            const auto r = classify(curve, thresholds);
            py::dict d;
            d["insight"] = r.insight;
            d["tangent"] = r.tangent;
            d["late_spike"] = r.late_spike;
            d["monotone"] = r.monotone;
            return d;
        },
        py::arg("estimates"), py::arg("thresholds_json") = "");

    m.def(
        "random_fixture", [](Seed seed) { return ToyLM::random(seed).to_json().dump(2); }, py::arg("seed"));

    m.def(
        "exact_potential",
        [](const std::string& fixture_json, const std::string& gold, const std::string& prefix,
           const std::string& kind) { return exact_potential(parse_toy(fixture_json), question_for(gold, kind), prefix); },
        py::arg("fixture_json"), py::arg("gold"), py::arg("prefix") = "", py::arg("kind") = "integer");

    m.def(
        "check_martingale",
        [](const std::string& fixture_json, const std::string& gold) {
            const auto r = check_martingale(parse_toy(fixture_json), question_for(gold, "integer"));
            py::list steps;
            for (const auto& s : r.steps) steps.append(py::make_tuple(s.expected_now, s.expected_next));
            py::dict d;
            d["holds"] = r.holds;
            d["correct_probability"] = r.correct_probability;
            d["steps"] = steps;
            return d;
        },
        py::arg("fixture_json"), py::arg("gold"));

    m.def(
        "potential_curve",
        [](const std::string& fixture_json, const std::string& gold, const std::string& trace_text, int n_chunks,
           std::int64_t n_samples, Seed seed) {
            ToyProvider provider("toy", parse_toy(fixture_json));
            RolloutCache cache;
            Sampler sampler(provider, cache);
            const auto q = question_for(gold, "integer");
            Trace trace;
            trace.question_id = q.id;
            trace.text = trace_text;
            trace.token_count = count_tokens(trace_text);
            SamplingParams params;
            params.n_samples = n_samples;
            params.seed = seed;
            std::vector<std::pair<double, double>> points;
            {
                py::gil_scoped_release release;
                for (const auto& p : estimate_potential(sampler, q, trace, {n_chunks, true}, params).points)
                    points.emplace_back(p.prefix_fraction, p.estimate);
            }
            return points;
        },
        py::arg("fixture_json"), py::arg("gold"), py::arg("trace_text"), py::arg("n_chunks"),
        py::arg("n_samples") = 128, py::arg("seed") = 0);
}
