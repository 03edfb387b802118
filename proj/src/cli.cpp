#include "cotpot/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "cotpot/io.hpp"
#include "cotpot/metrics.hpp"
#include "cotpot/optimizer.hpp"
#include "cotpot/oracle.hpp"
#include "cotpot/provider.hpp"
#include "cotpot/sampler.hpp"
#include "cotpot/shapes.hpp"
#include "cotpot/text.hpp"
#include "cotpot/transfer.hpp"

namespace cotpot::cli {

namespace {

namespace fs = std::filesystem;

std::string with_commas(std::int64_t v) {
    std::string digits = std::to_string(v < 0 ? -v : v);
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
        out.push_back(digits[i]);
    }
    return v < 0 ? "-" + out : out;
}

std::string percent(std::uint64_t part, std::uint64_t whole) {
    if (whole == 0) return "0%";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * static_cast<double>(part) / static_cast<double>(whole));
    std::string s = buf;
    if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
    return s + "%";
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            if constexpr (std::is_floating_point_v<T>)
                out.push_back(static_cast<T>(std::stod(item, &used)));
            else
                out.push_back(static_cast<T>(std::stoull(item, &used)));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad ") + what + " list entry '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
    return out;
}

struct ProviderOptions {
    std::string provider;
    std::string fixture;
    std::string model;

    void add(CLI::App* cmd) {
        cmd->add_option("--provider", provider, "provider config JSON, or 'toy' with --fixture")->required();
        cmd->add_option("--fixture", fixture, "toy fixture JSON (with --provider toy)");
        cmd->add_option("--model", model, "override the model named in the provider config");
    }

    ProviderConfig config() const {
        ProviderConfig c;
        if (provider == "toy") {
            if (fixture.empty()) throw UsageError("--provider toy needs --fixture");
            c.id = "toy";
            c.kind = ProviderKind::toy;
            c.fixture_path = fixture;
        } else {
            c = ProviderConfig::load(provider);
        }
        if (!model.empty()) c.model = model;
        return c;
    }
};

struct SamplingOptions {
    SamplingParams params;

    void add(CLI::App* cmd, const char* n_help = "rollouts per prefix (N)") {
        cmd->add_option("--n-samples", params.n_samples, n_help)->capture_default_str();
        cmd->add_option("--temperature", params.temperature)->capture_default_str();
        cmd->add_option("--top-p", params.top_p)->capture_default_str();
        cmd->add_option("--max-tokens", params.max_total_tokens, "total token budget per run (T)")
            ->capture_default_str();
        cmd->add_option("--seed", params.seed, "base seed")->capture_default_str();
    }
};

struct CacheOptions {
    std::string cache_dir = ".cotpot-cache";
    void add(CLI::App* cmd) {
        cmd->add_option("--cache-dir", cache_dir, "rollout cache directory")->capture_default_str();
    }
};

// Provider, cache and sampler for one command.
class Campaign {
public:
    Campaign(const ProviderOptions& p, const CacheOptions& c)
        : provider_(make_provider(p.config())),
          cache_(std::make_unique<RolloutCache>(fs::path(c.cache_dir))),
          sampler_(*provider_, *cache_) {}

    Sampler& sampler() { return sampler_; }
    Provider& provider() { return *provider_; }

    void log(std::ostream& err) const {
        const auto s = sampler_.stats();
        err << "cache hits: " << percent(s.cache_hits, s.requests) << " (" << s.cache_hits << "/" << s.requests
            << ")\n";
        err << "provider calls: " << s.provider_calls << "\n";
        if (s.failures > 0) err << "failed requests: " << s.failures << "\n";
        err << "generated tokens: " << with_commas(static_cast<std::int64_t>(s.generated_tokens)) << "\n";
    }

private:
    std::unique_ptr<Provider> provider_;
    std::unique_ptr<RolloutCache> cache_;
    Sampler sampler_;
};

std::vector<Question> select_questions(const std::string& dataset, const std::string& question_id) {
    auto all = io::read_dataset(dataset);
    if (question_id.empty()) return all;
    return {io::find_question(all, question_id)};
}

// Trace j of a question is plain rollout j, so it shares the empty-prefix cache keys.
std::vector<Trace> obtain_traces(Sampler& sampler, const std::vector<Question>& questions,
                                 const std::string& trace_file, int n_traces, const SamplingParams& params,
                                 std::ostream& err) {
    std::vector<Trace> out;
    if (!trace_file.empty()) {
        const auto all = io::read_traces(trace_file);
        for (const auto& q : questions) {
            bool found = false;
            for (const auto& t : all) {
                if (t.question_id != q.id) continue;
                out.push_back(t);
                found = true;
            }
            if (!found) err << "warning: no trace for question " << q.id << " in " << trace_file << "\n";
        }
        return out;
    }
    for (const auto& q : questions)
        for (int j = 0; j < n_traces; ++j)
            out.push_back(sample_trace(sampler, q, params, params.seed + static_cast<Seed>(j)));
    return out;
}

const Question& question_for(const std::vector<Question>& questions, const Trace& t) {
    return io::find_question(questions, t.question_id);
}

// ---- curve / stability ----------------------------------------------------

struct CurveCommand {
    std::string dataset;
    std::string question_id;
    std::string trace_file;
    int n_chunks = 20;
    int n_traces = 1;
    bool drop_empty = false;
    std::string out_prefix = "curves";
    ProviderOptions provider;
    SamplingOptions sampling;
    CacheOptions cache;

    void add(CLI::App* cmd) {
        cmd->add_option("--dataset", dataset, "dataset JSONL")->required();
        cmd->add_option("--question-id", question_id, "only this question");
        cmd->add_option("--trace-file", trace_file, "ingest traces from JSONL instead of sampling them");
        cmd->add_option("--n-chunks", n_chunks)->capture_default_str();
        cmd->add_option("--n-traces", n_traces, "traces sampled per question")->capture_default_str();
        cmd->add_flag("--drop-empty", drop_empty, "omit the empty-prefix point");
        cmd->add_option("--out", out_prefix, "output prefix for .csv/.jsonl")->capture_default_str();
        provider.add(cmd);
        sampling.add(cmd);
        cache.add(cmd);
    }
};

int run_curves(const CurveCommand& c, bool stability, std::ostream& out, std::ostream& err) {
    if (c.n_chunks < 1) throw UsageError("--n-chunks must be >= 1");
    if (c.n_traces < 1) throw UsageError("--n-traces must be >= 1");
    c.sampling.params.validate();
    const auto questions = select_questions(c.dataset, c.question_id);
    Campaign campaign(c.provider, c.cache);
    const auto budget = estimate_budget(c.sampling.params.n_samples, c.n_chunks, c.sampling.params.max_total_tokens);
    err << "budget: " << with_commas(budget.total_tokens) << " tokens per curve (N=" << budget.n_samples
        << ", n_chunks=" << budget.n_chunks << ", T=" << budget.per_run_tokens << ")\n";

    const auto traces =
        obtain_traces(campaign.sampler(), questions, c.trace_file, c.n_traces, c.sampling.params, err);
    if (traces.empty()) throw UsageError("no traces to evaluate");
    const CurveOptions options{c.n_chunks, !c.drop_empty};

    std::vector<nlohmann::json> rows;
    std::vector<PotentialCurve> curves;
    bool degraded = false;
    for (const auto& t : traces) {
        const auto& q = question_for(questions, t);
        if (stability) {
            if (!t.extracted_answer) {
                err << "warning: trace " << t.ref() << " has no answer; unstable target skipped\n";
                continue;
            }
            auto s = estimate_stability(campaign.sampler(), q, t, options, c.sampling.params);
            degraded = degraded || s.curve.degraded();
            rows.push_back(io::to_json(s));
            curves.push_back(std::move(s.curve));
        } else {
            auto curve = estimate_potential(campaign.sampler(), q, t, options, c.sampling.params);
            degraded = degraded || curve.degraded();
            rows.push_back(io::to_json(curve));
            curves.push_back(std::move(curve));
        }
    }
    if (curves.empty()) throw UsageError("no curves produced");

    io::write_file(c.out_prefix + ".jsonl", io::to_jsonl(rows));
    io::write_file(c.out_prefix + ".csv", io::curves_csv(curves));
    if (c.trace_file.empty()) {
        std::vector<nlohmann::json> trace_rows;
        for (const auto& t : traces) trace_rows.push_back(io::to_json(t));
        io::write_file(c.out_prefix + ".traces.jsonl", io::to_jsonl(trace_rows));
    }
    out << "wrote " << curves.size() << (stability ? " stability" : " potential") << " curve(s) to " << c.out_prefix
        << ".{csv,jsonl}\n";
    campaign.log(err);
    if (degraded) {
        err << "warning: some points came from degraded batches\n";
        return kExitDegraded;
    }
    return kExitOk;
}

// ---- shapes ---------------------------------------------------------------

struct ShapesCommand {
    std::vector<std::string> curve_files;
    std::string thresholds_file;
    double late_spike_threshold = -1.0;
    bool correct_only = true;
    bool keep_saturated = false;
    std::string label = "model";
    std::string out_prefix = "shapes";

    void add(CLI::App* cmd) {
        cmd->add_option("--curves", curve_files, "curve files (.jsonl or .csv)")->required();
        cmd->add_option("--thresholds-file", thresholds_file, "JSON object overriding shape thresholds");
        cmd->add_option("--late-spike-threshold", late_spike_threshold, "override the late-spike level");
        cmd->add_flag("--correct-only,!--include-wrong", correct_only,
                      "classify only curves of correct traces (default on)");
        cmd->add_flag("--keep-saturated", keep_saturated,
                      "keep questions whose empty-prefix potential is 0 or 1");
        cmd->add_option("--label", label, "model label for the summary row")->capture_default_str();
        cmd->add_option("--out", out_prefix, "output prefix for .jsonl/.csv/.md")->capture_default_str();
    }
};

int run_shapes(const ShapesCommand& c, std::ostream& out, std::ostream& err) {
    ShapeThresholds thresholds;
    if (!c.thresholds_file.empty())
        thresholds = io::thresholds_from_json(nlohmann::json::parse(io::read_file(c.thresholds_file), nullptr, false));
    if (c.late_spike_threshold >= 0.0) thresholds.late_spike_level = c.late_spike_threshold;
    thresholds.validate();

    std::vector<ClassifiedCurve> classified;
    std::vector<nlohmann::json> rows;
    for (const auto& file : c.curve_files) {
        for (const auto& curve : io::read_curves(file)) {
            const auto input = split_baseline(curve);
            if (input.curve.points.size() != static_cast<std::size_t>(thresholds.n_chunks))
                err << "warning: curve " << curve.question_id << " has " << input.curve.points.size()
                    << " points; thresholds assume " << thresholds.n_chunks << "\n";
            ClassifiedCurve cc{curve.question_id, curve.trace_ref, classify(input.curve, thresholds),
                               curve.trace_correct, input.baseline};
            rows.push_back(io::to_json(cc));
            classified.push_back(std::move(cc));
        }
    }
    const AggregateFilter filter{c.correct_only, !c.keep_saturated};
    const auto row = aggregate(classified, filter, c.label);
    io::write_file(c.out_prefix + ".jsonl", io::to_jsonl(rows));
    io::write_file(c.out_prefix + ".csv", summary_csv({row}));
    io::write_file(c.out_prefix + ".md", summary_markdown({row}));
    out << summary_markdown({row});
    err << "classified " << classified.size() << " curve(s); " << row.n_traces << " qualify\n";
    return kExitOk;
}

// ---- passk ----------------------------------------------------------------

struct PassKCommand {
    std::string pool_file;
    std::string dataset;
    std::string question_id;
    std::string k_list = "1,2,4,8";
    bool flag_late_spikes = false;
    int n_chunks = 20;
    std::int64_t curve_samples = 128;
    std::string out_prefix = "passk";
    ProviderOptions provider;
    SamplingOptions sampling;
    CacheOptions cache;

    void add(CLI::App* cmd) {
        cmd->add_option("--pool", pool_file, "outcome pool JSONL (skips sampling)");
        cmd->add_option("--dataset", dataset, "dataset JSONL to sample a pool from");
        cmd->add_option("--question-id", question_id, "only this question");
        cmd->add_option("--k", k_list, "comma-separated k values")->capture_default_str();
        cmd->add_flag("--flag-late-spikes", flag_late_spikes,
                      "compute a potential curve per correct sample and flag late spikes");
        cmd->add_option("--n-chunks", n_chunks, "chunks per flagging curve")->capture_default_str();
        cmd->add_option("--curve-samples", curve_samples, "rollouts per flagging-curve point")
            ->capture_default_str();
        cmd->add_option("--out", out_prefix, "output prefix for .csv/.json")->capture_default_str();
        cmd->add_option("--provider", provider.provider, "provider config JSON, or 'toy' with --fixture");
        cmd->add_option("--fixture", provider.fixture, "toy fixture JSON (with --provider toy)");
        cmd->add_option("--model", provider.model, "override the model named in the provider config");
        sampling.add(cmd, "samples per question in a generated pool");
        cache.add(cmd);
    }
};

int run_passk(const PassKCommand& c, std::ostream& out, std::ostream& err) {
    auto ks = parse_list<std::size_t>(c.k_list, "k");
    io::OutcomePoolFile pool;
    std::unique_ptr<Campaign> campaign;
    bool degraded = false;
    if (!c.pool_file.empty()) {
        pool = io::read_pool(c.pool_file);
    } else {
        if (c.dataset.empty() || c.provider.provider.empty())
            throw UsageError("passk needs --pool, or --dataset with --provider");
        c.sampling.params.validate();
        const auto questions = select_questions(c.dataset, c.question_id);
        campaign = std::make_unique<Campaign>(c.provider, c.cache);
        SamplingParams curve_params = c.sampling.params;
        curve_params.n_samples = c.curve_samples;
        const ShapeThresholds thresholds;
        for (const auto& q : questions) {
            RolloutBatch batch;
            try {
                batch = campaign->sampler().run_rollouts(q, "", c.sampling.params);
            } catch (const DegradedBatchError& e) {
                batch = e.partial();
                degraded = true;
            }
            std::vector<bool> outcomes, flags;
            for (const auto& r : batch.completions) {
                if (r.failed) continue;
                outcomes.push_back(r.correct);
                bool flag = false;
                if (c.flag_late_spikes && r.correct) {
                    Trace t;
                    t.question_id = q.id;
                    t.text = r.completion.text;
                    t.token_count = r.completion.token_count;
                    t.extracted_answer = r.extracted;
                    t.correct = r.correct;
                    t.provider_id = r.completion.provider_id;
                    t.seed_used = r.seed;
                    if (count_tokens(t.text) < c.n_chunks) {
                        err << "warning: sample " << t.ref() << " is shorter than " << c.n_chunks
                            << " tokens; left unflagged\n";
                    } else {
                        const auto curve =
                            estimate_potential(campaign->sampler(), q, t, {c.n_chunks, false}, curve_params);
                        degraded = degraded || curve.degraded();
                        flag = classify(curve, thresholds).late_spike;
                    }
                }
                flags.push_back(flag);
            }
            pool.question_ids.push_back(q.id);
            pool.outcomes.push_back(std::move(outcomes));
            pool.late_spike_flags.push_back(std::move(flags));
        }
        io::write_file(c.out_prefix + ".pool.jsonl", io::pool_jsonl(pool));
        const auto k_max = ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());
        for (std::size_t i = 0; degraded && i < pool.outcomes.size(); ++i) {
            if (pool.outcomes[i].size() >= k_max) continue;
            err << "error: degraded pool: question " << pool.question_ids[i] << " kept " << pool.outcomes[i].size()
                << " of " << c.sampling.params.n_samples << " samples\n";
            campaign->log(err);
            return kExitDegraded;
        }
    }
    const auto report = pass_at_k_report(pool.question_ids, pool.outcomes, pool.late_spike_flags, ks);
    io::write_file(c.out_prefix + ".csv", io::passk_csv(report));
    io::write_file(c.out_prefix + ".json", io::to_json(report).dump(2) + "\n");
    out << io::passk_csv(report);
    if (!report.flagged_questions.empty())
        err << "questions credited only through flagged samples: " << report.flagged_questions.size() << "\n";
    if (campaign) campaign->log(err);
    return degraded ? kExitDegraded : kExitOk;
}

// ---- optimize -------------------------------------------------------------

struct OptimizeCommand {
    std::string dataset;
    std::string question_id;
    OptimizerConfig config;
    std::string out_path = "optimized.jsonl";
    ProviderOptions provider;
    SamplingOptions sampling;
    CacheOptions cache;

    void add(CLI::App* cmd) {
        cmd->add_option("--dataset", dataset, "dataset JSONL")->required();
        cmd->add_option("--question-id", question_id, "only this question");
        cmd->add_option("--m", config.n_candidates, "candidate chunks per step (M)")->capture_default_str();
        cmd->add_option("--chunk-tokens", config.chunk_tokens, "tokens per candidate chunk (C)")
            ->capture_default_str();
        cmd->add_option("--n-eval", config.n_eval, "rollouts per candidate score")->capture_default_str();
        cmd->add_option("--max-steps", config.max_steps)->capture_default_str();
        cmd->add_option("--out", out_path, "OptimizerTrace JSONL")->capture_default_str();
        provider.add(cmd);
        sampling.add(cmd, "unused; scoring uses --n-eval");
        cache.add(cmd);
    }
};

int run_optimize(OptimizeCommand c, std::ostream& out, std::ostream& err) {
    c.config.seed = c.sampling.params.seed;
    c.config.validate();
    c.sampling.params.validate();
    const auto questions = select_questions(c.dataset, c.question_id);
    Campaign campaign(c.provider, c.cache);
    const std::int64_t steps = std::max<std::int64_t>(
        1, (c.sampling.params.max_total_tokens + c.config.chunk_tokens - 1) / c.config.chunk_tokens);
    const auto budget = estimate_optimizer_budget(c.config.n_candidates, c.config.n_eval, steps,
                                                  c.sampling.params.max_total_tokens);
    err << "budget: " << with_commas(budget.total_tokens) << " tokens per question (M=" << c.config.n_candidates
        << ", n_eval=" << c.config.n_eval << ", n_chunks=" << steps << ", T=" << budget.per_run_tokens << ")\n";

    std::vector<nlohmann::json> rows;
    std::size_t unterminated = 0;
    for (const auto& q : questions) {
        const auto trace = optimize_cot(campaign.sampler(), q, c.config, c.sampling.params);
        if (trace.status == OptimizerStatus::unterminated) ++unterminated;
        rows.push_back(to_json(trace));
        out << q.id << "\t" << to_string(trace.status) << "\tsteps=" << trace.steps.size()
            << "\tpotential=" << io::format_double(trace.final_potential) << "\tcorrect=" << trace.correct << "\n";
    }
    io::write_file(c.out_path, io::to_jsonl(rows));
    if (unterminated > 0) err << "warning: " << unterminated << " question(s) unterminated after max steps\n";
    campaign.log(err);
    return kExitOk;
}

// ---- transfer -------------------------------------------------------------

struct TransferCommand {
    std::string dataset;
    std::string donor_traces;
    std::string donor_curves;
    std::string fractions = "0,0.2,0.4,0.6,0.8,1";
    std::string out_prefix = "transfer";
    ProviderOptions provider;
    SamplingOptions sampling;
    CacheOptions cache;

    void add(CLI::App* cmd) {
        cmd->add_option("--dataset", dataset, "dataset JSONL")->required();
        cmd->add_option("--donor-traces", donor_traces, "donor Trace JSONL")->required();
        cmd->add_option("--donor-curves", donor_curves, "donor curves JSONL used to pick the best donor trace");
        cmd->add_option("--fractions", fractions, "comma-separated CoT fractions")->capture_default_str();
        cmd->add_option("--out", out_prefix, "output prefix for .csv/.json")->capture_default_str();
        provider.add(cmd);
        sampling.add(cmd, "recipient rollouts per (question, fraction)");
        cache.add(cmd);
    }
};

int run_transfer_command(const TransferCommand& c, std::ostream& out, std::ostream& err) {
    TransferConfig config;
    config.fractions = parse_list<double>(c.fractions, "fraction");
    config.validate();
    c.sampling.params.validate();
    const auto questions = io::read_dataset(c.dataset);
    const auto donors = io::read_traces(c.donor_traces);
    std::vector<PotentialCurve> curves;
    if (!c.donor_curves.empty()) curves = io::read_curves(c.donor_curves);
    Campaign campaign(c.provider, c.cache);
    const auto report = run_transfer(campaign.sampler(), questions, donors, config, c.sampling.params, curves);
    for (const auto& s : report.skipped) err << "warning: skipped question " << s.question_id << ": " << s.reason << "\n";
    io::write_file(c.out_prefix + ".csv", io::transfer_csv(report));
    io::write_file(c.out_prefix + ".json", io::to_json(report).dump(2) + "\n");
    out << io::transfer_csv(report);
    campaign.log(err);
    return report.degraded() ? kExitDegraded : kExitOk;
}

// ---- budget / gen-fixture -------------------------------------------------

struct BudgetCommand {
    std::int64_t n_samples = 128;
    std::int64_t n_chunks = 20;
    std::int64_t tokens = 32768;
    std::int64_t candidates = 0;
};

int run_budget(const BudgetCommand& c, std::ostream& out, std::ostream& err) {
    const auto b = c.candidates > 0 ? estimate_optimizer_budget(c.candidates, c.n_samples, c.n_chunks, c.tokens)
                                    : estimate_budget(c.n_samples, c.n_chunks, c.tokens);
    out << b.total_tokens << "\n";
    err << "approximation N*n_chunks*T/2 = " << io::format_double(b.approximate_total()) << "\n";
    return kExitOk;
}

struct FixtureCommand {
    Seed seed = 0;
    std::string out_path;
};

int run_gen_fixture(const FixtureCommand& c, std::ostream& out) {
    const auto text = ToyLM::random(c.seed).to_json().dump(2) + "\n";
    if (c.out_path.empty())
        out << text;
    else
        io::write_file(c.out_path, text);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Potential-curve analysis of chain-of-thought traces", "cotpot"};
    app.set_config("--config", "", "global config file (TOML/INI); command-line flags override it");
    app.require_subcommand(1);

    CurveCommand curve;
    auto* curve_cmd = app.add_subcommand("curve", "sample or ingest traces and estimate potential curves");
    curve.add(curve_cmd);

    CurveCommand stability;
    stability.out_prefix = "stability";
    auto* stability_cmd = app.add_subcommand("stability", "stability curves graded against each trace's own answer");
    stability.add(stability_cmd);

    ShapesCommand shapes;
    auto* shapes_cmd = app.add_subcommand("shapes", "classify curves and summarize shape statistics");
    shapes.add(shapes_cmd);

    PassKCommand passk;
    auto* passk_cmd = app.add_subcommand("passk", "raw and late-spike-corrected pass@k");
    passk.add(passk_cmd);

    OptimizeCommand optimize;
    auto* optimize_cmd = app.add_subcommand("optimize", "greedy potential-optimized chain of thought");
    optimize.add(optimize_cmd);

    TransferCommand transfer;
    auto* transfer_cmd = app.add_subcommand("transfer", "recipient accuracy on donor CoT prefixes");
    transfer.add(transfer_cmd);

    BudgetCommand budget;
    auto* budget_cmd = app.add_subcommand("budget", "generated-token budget of a curve campaign");
    budget_cmd->add_option("--n-samples", budget.n_samples)->capture_default_str();
    budget_cmd->add_option("--n-chunks", budget.n_chunks)->capture_default_str();
    budget_cmd->add_option("--tokens", budget.tokens, "per-run token budget (T)")->capture_default_str();
    budget_cmd->add_option("--candidates", budget.candidates, "optimizer candidates per step (M); 0 for curves");
    std::string unused_cache;
    Seed unused_seed = 0;
    budget_cmd->add_option("--seed", unused_seed, "accepted for uniformity");
    budget_cmd->add_option("--cache-dir", unused_cache, "accepted for uniformity");

    FixtureCommand fixture;
    auto* fixture_cmd = app.add_subcommand("gen-fixture", "emit a random valid toy-model fixture");
    fixture_cmd->add_option("--seed", fixture.seed)->capture_default_str();
    fixture_cmd->add_option("--out", fixture.out_path, "output file (stdout when omitted)");
    fixture_cmd->add_option("--cache-dir", unused_cache, "accepted for uniformity");

    std::vector<const char*> argv{"cotpot"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (curve_cmd->parsed()) return run_curves(curve, false, out, err);
        if (stability_cmd->parsed()) return run_curves(stability, true, out, err);
        if (shapes_cmd->parsed()) return run_shapes(shapes, out, err);
        if (passk_cmd->parsed()) return run_passk(passk, out, err);
        if (optimize_cmd->parsed()) return run_optimize(optimize, out, err);
        if (transfer_cmd->parsed()) return run_transfer_command(transfer, out, err);
        if (budget_cmd->parsed()) return run_budget(budget, out, err);
        if (fixture_cmd->parsed()) return run_gen_fixture(fixture, out);
    } catch (const DegradedBatchError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDegraded;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace cotpot::cli
