#include "cotpot/provider.hpp"

#include <cctype>
#include <fstream>
#include <random>

#include "cotpot/http_provider.hpp"
#include "cotpot/text.hpp"

namespace cotpot {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

CompletionRequest CompletionRequest::for_prefix(std::string prompt, std::string prefix, const SamplingParams& params) {
    CompletionRequest r;
    r.max_new_tokens = std::max<std::int64_t>(1, params.max_total_tokens - count_tokens(prefix));
    r.prompt = std::move(prompt);
    r.prefix = std::move(prefix);
    r.params = params;
    return r;
}

CompletionRequest CompletionRequest::capped(std::string prompt, std::string prefix, const SamplingParams& params,
                                            std::int64_t cap) {
    auto r = for_prefix(std::move(prompt), std::move(prefix), params);
    r.max_new_tokens = std::max<std::int64_t>(1, std::min(r.max_new_tokens, cap));
    return r;
}

std::string_view to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::stop: return "stop";
        case FinishReason::length: return "length";
        case FinishReason::error: return "error";
    }
    return "error";
}

FinishReason parse_finish_reason(std::string_view name) {
    if (name == "stop" || name == "eos" || name == "end_turn") return FinishReason::stop;
    if (name == "length" || name == "max_tokens") return FinishReason::length;
    return FinishReason::error;
}

Completion Provider::complete(const CompletionRequest& request, Seed seed) {
    ++calls_;
    return do_complete(request, seed);
}

ToyProvider::ToyProvider(std::string id, ToyLM model)
    : id_(std::move(id)), toy_(std::move(model)), model_("toy-" + to_hex(fnv1a64(toy_.to_json().dump()))) {}

Completion ToyProvider::do_complete(const CompletionRequest& request, Seed seed) {
    auto state = toy_.parse_prefix(request.prefix);
    if (!state) throw RequestError(422, "zero-probability prefix");

    Completion c;
    c.provider_id = id_;
    c.finish_reason = FinishReason::stop;
    if (state->emitted_answer) return c;

    std::uint64_t h = fnv1a64(request.prompt);
    h = fnv1a64(request.prefix, h ^ 0x5bd1e995ULL);
    std::mt19937_64 rng(splitmix64(h ^ splitmix64(seed)));

    const std::int64_t cap = request.max_new_tokens;
    std::vector<std::string> tokens;
    auto history = state->history;
    bool ended = state->ended;
    bool truncated = false;
    while (!toy_.is_terminal(history, ended)) {
        if (static_cast<std::int64_t>(tokens.size()) >= cap) {
            truncated = true;
            break;
        }
        const auto& row = toy_.next(history);
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double cumulative = 0.0;
        Symbol chosen = row.back().next;
        for (const auto& t : row) {
            if (t.probability <= 0.0) continue;
            cumulative += t.probability;
            chosen = t.next;
            if (u < cumulative) break;
        }
        if (chosen == kEndSymbol) {
            ended = true;
        } else {
            history.push_back(chosen);
            tokens.push_back(toy_.name(chosen));
        }
    }
    if (!truncated) {
        if (auto answer = toy_.answer(history)) {
            const auto& lead = toy_.answer_lead();
            std::vector<std::string> tail(lead.begin() + static_cast<std::ptrdiff_t>(state->lead_emitted), lead.end());
            tail.push_back("\\boxed{" + *answer + "}");
            for (auto& word : tail) {
                if (static_cast<std::int64_t>(tokens.size()) >= cap) {
                    truncated = true;
                    break;
                }
                tokens.push_back(std::move(word));
            }
        }
    }

    for (const auto& t : tokens) {
        if (!c.text.empty()) c.text.push_back(' ');
        c.text += t;
    }
    if (!c.text.empty() && !request.prefix.empty() &&
        !std::isspace(static_cast<unsigned char>(request.prefix.back())))
        c.text.insert(c.text.begin(), ' ');
    c.token_count = static_cast<std::int64_t>(tokens.size());
    c.finish_reason = truncated ? FinishReason::length : FinishReason::stop;
    return c;
}

ProviderConfig ProviderConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    ProviderConfig c;
    try {
        c.id = j.at("id").get<std::string>();
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "toy") {
            c.kind = ProviderKind::toy;
            std::filesystem::path fixture = j.at("fixture_path").get<std::string>();
            c.fixture_path = fixture.is_absolute() || base_dir.empty() ? fixture : base_dir / fixture;
            c.model = j.value("model", "toy");
        } else if (kind == "openai-http") {
            c.kind = ProviderKind::openai_http;
            c.base_url = j.at("base_url").get<std::string>();
            c.model = j.at("model").get<std::string>();
            c.api_key_env = j.value("api_key_env", "");
            c.max_in_flight = j.value("max_in_flight", std::size_t{16});
            const auto endpoint = j.value("endpoint", "completions");
            if (endpoint == "completions")
                c.endpoint = Endpoint::completions;
            else if (endpoint == "chat")
                c.endpoint = Endpoint::chat;
            else
                throw UsageError("unknown endpoint: " + endpoint);
            const auto prefill = j.value("prefill_mode", "assistant");
            if (prefill == "assistant")
                c.prefill_mode = PrefillMode::assistant;
            else if (prefill == "think")
                c.prefill_mode = PrefillMode::think;
            else
                throw UsageError("unknown prefill_mode: " + prefill);
            c.timeout_seconds = j.value("timeout_seconds", 600.0);
            c.max_retries = j.value("max_retries", 3);
            c.retry_base_delay_seconds = j.value("retry_base_delay_seconds", 0.5);
        } else {
            throw UsageError("unknown provider kind: " + kind);
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed provider config: ") + e.what());
    }
    if (c.id.empty()) throw UsageError("provider id must be non-empty");
    if (c.max_in_flight < 1) throw UsageError("max_in_flight must be >= 1");
    return c;
}

ProviderConfig ProviderConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open provider config: " + path.string());
    try {
        return from_json(nlohmann::json::parse(in), path.parent_path());
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("malformed provider config " + path.string() + ": " + e.what());
    }
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config) {
    switch (config.kind) {
        case ProviderKind::toy: return std::make_unique<ToyProvider>(config.id, ToyLM::load(config.fixture_path));
        case ProviderKind::openai_http: return std::make_unique<HttpProvider>(config);
    }
    throw UsageError("unsupported provider kind");
}

}  // namespace cotpot
