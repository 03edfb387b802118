#pragma once

// Completion providers: a uniform interface over an OpenAI-compatible HTTP
// server and the deterministic toy model.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "cotpot/core.hpp"
#include "cotpot/toy_lm.hpp"

namespace cotpot {

class TransportError : public Error {
public:
    using Error::Error;
};

class RequestError : public Error {
public:
    RequestError(int status, std::string body)
        : Error("request rejected with HTTP " + std::to_string(status) + ": " + body),
          status_(status),
          body_(std::move(body)) {}

    int status() const { return status_; }
    const std::string& body() const { return body_; }

private:
    int status_;
    std::string body_;
};

struct CompletionRequest {
    std::string prompt;
    std::string prefix;
    SamplingParams params;
    std::int64_t max_new_tokens = 1;

    /// max_new_tokens = params.max_total_tokens - tokens(prefix), floored at 1.
    static CompletionRequest for_prefix(std::string prompt, std::string prefix, const SamplingParams& params);
    /// Like for_prefix but additionally capped at `cap` new tokens.
    static CompletionRequest capped(std::string prompt, std::string prefix, const SamplingParams& params,
                                    std::int64_t cap);
};

enum class FinishReason { stop, length, error };

std::string_view to_string(FinishReason reason);
FinishReason parse_finish_reason(std::string_view name);

struct Completion {
    std::string text;
    std::int64_t token_count = 0;
    FinishReason finish_reason = FinishReason::stop;
    std::string provider_id;
};

class Provider {
public:
    virtual ~Provider() = default;

    virtual const std::string& id() const = 0;
    virtual std::string model() const = 0;
    /// Upper bound on concurrent complete() calls worth issuing.
    virtual std::size_t max_in_flight() const = 0;

    /// Thread-safe. Throws TransportError / RequestError on failure.
    Completion complete(const CompletionRequest& request, Seed seed);

    std::uint64_t calls() const { return calls_.load(); }

protected:
    virtual Completion do_complete(const CompletionRequest& request, Seed seed) = 0;

private:
    std::atomic<std::uint64_t> calls_{0};
};

/// Samples from a ToyLM. Output is a pure function of (request, seed).
/// Temperature and top-p are not applied: the fixture table is the sampling
/// distribution, which keeps it identical to what enumerate_paths reports.
class ToyProvider final : public Provider {
public:
    ToyProvider(std::string id, ToyLM model);

    const std::string& id() const override { return id_; }
    /// "toy-" plus a digest of the fixture, so cache keys differ across fixtures.
    std::string model() const override { return model_; }
    std::size_t max_in_flight() const override { return 1; }

    const ToyLM& toy() const { return toy_; }

protected:
    Completion do_complete(const CompletionRequest& request, Seed seed) override;

private:
    std::string id_;
    ToyLM toy_;
    std::string model_;
};

enum class ProviderKind { openai_http, toy };
enum class Endpoint { completions, chat };
/// Where a partial CoT goes in a chat request: as a partial assistant turn,
/// or inside an opened <think> block of the assistant turn.
enum class PrefillMode { assistant, think };

struct ProviderConfig {
    std::string id;
    ProviderKind kind = ProviderKind::toy;
    std::string base_url;
    std::string model;
    std::string api_key_env;
    std::size_t max_in_flight = 16;
    Endpoint endpoint = Endpoint::completions;
    PrefillMode prefill_mode = PrefillMode::assistant;
    std::filesystem::path fixture_path;
    double timeout_seconds = 600.0;
    int max_retries = 3;
    double retry_base_delay_seconds = 0.5;

    static ProviderConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
    static ProviderConfig load(const std::filesystem::path& path);
};

std::unique_ptr<Provider> make_provider(const ProviderConfig& config);

}  // namespace cotpot
