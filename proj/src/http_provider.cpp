#include "cotpot/http_provider.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "cotpot/text.hpp"

namespace cotpot {

namespace {

class SlotGuard {
public:
    SlotGuard(std::mutex& m, std::condition_variable& cv, std::size_t& in_flight, std::size_t cap)
        : m_(m), cv_(cv), in_flight_(in_flight) {
        std::unique_lock lock(m_);
        cv_.wait(lock, [&] { return in_flight_ < cap; });
        ++in_flight_;
    }
    ~SlotGuard() {
        {
            std::lock_guard lock(m_);
            --in_flight_;
        }
        cv_.notify_one();
    }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

private:
    std::mutex& m_;
    std::condition_variable& cv_;
    std::size_t& in_flight_;
};

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpProvider::HttpProvider(ProviderConfig config) : config_(std::move(config)) {
    const auto& url = config_.base_url;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw UsageError("base_url needs a scheme: " + url);
    const auto path_begin = url.find('/', scheme_end + 3);
    host_ = url.substr(0, path_begin);
    path_prefix_ = path_begin == std::string::npos ? "" : url.substr(path_begin);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();

    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr) throw UsageError("environment variable " + config_.api_key_env + " is not set");
        api_key_ = key;
    }
}

std::string HttpProvider::request_path() const {
    return path_prefix_ + (config_.endpoint == Endpoint::chat ? "/v1/chat/completions" : "/v1/completions");
}

nlohmann::json HttpProvider::request_body(const CompletionRequest& request, Seed seed) const {
    std::string prefill = request.prefix;
    if (config_.prefill_mode == PrefillMode::think) prefill = "<think>\n" + prefill;

    nlohmann::json body;
    body["model"] = config_.model;
    if (config_.endpoint == Endpoint::chat) {
        auto messages = nlohmann::json::array();
        messages.push_back({{"role", "user"}, {"content", request.prompt}});
        if (!prefill.empty()) {
            messages.push_back({{"role", "assistant"}, {"content", prefill}});
            // vLLM extensions for continuing a partial assistant turn.
            body["continue_final_message"] = true;
            body["add_generation_prompt"] = false;
        }
        body["messages"] = std::move(messages);
    } else {
        body["prompt"] = request.prompt + prefill;
    }
    body["temperature"] = request.params.temperature;
    body["top_p"] = request.params.top_p;
    body["max_tokens"] = request.max_new_tokens;
    body["n"] = 1;
    body["seed"] = seed;
    return body;
}

Completion HttpProvider::parse_response(const std::string& body, const CompletionRequest& request) const {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw TransportError(std::string("unparsable response body: ") + e.what());
    }
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
        throw TransportError("response has no choices: " + body.substr(0, 200));
    const auto& choice = j["choices"][0];

    Completion c;
    c.provider_id = config_.id;
    if (choice.contains("message") && choice["message"].contains("content") && choice["message"]["content"].is_string())
        c.text = choice["message"]["content"].get<std::string>();
    else if (choice.contains("text") && choice["text"].is_string())
        c.text = choice["text"].get<std::string>();
    c.finish_reason = choice.contains("finish_reason") && choice["finish_reason"].is_string()
                          ? parse_finish_reason(choice["finish_reason"].get<std::string>())
                          : FinishReason::stop;
    if (j.contains("usage") && j["usage"].contains("completion_tokens"))
        c.token_count = j["usage"]["completion_tokens"].get<std::int64_t>();
    else
        c.token_count = c.finish_reason == FinishReason::length ? request.max_new_tokens : count_tokens(c.text);
    return c;
}

Completion HttpProvider::do_complete(const CompletionRequest& request, Seed seed) {
    SlotGuard slot(slots_mutex_, slots_cv_, in_flight_, config_.max_in_flight);

    const std::string payload = request_body(request, seed).dump();
    const std::string path = request_path();
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            const double delay = config_.retry_base_delay_seconds * static_cast<double>(1 << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        httplib::Client client(host_);
        const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::duration<double>(config_.timeout_seconds));
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);

        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) return parse_response(res->body, request);
        if (!retryable_status(res->status)) throw RequestError(res->status, res->body);
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
    }
    throw TransportError(config_.id + ": giving up after " + std::to_string(config_.max_retries + 1) +
                         " attempts (" + last_error + ")");
}

}  // namespace cotpot
