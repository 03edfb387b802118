#pragma once

#include <condition_variable>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "cotpot/provider.hpp"

namespace cotpot {

/// OpenAI-compatible client for POST /v1/completions and /v1/chat/completions.
///
/// Transport failures and HTTP 429/5xx are retried with exponential backoff
/// (base, 2*base, 4*base; base defaults to 0.5 s). Other 4xx responses fail
/// immediately with RequestError. At most max_in_flight requests are open at once.
class HttpProvider final : public Provider {
public:
    explicit HttpProvider(ProviderConfig config);

    const std::string& id() const override { return config_.id; }
    std::string model() const override { return config_.model; }
    std::size_t max_in_flight() const override { return config_.max_in_flight; }

    /// Body sent for `request`; exposed for conformance tests.
    nlohmann::json request_body(const CompletionRequest& request, Seed seed) const;
    std::string request_path() const;

protected:
    Completion do_complete(const CompletionRequest& request, Seed seed) override;

private:
    Completion parse_response(const std::string& body, const CompletionRequest& request) const;

    ProviderConfig config_;
    std::string host_;         // scheme://host[:port]
    std::string path_prefix_;  // path component of base_url, without trailing slash
    std::string api_key_;

    std::mutex slots_mutex_;
    std::condition_variable slots_cv_;
    std::size_t in_flight_ = 0;
};

}  // namespace cotpot
