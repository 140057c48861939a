#ifndef BDDGEN_PROVIDER_HPP
#define BDDGEN_PROVIDER_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bddgen/prompts.hpp"

namespace bddgen::llm {

struct GenerationParams {
    std::string model_id;
    double temperature = 0.2;
    double top_p = 1.0;
    int max_tokens = 1024;
    std::map<std::string, std::string> extra;  // provider-specific knobs

    /// Throws std::invalid_argument when outside the documented ranges:
    /// temperature in [0,2], top_p in (0,1], max_tokens >= 1.
    void validate() const;
};

struct ProviderResponse {
    std::string text;  // raw model output, no cleanup at this layer
    std::string model_id;
    std::int64_t latency_ms = 0;
    std::string request_digest;
};

class ProviderError : public std::runtime_error {
public:
    enum class Kind { Auth, RateLimited, Timeout, Upstream, ReplayMiss, FixtureWrite };

    ProviderError(Kind kind, const std::string& msg, int status = 0)
        : std::runtime_error(msg), kind_(kind), status_(status) {}

    Kind kind() const { return kind_; }
    int status() const { return status_; }

private:
    Kind kind_;
    int status_;
};

/// Stable content hash of (payload, params); the replay fixture key.
std::string request_digest(const prompts::PromptPayload& payload,
                           const GenerationParams& params);

/// If the first non-blank line opens a markdown code fence (``` with an
/// optional language tag) and a closing fence follows, returns the interior;
/// otherwise the input unchanged. Applied to a fixpoint, so idempotent.
std::string strip_fences(const std::string& text);

/// Exact-match store of digest -> recorded response text, persisted as a
/// flat JSON object.
class ReplayFixture {
public:
    ReplayFixture() = default;

    static ReplayFixture load(const std::filesystem::path& path);
    /// Missing file loads as an empty fixture (for first-time recording).
    static ReplayFixture load_or_empty(const std::filesystem::path& path);

    void save(const std::filesystem::path& path) const;

    std::optional<std::string> lookup(const std::string& digest) const;
    void insert(const std::string& digest, std::string text);
    size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::string, std::string> entries_;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual ProviderResponse generate(const prompts::PromptPayload& payload,
                                      const GenerationParams& params) = 0;
    virtual std::string name() const = 0;
};

/// Deterministic offline backend: a pure function of (payload, params,
/// fixture). Unknown digests raise ReplayMiss.
class ReplayProvider : public Provider {
public:
    ReplayProvider(std::string name, ReplayFixture fixture)
        : name_(std::move(name)), fixture_(std::move(fixture)) {}

    ProviderResponse generate(const prompts::PromptPayload& payload,
                              const GenerationParams& params) override;
    std::string name() const override { return name_; }

private:
    std::string name_;
    ReplayFixture fixture_;
};

/// One live provider entry from the providers config file.
struct ProviderConfig {
    std::string name;
    std::string base_url;                        // scheme://host[:port]
    std::string path = "/v1/chat/completions";   // chat-completions endpoint
    std::string auth_env;                        // env var holding the credential
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
    std::string model_id;
    GenerationParams default_params;
    int timeout_s = 60;
    int retry_base_ms = 250;  // exponential backoff base
};

/// Loads {"providers": [...]} from JSON; throws std::runtime_error on
/// malformed config or an unknown provider name.
std::vector<ProviderConfig> load_provider_configs(const std::filesystem::path& path);
ProviderConfig find_provider_config(const std::vector<ProviderConfig>& configs,
                                    std::string_view name);

/// Generic chat-completions HTTP backend: JSON body with messages,
/// temperature, top_p, max_tokens. Retries rate-limit and 5xx responses
/// with exponential backoff (3 attempts). Credentials come from the
/// environment and are scrubbed from every error message.
class HttpChatProvider : public Provider {
public:
    explicit HttpChatProvider(ProviderConfig config);

    ProviderResponse generate(const prompts::PromptPayload& payload,
                              const GenerationParams& params) override;
    std::string name() const override { return config_.name; }

private:
    ProviderConfig config_;
};

/// Live call through `provider`, persisted into the fixture file under the
/// request digest, then returned. Fixture writes are serialized.
ProviderResponse record(Provider& provider, const prompts::PromptPayload& payload,
                        const GenerationParams& params,
                        const std::filesystem::path& fixture_path);

}  // namespace bddgen::llm

#endif
