#include "bddgen/provider.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bddgen/util.hpp"

namespace bddgen::llm {

using nlohmann::json;

void GenerationParams::validate() const {
    if (!(temperature >= 0.0 && temperature <= 2.0)) {
        throw std::invalid_argument("temperature must be in [0, 2], got " +
                                    util::format_double(temperature));
    }
    if (!(top_p > 0.0 && top_p <= 1.0)) {
        throw std::invalid_argument("top_p must be in (0, 1], got " +
                                    util::format_double(top_p));
    }
    if (max_tokens < 1) {
        throw std::invalid_argument("max_tokens must be positive, got " +
                                    std::to_string(max_tokens));
    }
}

std::string request_digest(const prompts::PromptPayload& payload,
                           const GenerationParams& params) {
    json canon;
    json messages = json::array();
    for (const auto& m : payload.messages) {
        messages.push_back({{"role", std::string(prompts::role_name(m.role))},
                            {"text", m.text}});
    }
    canon["payload"] = {{"messages", std::move(messages)},
                        {"story_id", payload.story_id},
                        {"technique", std::string(prompts::technique_name(payload.technique))}};
    canon["params"] = {{"model_id", params.model_id},
                       {"temperature", params.temperature},
                       {"top_p", params.top_p},
                       {"max_tokens", params.max_tokens},
                       {"extra", params.extra}};
    return util::sha256_hex(canon.dump());
}

namespace {

bool is_fence_open(std::string_view trimmed) {
    if (!trimmed.starts_with("```")) return false;
    for (char c : trimmed.substr(3)) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '+';
        if (!ok) return false;
    }
    return true;
}

bool is_fence_close(std::string_view trimmed) { return trimmed == "```"; }

// One stripping pass; returns nullopt when the text is not fence-wrapped.
std::optional<std::string> strip_once(const std::string& text) {
    const auto lines = util::split_lines(text);
    size_t first = 0;
    while (first < lines.size() && util::is_blank(lines[first])) ++first;
    if (first >= lines.size() || !is_fence_open(util::trim(lines[first]))) {
        return std::nullopt;
    }
    size_t close = lines.size();
    for (size_t i = lines.size(); i-- > first + 1;) {
        if (is_fence_close(util::trim(lines[i]))) {
            close = i;
            break;
        }
    }
    if (close == lines.size()) return std::nullopt;

    std::string out;
    for (size_t i = first + 1; i < close; ++i) {
        if (i > first + 1) out.push_back('\n');
        out += lines[i];
    }
    return out;
}

}  // namespace

std::string strip_fences(const std::string& text) {
    std::string current = text;
    while (auto stripped = strip_once(current)) {
        current = std::move(*stripped);
    }
    return current;
}

ReplayFixture ReplayFixture::load(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(util::read_file(path));
    } catch (const json::exception& e) {
        throw std::runtime_error("replay fixture " + path.string() +
                                 " is not a valid JSON map: " + e.what());
    }
    if (!j.is_object()) {
        throw std::runtime_error("replay fixture " + path.string() +
                                 " must be a JSON object of digest -> text");
    }
    ReplayFixture fixture;
    for (auto it = j.begin(); it != j.end(); ++it) {
        fixture.entries_[it.key()] = it.value().get<std::string>();
    }
    return fixture;
}

ReplayFixture ReplayFixture::load_or_empty(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return ReplayFixture{};
    return load(path);
}

void ReplayFixture::save(const std::filesystem::path& path) const {
    json j = json::object();
    for (const auto& [digest, text] : entries_) j[digest] = text;
    try {
        util::write_file_atomic(path, j.dump(2) + "\n");
    } catch (const std::exception& e) {
        throw ProviderError(ProviderError::Kind::FixtureWrite,
                            std::string("cannot write replay fixture: ") + e.what());
    }
}

std::optional<std::string> ReplayFixture::lookup(const std::string& digest) const {
    auto it = entries_.find(digest);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ReplayFixture::insert(const std::string& digest, std::string text) {
    entries_[digest] = std::move(text);
}

ProviderResponse ReplayProvider::generate(const prompts::PromptPayload& payload,
                                          const GenerationParams& params) {
    params.validate();
    const std::string digest = request_digest(payload, params);
    auto text = fixture_.lookup(digest);
    if (!text) {
        throw ProviderError(ProviderError::Kind::ReplayMiss,
                            "no recorded response for digest " + digest +
                                " (story '" + payload.story_id + "')");
    }
    return ProviderResponse{std::move(*text), params.model_id, 0, digest};
}

namespace {

GenerationParams params_from_json(const json& j, GenerationParams base) {
    if (j.contains("temperature")) base.temperature = j["temperature"].get<double>();
    if (j.contains("top_p")) base.top_p = j["top_p"].get<double>();
    if (j.contains("max_tokens")) base.max_tokens = j["max_tokens"].get<int>();
    if (j.contains("extra")) {
        for (auto it = j["extra"].begin(); it != j["extra"].end(); ++it) {
            base.extra[it.key()] = it.value().get<std::string>();
        }
    }
    return base;
}

}  // namespace

std::vector<ProviderConfig> load_provider_configs(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(util::read_file(path));
    } catch (const std::exception& e) {
        throw std::runtime_error("providers config " + path.string() + ": " + e.what());
    }
    if (!j.contains("providers") || !j["providers"].is_array()) {
        throw std::runtime_error("providers config must contain a 'providers' array");
    }
    std::vector<ProviderConfig> out;
    for (const auto& p : j["providers"]) {
        ProviderConfig cfg;
        cfg.name = p.at("name").get<std::string>();
        cfg.base_url = p.at("base_url").get<std::string>();
        cfg.model_id = p.at("model_id").get<std::string>();
        if (p.contains("path")) cfg.path = p["path"].get<std::string>();
        if (p.contains("auth_env")) cfg.auth_env = p["auth_env"].get<std::string>();
        if (p.contains("auth_header")) cfg.auth_header = p["auth_header"].get<std::string>();
        if (p.contains("auth_prefix")) cfg.auth_prefix = p["auth_prefix"].get<std::string>();
        if (p.contains("timeout_s")) cfg.timeout_s = p["timeout_s"].get<int>();
        if (p.contains("retry_base_ms")) cfg.retry_base_ms = p["retry_base_ms"].get<int>();
        cfg.default_params.model_id = cfg.model_id;
        if (p.contains("params")) {
            cfg.default_params = params_from_json(p["params"], cfg.default_params);
        }
        out.push_back(std::move(cfg));
    }
    return out;
}

ProviderConfig find_provider_config(const std::vector<ProviderConfig>& configs,
                                    std::string_view name) {
    for (const auto& c : configs) {
        if (c.name == name) return c;
    }
    throw std::runtime_error("unknown provider '" + std::string(name) + "'");
}

HttpChatProvider::HttpChatProvider(ProviderConfig config) : config_(std::move(config)) {}

namespace {

std::string scrub(std::string text, const std::string& secret) {
    if (secret.empty()) return text;
    size_t pos = 0;
    while ((pos = text.find(secret, pos)) != std::string::npos) {
        text.replace(pos, secret.size(), "***");
        pos += 3;
    }
    return text;
}

std::string body_excerpt(const std::string& body) {
    constexpr size_t kMax = 240;
    if (body.size() <= kMax) return body;
    return body.substr(0, kMax) + "...";
}

}  // namespace

ProviderResponse HttpChatProvider::generate(const prompts::PromptPayload& payload,
                                            const GenerationParams& params) {
    params.validate();
    const std::string digest = request_digest(payload, params);

    std::string credential;
    if (!config_.auth_env.empty()) {
        const char* value = std::getenv(config_.auth_env.c_str());
        if (!value || std::string_view(value).empty()) {
            throw ProviderError(ProviderError::Kind::Auth,
                                "credential environment variable " + config_.auth_env +
                                    " is not set for provider " + config_.name);
        }
        credential = value;
    }

    json body;
    body["model"] = params.model_id;
    body["temperature"] = params.temperature;
    body["top_p"] = params.top_p;
    body["max_tokens"] = params.max_tokens;
    json messages = json::array();
    for (const auto& m : payload.messages) {
        messages.push_back({{"role", std::string(prompts::role_name(m.role))},
                            {"content", m.text}});
    }
    body["messages"] = std::move(messages);
    for (const auto& [k, v] : params.extra) body[k] = v;
    const std::string body_str = body.dump();

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_s, 0);
    client.set_read_timeout(config_.timeout_s, 0);
    client.set_write_timeout(config_.timeout_s, 0);

    httplib::Headers headers;
    if (!credential.empty()) {
        headers.emplace(config_.auth_header, config_.auth_prefix + credential);
    }

    constexpr int kMaxAttempts = 3;
    const auto started = std::chrono::steady_clock::now();
    httplib::Result result{nullptr, httplib::Error::Unknown};

    // Retries are bounded and apply to rate limits and 5xx only; transport
    // failures surface immediately.
    for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
        result = client.Post(config_.path, headers, body_str, "application/json");
        if (!result) break;
        const int status = result->status;
        const bool retryable = status == 429 || (status >= 500 && status < 600);
        if (!retryable || attempt == kMaxAttempts) break;
        const auto backoff =
            std::chrono::milliseconds(config_.retry_base_ms * (1 << (attempt - 1)));
        std::this_thread::sleep_for(backoff);
    }

    const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();

    if (!result) {
        const auto err = result.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
            err == httplib::Error::Write) {
            throw ProviderError(ProviderError::Kind::Timeout,
                                "request to " + config_.name + " timed out");
        }
        throw ProviderError(ProviderError::Kind::Upstream,
                            "request to " + config_.name +
                                " failed: " + httplib::to_string(err));
    }

    const int status = result->status;
    if (status == 401 || status == 403) {
        throw ProviderError(ProviderError::Kind::Auth,
                            "provider " + config_.name + " rejected the credential (HTTP " +
                                std::to_string(status) +
                                "): " + scrub(body_excerpt(result->body), credential),
                            status);
    }
    if (status == 429) {
        throw ProviderError(ProviderError::Kind::RateLimited,
                            "provider " + config_.name + " rate limited after " +
                                std::to_string(kMaxAttempts) + " attempts",
                            status);
    }
    if (status < 200 || status >= 300) {
        throw ProviderError(ProviderError::Kind::Upstream,
                            "provider " + config_.name + " returned HTTP " +
                                std::to_string(status) + ": " +
                                scrub(body_excerpt(result->body), credential),
                            status);
    }

    std::string text;
    try {
        json response = json::parse(result->body);
        text = response.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw ProviderError(ProviderError::Kind::Upstream,
                            "provider " + config_.name + " returned an unexpected body: " +
                                scrub(body_excerpt(result->body), credential));
    }

    return ProviderResponse{std::move(text), params.model_id,
                            static_cast<std::int64_t>(latency), digest};
}

namespace {

std::mutex g_fixture_write_mutex;

}  // namespace

ProviderResponse record(Provider& provider, const prompts::PromptPayload& payload,
                        const GenerationParams& params,
                        const std::filesystem::path& fixture_path) {
    ProviderResponse response = provider.generate(payload, params);
    std::lock_guard<std::mutex> lock(g_fixture_write_mutex);
    ReplayFixture fixture = ReplayFixture::load_or_empty(fixture_path);
    fixture.insert(response.request_digest, response.text);
    fixture.save(fixture_path);
    return response;
}

}  // namespace bddgen::llm
