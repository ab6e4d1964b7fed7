#include "awareauto/llm.hpp"

#include "awareauto/text.hpp"

#include "httplib.h"
#include "json.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace awareauto::llm {

namespace fs = std::filesystem;

std::string fixture_key(const CompletionRequest& request) {
    std::string material = request.system_prompt;
    material.push_back('\0');
    material += request.user_message;

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(material.data(), material.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");

    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

fs::path fixture_path(const fs::path& dir, const CompletionRequest& request) { return dir / (fixture_key(request) + ".txt"); }

// ---------------------------------------------------------------------------

ScriptedBackend::ScriptedBackend(fs::path fixture_dir) : dir_(std::move(fixture_dir)) {
    if (dir_.empty()) throw InvalidArgument("scripted backend requires a fixture directory");
}

std::string ScriptedBackend::complete(const CompletionRequest& request) {
    const auto path = fixture_path(dir_, request);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFixtureError(fixture_key(request), path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw CredentialError("remote backend requires an endpoint");
    if (config_.api_key.empty()) {
        if (const char* key = std::getenv(kApiKeyVariable); key && *key) config_.api_key = key;
    }
    if (config_.api_key.empty())
        throw CredentialError(std::string("remote backend requires a credential in $") + kApiKeyVariable);

    // Split "scheme://host[:port]/path".
    const auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw InvalidArgument("endpoint must start with http:// or https://");
    const auto path_start = config_.endpoint.find('/', scheme_end + 3);
    origin_ = config_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
}

std::string RemoteBackend::complete(const CompletionRequest& request) {
    const nlohmann::json body = {
        {"model", config_.model},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
        {"messages",
         {{{"role", "system"}, {"content", request.system_prompt}}, {{"role", "user"}, {"content", request.user_message}}}}};
    const auto payload = body.dump();

    std::string last_error;
    auto backoff = config_.initial_backoff;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Client client(origin_);
        const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
        client.set_connection_timeout(seconds);
        client.set_read_timeout(seconds);
        client.set_write_timeout(seconds);
        httplib::Headers headers = {{"Authorization", "Bearer " + config_.api_key}};
        auto res = client.Post(path_, headers, payload, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) throw TransportError("LLM endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body);

        auto doc = nlohmann::json::parse(res->body, nullptr, false);
        if (doc.is_discarded()) throw TransportError("LLM endpoint returned invalid JSON");
        try {
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            throw TransportError("LLM response has no choices[0].message.content");
        }
    }
    throw TransportError("LLM request failed after " + std::to_string(config_.max_attempts) + " attempts: " + last_error);
}

// ---------------------------------------------------------------------------

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner, fs::path fixture_dir)
    : inner_(std::move(inner)), dir_(std::move(fixture_dir)) {
    if (!inner_) throw InvalidArgument("recording backend needs an inner backend");
    if (dir_.empty()) throw InvalidArgument("recording backend requires a fixture directory");
}

std::string RecordingBackend::complete(const CompletionRequest& request) {
    auto response = inner_->complete(request);
    std::lock_guard lock(write_mutex_);
    fs::create_directories(dir_);
    std::ofstream out(fixture_path(dir_, request), std::ios::binary | std::ios::trunc);
    out << response;
    if (!out) throw Error("cannot write fixture into " + dir_.string());
    return response;
}

// ---------------------------------------------------------------------------

BackendKind parse_backend_kind(std::string_view s) {
    if (text::iequals(s, "remote") || text::iequals(s, "remote_http")) return BackendKind::remote_http;
    if (text::iequals(s, "scripted")) return BackendKind::scripted;
    if (text::iequals(s, "recording")) return BackendKind::recording;
    throw InvalidArgument("unknown backend '" + std::string(s) + "' (expected remote, scripted or recording)");
}

std::shared_ptr<Backend> make_backend(const BackendConfig& config) {
    switch (config.kind) {
    case BackendKind::scripted: return std::make_shared<ScriptedBackend>(config.fixture_dir);
    case BackendKind::remote_http: return std::make_shared<RemoteBackend>(config.remote);
    case BackendKind::recording:
        return std::make_shared<RecordingBackend>(std::make_shared<RemoteBackend>(config.remote), config.fixture_dir);
    }
    throw InvalidArgument("unknown backend kind");
}

} // namespace awareauto::llm
