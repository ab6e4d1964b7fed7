#pragma once

#include "awareauto/error.hpp"

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

namespace awareauto::llm {

struct CompletionRequest {
    std::string system_prompt;
    std::string user_message;
    double temperature = 0.0;
    int max_tokens = 1024;
};

class TransportError : public Error {
public:
    using Error::Error;
};

class MissingFixtureError : public Error {
public:
    MissingFixtureError(std::string key, std::filesystem::path path)
        : Error("no fixture for request " + key + " (create " + path.string() + ")"), key_(std::move(key)),
          path_(std::move(path)) {}

    const std::string& key() const { return key_; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::string key_;
    std::filesystem::path path_;
};

class CredentialError : public Error {
public:
    using Error::Error;
};

inline constexpr const char* kApiKeyVariable = "AWAREAUTO_LLM_API_KEY";

/// Text-completion backend. Implementations are safe for concurrent use.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const CompletionRequest& request) = 0;
};

// Lower-case hex SHA-256 of `system_prompt \0 user_message`. Sampling
// settings are deliberately not part of the key.
std::string fixture_key(const CompletionRequest& request);
std::filesystem::path fixture_path(const std::filesystem::path& dir, const CompletionRequest& request);

/// Replays `<dir>/<fixture_key>.txt` byte for byte.
class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(std::filesystem::path fixture_dir);
    std::string complete(const CompletionRequest& request) override;

    const std::filesystem::path& directory() const { return dir_; }

private:
    std::filesystem::path dir_;
};

struct RemoteConfig {
    std::string endpoint;  // e.g. https://api.example.com/v1/chat/completions
    std::string model = "gpt-4o-mini";
    std::string api_key;   // empty: read kApiKeyVariable
    std::chrono::milliseconds timeout{60'000};
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
};

/// Chat-completion style HTTP backend.
class RemoteBackend : public Backend {
public:
    // Throws CredentialError when no endpoint or key is available.
    explicit RemoteBackend(RemoteConfig config);
    std::string complete(const CompletionRequest& request) override;

private:
    RemoteConfig config_;
    std::string origin_;
    std::string path_;
};

/// Forwards to another backend and stores every response as a fixture that
/// ScriptedBackend can replay.
class RecordingBackend : public Backend {
public:
    RecordingBackend(std::shared_ptr<Backend> inner, std::filesystem::path fixture_dir);
    std::string complete(const CompletionRequest& request) override;

private:
    std::shared_ptr<Backend> inner_;
    std::filesystem::path dir_;
    std::mutex write_mutex_;
};

enum class BackendKind { remote_http, scripted, recording };

BackendKind parse_backend_kind(std::string_view text);

struct BackendConfig {
    BackendKind kind = BackendKind::scripted;
    std::filesystem::path fixture_dir;
    RemoteConfig remote;
};

// scripted requires fixture_dir; remote/recording require endpoint and key.
std::shared_ptr<Backend> make_backend(const BackendConfig& config);

} // namespace awareauto::llm
