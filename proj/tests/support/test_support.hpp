#pragma once

#include "awareauto/catalog.hpp"
#include "awareauto/grounded.hpp"
#include "awareauto/llm.hpp"
#include "awareauto/prompts.hpp"
#include "awareauto/rule.hpp"

#include <deque>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace awareauto::testing {

inline std::filesystem::path data_dir() { return AWAREAUTO_DATA_DIR; }
inline std::filesystem::path test_data_dir() { return AWAREAUTO_TEST_DATA_DIR; }

const DeviceCatalog& bundled_catalog();
const PromptSet& bundled_prompts();

// A fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Answers by calling `respond`, and remembers every request.
class FakeBackend : public llm::Backend {
public:
    using Responder = std::function<std::string(const llm::CompletionRequest&)>;

    explicit FakeBackend(Responder respond) : respond_(std::move(respond)) {}
    // Hands out `answers` in order; throws once they run out.
    static std::shared_ptr<FakeBackend> queue(std::vector<std::string> answers);

    std::string complete(const llm::CompletionRequest& request) override;

    std::vector<llm::CompletionRequest> requests() const;

private:
    Responder respond_;
    mutable std::mutex mutex_;
    std::vector<llm::CompletionRequest> requests_;
};

// Pairs from display tuples: {{"TV-switch-on-event"}, {"ceiling light-switch-on"}}.
TAPair make_pair(std::initializer_list<const char*> triggers, std::initializer_list<const char*> actions);
GroundedRule make_rule(std::vector<TAPair> pairs, std::optional<std::string> name = std::nullopt);

std::string read_text(const std::filesystem::path& path);

} // namespace awareauto::testing
