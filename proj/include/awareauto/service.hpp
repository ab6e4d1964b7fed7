#pragma once

#include "awareauto/engine.hpp"
#include "awareauto/llm.hpp"
#include "awareauto/pipeline.hpp"

#include "json.hpp"

#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace awareauto {

struct ServiceConfig {
    llm::BackendConfig backend;
    std::filesystem::path catalog_path;
    std::filesystem::path prompt_dir;
    std::string host = "127.0.0.1";
    int port = 8080;
};

// Keys: backend, endpoint, model, fixtures, catalog, prompts, listen
// ("host:port"). Relative paths resolve against `base_dir`. Throws SchemaError.
ServiceConfig service_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ServiceConfig load_service_config(const std::filesystem::path& path);

enum class InputKind { expression, modification_expression, direct_edit, confirm };

std::string_view to_string(InputKind kind);

struct HistoryEntry {
    int round = 0;
    InputKind kind = InputKind::expression;
    nlohmann::json input;
    nlohmann::json outputs;
    std::vector<std::string> errors;
};

struct Session {
    enum class Status { open, grounding, closed };

    std::string id;
    int round = 0;  // user inputs so far; confirm does not count
    Status status = Status::open;
    std::optional<NLRule> draft_nl;
    std::optional<GroundedRule> draft_grounded;
    std::vector<HistoryEntry> history;
    std::optional<std::string> deployed_as;
};

nlohmann::json to_json(const Session& session);

/// Error with an HTTP status, raised by Service operations.
class ServiceError : public Error {
public:
    ServiceError(int status, const std::string& message, nlohmann::json detail = nullptr)
        : Error(message), status_(status), detail_(std::move(detail)) {}
    int status() const { return status_; }
    const nlohmann::json& detail() const { return detail_; }

private:
    int status_;
    nlohmann::json detail_;
};

/// Sessions, deployed rules and the simulator behind the HTTP API. Each
/// session has its own lock, so sessions proceed concurrently; the engine is
/// guarded by a single lock and therefore sees one command at a time.
class Service {
public:
    Service(std::shared_ptr<const Pipeline> pipeline, Engine engine);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    nlohmann::json create_session();
    // `async`: the reply carries the rule text and grounding continues in the
    // background; poll session() for the result.
    nlohmann::json submit_expression(const std::string& id, const UserExpression& expr, const ContextSnapshot& snapshot,
                                     bool async = false);
    nlohmann::json edit_rule_text(const std::string& id, const std::string& document, bool async = false);
    nlohmann::json confirm(const std::string& id);
    nlohmann::json session(const std::string& id) const;
    // Blocks until background grounding of the session has finished.
    void wait_idle(const std::string& id) const;

    nlohmann::json list_rules() const;
    nlohmann::json delete_rule(const std::string& name);

    nlohmann::json sim_events(const nlohmann::json& body);
    nlohmann::json sim_advance(const nlohmann::json& body);
    nlohmann::json sim_state() const;
    nlohmann::json sim_trace() const;

private:
    struct Slot {
        mutable std::mutex mutex;
        Session session;
        std::shared_future<void> grounding;
    };

    std::shared_ptr<Slot> slot(const std::string& id) const;
    nlohmann::json ground_into(const std::shared_ptr<Slot>& s, HistoryEntry entry, bool async);
    std::optional<NLRule> deployed_nl(const std::string& name) const;

    std::shared_ptr<const Pipeline> pipeline_;

    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::uint64_t next_session_ = 0;

    mutable std::mutex engine_mutex_;
    Engine engine_;
    std::map<std::string, NLRule> deployed_nl_;  // lower-cased key
};

// Registers the HTTP routes on `server`.
void mount_routes(httplib::Server& server, Service& service);

// Builds pipeline, engine and server from the config and blocks serving.
int serve(const ServiceConfig& config);

} // namespace awareauto
