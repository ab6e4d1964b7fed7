#include "awareauto/service.hpp"

#include "awareauto/grounded.hpp"
#include "awareauto/reasoning.hpp"
#include "awareauto/rule_text.hpp"
#include "awareauto/text.hpp"

#include "httplib.h"

#include <fstream>
#include <iostream>

namespace awareauto {

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

std::string config_string(const nlohmann::json& doc, const char* key, std::string fallback) {
    if (!doc.contains(key)) return fallback;
    if (!doc.at(key).is_string()) throw SchemaError(std::string("/") + key, "expected a string");
    return doc.at(key).get<std::string>();
}

} // namespace

ServiceConfig service_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw SchemaError("/", "config must be a JSON object");
    ServiceConfig c;
    const std::filesystem::path data(AWAREAUTO_DATA_DIR);
    try {
        c.backend.kind = llm::parse_backend_kind(config_string(doc, "backend", "scripted"));
    } catch (const InvalidArgument& e) {
        throw SchemaError("/backend", e.what());
    }
    c.backend.remote.endpoint = config_string(doc, "endpoint", "");
    c.backend.remote.model = config_string(doc, "model", c.backend.remote.model);
    c.backend.fixture_dir = resolve(base_dir, config_string(doc, "fixtures", (data / "fixtures").string()));
    c.catalog_path = resolve(base_dir, config_string(doc, "catalog", (data / "catalog" / "living_room.json").string()));
    c.prompt_dir = resolve(base_dir, config_string(doc, "prompts", (data / "prompts").string()));

    const auto listen = config_string(doc, "listen", "127.0.0.1:8080");
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw SchemaError("/listen", "expected host:port");
    c.host = listen.substr(0, colon);
    try {
        c.port = std::stoi(listen.substr(colon + 1));
    } catch (const std::exception&) {
        throw SchemaError("/listen", "bad port in '" + listen + "'");
    }
    if (c.port < 0 || c.port > 65535) throw SchemaError("/listen", "port out of range");
    return c;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open config " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("/", path.string() + ": " + e.what());
    }
    return service_config_from_json(doc, path.parent_path());
}

// ---------------------------------------------------------------------------
// Sessions
// ---------------------------------------------------------------------------

std::string_view to_string(InputKind kind) {
    switch (kind) {
    case InputKind::expression: return "expression";
    case InputKind::modification_expression: return "modification_expression";
    case InputKind::direct_edit: return "direct_edit";
    case InputKind::confirm: return "confirm";
    }
    return "?";
}

nlohmann::json to_json(const Session& s) {
    nlohmann::json doc{{"id", s.id}, {"round", s.round}};
    switch (s.status) {
    case Session::Status::open: doc["status"] = "open"; break;
    case Session::Status::grounding: doc["status"] = "grounding"; break;
    case Session::Status::closed: doc["status"] = "closed"; break;
    }
    doc["draft_nl"] = s.draft_nl ? nlohmann::json(serialize_rule_text(*s.draft_nl)) : nlohmann::json(nullptr);
    doc["draft_grounded"] = s.draft_grounded ? to_json(*s.draft_grounded) : nlohmann::json(nullptr);
    doc["deployed_as"] = s.deployed_as ? nlohmann::json(*s.deployed_as) : nlohmann::json(nullptr);
    auto history = nlohmann::json::array();
    for (const auto& h : s.history)
        history.push_back({{"round", h.round}, {"kind", to_string(h.kind)}, {"input", h.input}, {"outputs", h.outputs},
                           {"errors", h.errors}});
    doc["history"] = history;
    return doc;
}

Service::Service(std::shared_ptr<const Pipeline> pipeline, Engine engine)
    : pipeline_(std::move(pipeline)), engine_(std::move(engine)) {
    if (!pipeline_) throw InvalidArgument("service needs a pipeline");
}

Service::~Service() {
    std::lock_guard guard(sessions_mutex_);
    for (auto& [id, s] : sessions_) {
        std::shared_future<void> pending;
        {
            std::lock_guard lock(s->mutex);
            pending = s->grounding;
        }
        if (pending.valid()) pending.wait();
    }
}

nlohmann::json Service::create_session() {
    auto s = std::make_shared<Slot>();
    std::lock_guard guard(sessions_mutex_);
    s->session.id = "s" + std::to_string(++next_session_);
    sessions_[s->session.id] = s;
    return to_json(s->session);
}

std::shared_ptr<Service::Slot> Service::slot(const std::string& id) const {
    std::lock_guard guard(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(404, "no session '" + id + "'");
    return it->second;
}

nlohmann::json Service::session(const std::string& id) const {
    auto s = slot(id);
    std::lock_guard lock(s->mutex);
    return to_json(s->session);
}

void Service::wait_idle(const std::string& id) const {
    auto s = slot(id);
    std::shared_future<void> pending;
    {
        std::lock_guard lock(s->mutex);
        pending = s->grounding;
    }
    if (pending.valid()) pending.wait();
}

namespace {

void require_open(const Session& s) {
    if (s.status == Session::Status::closed) throw ServiceError(409, "session " + s.id + " is closed");
    if (s.status == Session::Status::grounding)
        throw ServiceError(409, "session " + s.id + " is still grounding the previous input");
}

std::vector<std::string> error_lines(const GroundedRule& g) {
    std::vector<std::string> out;
    for (const auto& e : g.errors) out.push_back(std::string(to_string(e.code)) + ": " + e.message);
    return out;
}

void record_grounding(HistoryEntry& entry, const GroundedRule& g) {
    entry.outputs["grounded_rule"] = to_json(g);
    entry.outputs["feasible"] = g.feasible;
    auto errors = nlohmann::json::array();
    for (const auto& e : g.errors) errors.push_back(to_json(e));
    entry.outputs["grounding_errors"] = errors;
    for (auto& line : error_lines(g)) entry.errors.push_back(std::move(line));
}

nlohmann::json reply(const HistoryEntry& entry, const Session& s) {
    nlohmann::json doc = entry.outputs;
    doc["session"] = s.id;
    doc["round"] = entry.round;
    doc["kind"] = to_string(entry.kind);
    doc["errors"] = entry.errors;
    return doc;
}

} // namespace

nlohmann::json Service::ground_into(const std::shared_ptr<Slot>& s, HistoryEntry entry, bool async) {
    auto& session = s->session;
    const NLRule rule = *session.draft_nl;
    if (!async) {
        try {
            auto g = pipeline_->ground(rule);
            record_grounding(entry, g);
            session.draft_grounded = std::move(g);
            entry.outputs["grounding"] = "done";
        } catch (const Error& e) {
            session.draft_grounded.reset();
            entry.errors.push_back(e.what());
            entry.outputs["grounding"] = "failed";
        }
        session.history.push_back(entry);
        return reply(entry, session);
    }

    // Surface the rule text now; the grounding result lands in history later.
    entry.outputs["grounding"] = "pending";
    session.history.push_back(entry);
    session.status = Session::Status::grounding;
    session.draft_grounded.reset();
    const auto index = session.history.size() - 1;
    auto result = reply(entry, session);

    std::weak_ptr<Slot> weak = s;
    s->grounding = std::async(std::launch::async, [this, weak, rule, index] {
                       std::optional<GroundedRule> g;
                       std::string failure;
                       try {
                           g = pipeline_->ground(rule);
                       } catch (const std::exception& e) {
                           failure = e.what();
                       }
                       auto slot = weak.lock();
                       if (!slot) return;
                       std::lock_guard guard(slot->mutex);
                       auto& h = slot->session.history[index];
                       if (g) {
                           record_grounding(h, *g);
                           h.outputs["grounding"] = "done";
                       } else {
                           h.errors.push_back(failure);
                           h.outputs["grounding"] = "failed";
                       }
                       slot->session.draft_grounded = std::move(g);
                       slot->session.status = Session::Status::open;
                   }).share();
    return result;
}

std::optional<NLRule> Service::deployed_nl(const std::string& name) const {
    std::lock_guard guard(engine_mutex_);
    auto it = deployed_nl_.find(text::lower(text::trim(name)));
    if (it == deployed_nl_.end()) return std::nullopt;
    return it->second;
}

nlohmann::json Service::submit_expression(const std::string& id, const UserExpression& expr,
                                          const ContextSnapshot& snapshot, bool async) {
    auto s = slot(id);
    std::unique_lock lock(s->mutex);
    auto& session = s->session;
    require_open(session);

    HistoryEntry entry;
    entry.round = ++session.round;
    entry.kind = InputKind::expression;
    entry.input = {{"expression", to_json(expr)}, {"snapshot", to_json(snapshot)}};

    auto fail = [&](const std::string& message) {
        entry.errors.push_back(message);
        entry.outputs["error"] = message;
        session.history.push_back(entry);
        return reply(entry, session);
    };

    NLRule nl;
    try {
        entry.outputs["normalized"] = normalize_expression(expr, snapshot);
        nl = pipeline_->reason(entry.outputs["normalized"].get<std::string>(), snapshot);
    } catch (const UnparseableOutputError& e) {
        entry.outputs["raw_output"] = e.raw();
        return fail(e.what());
    } catch (const Error& e) {
        return fail(e.what());
    }
    entry.outputs["nl_rule"] = serialize_rule_text(nl);

    if (nl.operation == RuleOperation::modify) {
        entry.kind = InputKind::modification_expression;
        std::optional<NLRule> base = session.draft_nl;
        const bool from_draft = base.has_value();
        if (!base && nl.name) base = deployed_nl(*nl.name);
        if (!base)
            return fail(nl.name ? "no draft and no deployed rule named '" + *nl.name + "' to modify"
                                : "MODIFY needs a draft or the exact name of a deployed rule");
        try {
            auto merged = merge_delta(*base, nl);
            if (from_draft) merged.operation = base->operation;
            entry.outputs["merged_rule"] = serialize_rule_text(merged);
            session.draft_nl = std::move(merged);
        } catch (const InvalidArgument& e) {
            return fail(e.what());
        }
    } else {
        session.draft_nl = nl;
    }
    return ground_into(s, std::move(entry), async);
}

nlohmann::json Service::edit_rule_text(const std::string& id, const std::string& document, bool async) {
    auto s = slot(id);
    std::unique_lock lock(s->mutex);
    auto& session = s->session;
    require_open(session);

    HistoryEntry entry;
    entry.round = ++session.round;
    entry.kind = InputKind::direct_edit;
    entry.input = {{"document", document}};

    NLRule rule;
    try {
        rule = parse_rule_text(document);
        if (rule.operation == RuleOperation::modify) {
            NLRule standalone = rule;
            standalone.operation = RuleOperation::create;
            check_invariants(standalone);
        }
    } catch (const ParseError& e) {
        entry.errors.push_back(e.what());
        entry.outputs["parse_error"] = {{"line", e.line()}, {"column", e.column()}, {"message", e.reason()}};
        session.history.push_back(entry);
        throw ServiceError(422, e.what(), reply(entry, session));
    } catch (const InvalidArgument& e) {
        entry.errors.push_back(e.what());
        entry.outputs["parse_error"] = {{"line", 0}, {"column", 0}, {"message", e.what()}};
        session.history.push_back(entry);
        throw ServiceError(422, e.what(), reply(entry, session));
    }
    entry.outputs["nl_rule"] = serialize_rule_text(rule);
    session.draft_nl = std::move(rule);
    return ground_into(s, std::move(entry), async);
}

nlohmann::json Service::confirm(const std::string& id) {
    auto s = slot(id);
    std::lock_guard lock(s->mutex);
    auto& session = s->session;
    require_open(session);
    if (!session.draft_grounded) throw ServiceError(409, "session " + id + " has no grounded draft to confirm");
    const auto& g = *session.draft_grounded;
    if (!g.feasible) {
        auto errors = nlohmann::json::array();
        for (const auto& e : g.errors) errors.push_back(to_json(e));
        throw ServiceError(409, "the draft is not executable", {{"grounding_errors", errors}});
    }

    HistoryEntry entry;
    entry.round = session.round;
    entry.kind = InputKind::confirm;
    std::string key;
    {
        std::lock_guard guard(engine_mutex_);
        try {
            if (g.operation == RuleOperation::remove) {
                key = g.name.value_or("");
                engine_.withdraw(key);
                deployed_nl_.erase(text::lower(text::trim(key)));
            } else {
                std::optional<GroundedRule> previous;
                if (g.operation == RuleOperation::modify && g.name)
                    if (const auto* old = engine_.find_rule(*g.name)) {
                        previous = *old;
                        engine_.withdraw(*g.name);
                    }
                try {
                    key = engine_.deploy(g);
                } catch (...) {
                    if (previous) engine_.deploy(*previous);
                    throw;
                }
                deployed_nl_[text::lower(key)] = *session.draft_nl;
            }
        } catch (const NotFound& e) {
            throw ServiceError(404, e.what());
        } catch (const DeploymentError& e) {
            throw ServiceError(409, e.what());
        }
    }
    entry.outputs = {{"deployed", key}, {"operation", to_string(g.operation)}};
    session.history.push_back(entry);
    session.status = Session::Status::closed;
    session.deployed_as = key;
    return {{"session", id}, {"deployed", key}, {"operation", to_string(g.operation)}, {"round", session.round},
            {"status", "closed"}};
}

// ---------------------------------------------------------------------------
// Rules and simulator
// ---------------------------------------------------------------------------

nlohmann::json Service::list_rules() const {
    std::lock_guard guard(engine_mutex_);
    auto rules = nlohmann::json::array();
    for (const auto& key : engine_.rule_keys()) {
        nlohmann::json item{{"name", key}, {"grounded_rule", to_json(*engine_.find_rule(key))}};
        auto it = deployed_nl_.find(text::lower(key));
        item["nl_rule"] = it != deployed_nl_.end() ? nlohmann::json(serialize_rule_text(it->second)) : nlohmann::json(nullptr);
        rules.push_back(item);
    }
    return {{"rules", rules}};
}

nlohmann::json Service::delete_rule(const std::string& name) {
    std::lock_guard guard(engine_mutex_);
    try {
        engine_.withdraw(name);
    } catch (const NotFound& e) {
        throw ServiceError(404, e.what());
    }
    deployed_nl_.erase(text::lower(text::trim(name)));
    return {{"deleted", name}};
}

nlohmann::json Service::sim_events(const nlohmann::json& body) {
    std::vector<SimEvent> events;
    if (body.is_array())
        events = load_event_script(body);
    else
        events.push_back(sim_event_from_json(body));

    std::lock_guard guard(engine_mutex_);
    auto delta = nlohmann::json::array();
    for (const auto& e : events) {
        try {
            for (const auto& entry : engine_.inject(e)) delta.push_back(to_json(entry));
        } catch (const NotFound& err) {
            throw ServiceError(404, err.what());
        } catch (const InvalidArgument& err) {
            throw ServiceError(400, err.what());
        }
    }
    return {{"now", engine_.now()}, {"delta", delta}};
}

nlohmann::json Service::sim_advance(const nlohmann::json& body) {
    std::lock_guard guard(engine_mutex_);
    std::int64_t to = 0;
    if (body.is_object() && body.contains("to") && body.at("to").is_number_integer())
        to = body.at("to").get<std::int64_t>();
    else if (body.is_object() && body.contains("by") && body.at("by").is_number_integer())
        to = engine_.now() + body.at("by").get<std::int64_t>();
    else
        throw ServiceError(400, "expected {\"to\": <seconds>} or {\"by\": <seconds>}");
    if (to < engine_.now()) throw ServiceError(400, "cannot go back in time (now is " + std::to_string(engine_.now()) + ")");
    auto delta = nlohmann::json::array();
    for (const auto& e : engine_.advance(to)) delta.push_back(to_json(e));
    return {{"now", engine_.now()}, {"delta", delta}};
}

nlohmann::json Service::sim_state() const {
    std::lock_guard guard(engine_mutex_);
    return {{"now", engine_.now()}, {"states", engine_.states()}};
}

nlohmann::json Service::sim_trace() const {
    std::lock_guard guard(engine_mutex_);
    auto trace = nlohmann::json::array();
    for (const auto& e : engine_.trace()) trace.push_back(to_json(e));
    return {{"now", engine_.now()}, {"trace", trace}};
}

// ---------------------------------------------------------------------------
// HTTP
// ---------------------------------------------------------------------------

namespace {

void send(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <class F>
void handle(httplib::Response& res, F&& f, int ok_status = 200) {
    try {
        send(res, ok_status, f());
    } catch (const ServiceError& e) {
        nlohmann::json body = e.detail().is_object() ? e.detail() : nlohmann::json::object();
        body["error"] = e.what();
        send(res, e.status(), body);
    } catch (const SchemaError& e) {
        send(res, 400, {{"error", e.what()}, {"pointer", e.pointer()}});
    } catch (const nlohmann::json::exception& e) {
        send(res, 400, {{"error", std::string("bad JSON: ") + e.what()}});
    } catch (const InvalidArgument& e) {
        send(res, 400, {{"error", e.what()}});
    } catch (const NotFound& e) {
        send(res, 404, {{"error", e.what()}});
    } catch (const llm::TransportError& e) {
        send(res, 502, {{"error", e.what()}});
    } catch (const std::exception& e) {
        send(res, 500, {{"error", e.what()}});
    }
}

nlohmann::json body_of(const httplib::Request& req) {
    if (req.body.empty()) return nlohmann::json::object();
    return nlohmann::json::parse(req.body);
}

bool async_flag(const nlohmann::json& body) {
    return body.is_object() && body.contains("async") && body.at("async").is_boolean() && body.at("async").get<bool>();
}

} // namespace

void mount_routes(httplib::Server& server, Service& service) {
    server.Post("/sessions", [&](const httplib::Request&, httplib::Response& res) {
        handle(res, [&] { return service.create_session(); }, 201);
    });
    server.Post(R"(/sessions/([^/]+)/expression)", [&](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] {
            const auto body = body_of(req);
            if (!body.is_object() || !body.contains("expression")) throw SchemaError("/expression", "missing field");
            const auto expr = expression_from_json(body.at("expression"));
            ContextSnapshot snapshot;
            if (body.contains("snapshot")) snapshot = snapshot_from_json(body.at("snapshot"));
            return service.submit_expression(req.matches[1], expr, snapshot, async_flag(body));
        });
    });
    server.Post(R"(/sessions/([^/]+)/edit)", [&](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] {
            const auto body = body_of(req);
            if (!body.is_object() || !body.contains("document") || !body.at("document").is_string())
                throw SchemaError("/document", "expected the rule text as a string");
            return service.edit_rule_text(req.matches[1], body.at("document").get<std::string>(), async_flag(body));
        });
    });
    server.Post(R"(/sessions/([^/]+)/confirm)", [&](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return service.confirm(req.matches[1]); });
    });
    server.Get(R"(/sessions/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return service.session(req.matches[1]); });
    });
    server.Get("/rules", [&](const httplib::Request&, httplib::Response& res) {
        handle(res, [&] { return service.list_rules(); });
    });
    server.Delete(R"(/rules/(.+))", [&](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return service.delete_rule(httplib::detail::decode_url(req.matches[1], false)); });
    });
    server.Post("/sim/events", [&](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return service.sim_events(body_of(req)); });
    });
    server.Post("/sim/advance", [&](const httplib::Request& req, httplib::Response& res) {
        handle(res, [&] { return service.sim_advance(body_of(req)); });
    });
    server.Get("/sim/state", [&](const httplib::Request&, httplib::Response& res) {
        handle(res, [&] { return service.sim_state(); });
    });
    server.Get("/sim/trace", [&](const httplib::Request&, httplib::Response& res) {
        handle(res, [&] { return service.sim_trace(); });
    });
}

int serve(const ServiceConfig& config) {
    auto catalog = load_catalog_file(config.catalog_path.string());
    auto pipeline = std::make_shared<const Pipeline>(catalog, PromptSet::load(config.prompt_dir),
                                                     llm::make_backend(config.backend));
    Service service(pipeline, Engine(catalog));
    httplib::Server server;
    mount_routes(server, service);
    std::cerr << "awareauto: listening on " << config.host << ":" << config.port << "\n";
    if (!server.listen(config.host, config.port)) {
        std::cerr << "awareauto: cannot listen on " << config.host << ":" << config.port << "\n";
        return 2;
    }
    return 0;
}

} // namespace awareauto
