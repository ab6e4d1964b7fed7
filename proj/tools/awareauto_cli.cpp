// awareauto command-line entry point.
//
// Exit codes: 0 success, 1 bad input (files, flags, JSON), 2 pipeline or
// backend failure.

#include "awareauto/engine.hpp"
#include "awareauto/eval.hpp"
#include "awareauto/grounded.hpp"
#include "awareauto/pipeline.hpp"
#include "awareauto/reasoning.hpp"
#include "awareauto/rule_text.hpp"
#include "awareauto/service.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace awareauto;

namespace {

struct InputError : Error {
    using Error::Error;
};
struct PipelineFailure : Error {
    using Error::Error;
};

struct Options {
    std::string config;
    std::string catalog;
    std::string backend;
    std::string fixtures;
    std::string prompts;
    std::string endpoint;
    std::string model;
    std::string out;
    std::string format = "json";
};

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open file");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": invalid JSON: " + e.what());
    }
}

template <class F>
auto in_file(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const SchemaError& e) {
        throw InputError(path + ": field " + e.pointer() + ": " + std::string(e.what()).substr(e.pointer().size() + 2));
    } catch (const InvalidArgument& e) {
        throw InputError(path + ": " + e.what());
    } catch (const NotFound& e) {
        throw InputError(path + ": " + e.what());
    }
}

ServiceConfig resolve_config(const Options& o) {
    ServiceConfig c = o.config.empty() ? service_config_from_json(nlohmann::json::object())
                                       : in_file(o.config, [&] { return load_service_config(o.config); });
    if (!o.catalog.empty()) c.catalog_path = o.catalog;
    if (!o.fixtures.empty()) c.backend.fixture_dir = o.fixtures;
    if (!o.prompts.empty()) c.prompt_dir = o.prompts;
    if (!o.endpoint.empty()) c.backend.remote.endpoint = o.endpoint;
    if (!o.model.empty()) c.backend.remote.model = o.model;
    if (!o.backend.empty()) {
        try {
            c.backend.kind = llm::parse_backend_kind(o.backend);
        } catch (const InvalidArgument& e) {
            throw InputError(std::string("--backend: ") + e.what());
        }
    }
    return c;
}

DeviceCatalog load_catalog_checked(const ServiceConfig& c) {
    return in_file(c.catalog_path.string(), [&] { return load_catalog_file(c.catalog_path.string()); });
}

std::shared_ptr<Pipeline> make_pipeline(const ServiceConfig& c) {
    auto catalog = load_catalog_checked(c);
    auto prompts = in_file(c.prompt_dir.string(), [&] { return PromptSet::load(c.prompt_dir); });
    std::shared_ptr<llm::Backend> backend;
    try {
        backend = llm::make_backend(c.backend);
    } catch (const llm::CredentialError& e) {
        throw InputError(e.what());
    }
    return std::make_shared<Pipeline>(std::move(catalog), std::move(prompts), std::move(backend));
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(o.out);
    if (!out) throw InputError(o.out + ": cannot write");
    out << text;
}

void check_format(const Options& o) {
    if (o.format != "json" && o.format != "table") throw InputError("--format must be json or table");
}

// --------------------------------------------------------------------------

int cmd_pipeline(const Options& o, const std::string& input_path) {
    check_format(o);
    const auto doc = read_json(input_path);
    UserExpression expr;
    ContextSnapshot snapshot;
    std::optional<NLRule> base;
    in_file(input_path, [&] {
        if (doc.is_object() && doc.contains("expression")) {
            expr = expression_from_json(doc.at("expression"));
            if (doc.contains("snapshot")) snapshot = snapshot_from_json(doc.at("snapshot"));
            if (doc.contains("base_nl")) {
                if (!doc.at("base_nl").is_string()) throw SchemaError("/base_nl", "expected rule text");
                try {
                    base = parse_rule_text(doc.at("base_nl").get<std::string>());
                } catch (const ParseError& e) {
                    throw SchemaError("/base_nl", e.what());
                }
            }
        } else {
            expr = expression_from_json(doc);
        }
        return 0;
    });

    const auto config = resolve_config(o);
    const auto pipeline = make_pipeline(config);
    PipelineResult result;
    try {
        result = pipeline->run(expr, snapshot, base);
    } catch (const llm::MissingFixtureError& e) {
        throw PipelineFailure(e.what());
    } catch (const llm::TransportError& e) {
        throw PipelineFailure(e.what());
    }

    nlohmann::json out{{"normalized", result.normalized}};
    if (result.nl_rule) out["nl_rule"] = serialize_rule_text(*result.nl_rule);
    if (result.merged_rule) out["merged_rule"] = serialize_rule_text(*result.merged_rule);
    if (result.grounded) out["grounded_rule"] = to_json(*result.grounded);
    if (result.error) {
        out["error"] = *result.error;
        if (!result.raw_output.empty()) out["raw_output"] = result.raw_output;
    }

    if (o.format == "json") {
        emit(o, out.dump(2) + "\n");
    } else {
        std::ostringstream s;
        s << "Normalized:\n" << result.normalized << "\n\n";
        if (result.nl_rule) s << "Rule:\n" << serialize_rule_text(*result.nl_rule) << "\n";
        if (result.merged_rule) s << "Merged:\n" << serialize_rule_text(*result.merged_rule) << "\n";
        if (result.grounded) {
            s << "Grounded (" << (result.grounded->feasible ? "feasible" : "not feasible") << "):\n";
            for (std::size_t i = 0; i < result.grounded->ta_pairs.size(); ++i) {
                const auto& p = result.grounded->ta_pairs[i];
                s << "  [" << i << "] ";
                for (std::size_t k = 0; k < p.triggers.size(); ++k) s << (k ? " & " : "") << display(p.triggers[k]);
                s << " =>";
                for (const auto& a : p.actions) s << " " << display(a) << ";";
                s << "\n";
            }
            for (const auto& e : result.grounded->errors) s << "  " << to_string(e.code) << ": " << e.message << "\n";
        }
        if (result.error) s << "Error: " << *result.error << "\n";
        emit(o, s.str());
    }
    return result.error ? 2 : 0;
}

std::vector<GroundedRule> load_rules(const std::string& path) {
    const auto doc = read_json(path);
    return in_file(path, [&] {
        std::vector<GroundedRule> rules;
        if (doc.is_array()) {
            for (std::size_t i = 0; i < doc.size(); ++i) {
                try {
                    rules.push_back(grounded_from_json(doc[i]));
                } catch (const SchemaError& e) {
                    throw SchemaError("/" + std::to_string(i) + e.pointer(),
                                      std::string(e.what()).substr(e.pointer().size() + 2));
                }
            }
        } else {
            rules.push_back(grounded_from_json(doc));
        }
        return rules;
    });
}

int cmd_simulate(const Options& o, const std::vector<std::string>& rule_files, const std::string& events_path,
                 std::optional<std::int64_t> until) {
    check_format(o);
    const auto config = resolve_config(o);
    Engine engine(load_catalog_checked(config));
    for (const auto& path : rule_files)
        for (const auto& rule : load_rules(path)) {
            try {
                engine.deploy(rule);
            } catch (const DeploymentError& e) {
                throw InputError(path + ": " + e.what());
            }
        }

    std::vector<SimEvent> events;
    if (!events_path.empty()) {
        const auto doc = read_json(events_path);
        events = in_file(events_path, [&] { return load_event_script(doc); });
    }
    in_file(events_path, [&] {
        for (const auto& e : events) engine.inject(e);
        return 0;
    });

    // Without --until, run until nothing is pending (bounded at one day past
    // the last input, since holds can keep maturing).
    if (until) {
        if (*until < engine.now()) throw InputError("--until lies before the last event");
        engine.advance(*until);
    } else {
        const auto limit = engine.now() + 86400;
        while (auto wake = engine.next_wake()) {
            if (*wake > limit) break;
            engine.advance(*wake);
        }
    }

    if (o.format == "json") {
        emit(o, trace_to_jsonl(engine.trace()));
    } else {
        std::ostringstream s;
        s << std::left << std::setw(8) << "at" << std::setw(20) << "target" << std::setw(16) << "interface"
          << std::setw(14) << "parameter" << "rule/pair\n";
        for (const auto& e : engine.trace())
            s << std::left << std::setw(8) << e.at << std::setw(20) << e.target << std::setw(16) << e.interface
              << std::setw(14) << e.parameter << e.rule << "/" << e.pair << "\n";
        emit(o, s.str());
    }
    return 0;
}

std::string corpus_path(const std::string& corpus) {
    if (corpus == "bundled") return (fs::path(AWAREAUTO_DATA_DIR) / "corpus" / "bundled.json").string();
    return corpus;
}

int cmd_eval(const Options& o, const std::string& corpus, unsigned threads) {
    check_format(o);
    const auto path = corpus_path(corpus);
    const auto cases = in_file(path, [&] { return load_corpus_file(path); });
    const auto config = resolve_config(o);
    const auto pipeline = make_pipeline(config);
    const auto report = run_corpus(cases, *pipeline, threads);
    emit(o, o.format == "json" ? report.to_json().dump(2) + "\n" : report.to_table());
    return 0;
}

int cmd_record(const Options& o, const std::string& corpus) {
    const auto path = corpus_path(corpus);
    const auto cases = in_file(path, [&] { return load_corpus_file(path); });
    auto config = resolve_config(o);
    config.backend.kind = llm::BackendKind::recording;
    const auto pipeline = make_pipeline(config);
    int failures = 0;
    for (const auto& c : cases) {
        try {
            const auto r = pipeline->run(c.expression, c.snapshot, c.base_nl);
            std::cerr << c.id << ": " << (r.error ? "error: " + *r.error : "recorded") << "\n";
            failures += r.error.has_value();
        } catch (const Error& e) {
            std::cerr << c.id << ": " << e.what() << "\n";
            ++failures;
        }
    }
    std::cerr << "fixtures in " << config.backend.fixture_dir.string() << "\n";
    return failures ? 2 : 0;
}

int cmd_serve(const Options& o, const std::string& listen) {
    auto config = resolve_config(o);
    if (!listen.empty()) {
        auto doc = nlohmann::json{{"listen", listen}};
        const auto parsed = in_file("--listen", [&] { return service_config_from_json(doc); });
        config.host = parsed.host;
        config.port = parsed.port;
    }
    load_catalog_checked(config);
    try {
        return serve(config);
    } catch (const llm::CredentialError& e) {
        throw InputError(e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"awareauto: multimodal expressions to smart-home automation rules"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config, "service/pipeline config (JSON)");
    app.add_option("--catalog", o.catalog, "device catalog (JSON)");
    app.add_option("--backend", o.backend, "remote, scripted or recording");
    app.add_option("--fixtures", o.fixtures, "fixture directory for scripted/recording backends");
    app.add_option("--prompts", o.prompts, "prompt template directory");
    app.add_option("--endpoint", o.endpoint, "chat-completions URL for the remote backend");
    app.add_option("--model", o.model, "model name for the remote backend");
    app.add_option("--out", o.out, "write output here instead of stdout");
    app.add_option("--format", o.format, "json or table");

    std::string input;
    auto* pipeline = app.add_subcommand("pipeline", "expression JSON -> rule text + grounded JSON");
    pipeline->add_option("input", input, "expression JSON ({expression, snapshot} or a bare expression)")->required();

    std::vector<std::string> rules;
    std::string events;
    std::optional<std::int64_t> until;
    auto* simulate = app.add_subcommand("simulate", "grounded rules + event script -> action trace");
    simulate->add_option("--rules", rules, "grounded rule JSON (object or array); repeatable")->required();
    simulate->add_option("--events", events, "event script (JSON array of events)");
    simulate->add_option("--until", until, "advance the clock to this time (s)");

    std::string corpus = "bundled";
    unsigned threads = 0;
    auto* eval = app.add_subcommand("eval", "score a labeled corpus");
    eval->add_option("--corpus", corpus, "corpus JSON, or 'bundled'");
    eval->add_option("--threads", threads, "worker threads (0: all cores)");

    auto* record = app.add_subcommand("record", "run a corpus against a live model and store fixtures");
    record->add_option("--corpus", corpus, "corpus JSON, or 'bundled'");

    std::string listen;
    auto* serve_cmd = app.add_subcommand("serve", "start the HTTP service");
    serve_cmd->add_option("--listen", listen, "host:port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (pipeline->parsed()) return cmd_pipeline(o, input);
        if (simulate->parsed()) return cmd_simulate(o, rules, events, until);
        if (eval->parsed()) return cmd_eval(o, corpus, threads);
        if (record->parsed()) return cmd_record(o, corpus);
        if (serve_cmd->parsed()) return cmd_serve(o, listen);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const PipelineFailure& e) {
        std::cerr << "pipeline failure: " << e.what() << "\n";
        return 2;
    } catch (const llm::MissingFixtureError& e) {
        std::cerr << "pipeline failure: " << e.what() << "\n";
        return 2;
    } catch (const llm::TransportError& e) {
        std::cerr << "pipeline failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
