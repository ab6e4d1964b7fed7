// Turns data/corpus/responses.json and data/sessions/*.json into scripted
// fixtures by replaying the canned model answers through the real pipeline
// and service, so every fixture key matches the prompt actually sent.
//
//   seed_fixtures [--data DIR] [--clean]

#include "awareauto/catalog.hpp"
#include "awareauto/eval.hpp"
#include "awareauto/grounding.hpp"
#include "awareauto/llm.hpp"
#include "awareauto/pipeline.hpp"
#include "awareauto/prompts.hpp"
#include "awareauto/service.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <deque>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace awareauto;

namespace {

// Answers grounding requests and reasoning requests from separate queues.
class QueueBackend : public llm::Backend {
public:
    explicit QueueBackend(std::string grounding_prompt) : grounding_prompt_(std::move(grounding_prompt)) {}

    void load(const json& reasoning, const json& grounding) {
        reasoning_.assign(reasoning.begin(), reasoning.end());
        grounding_.assign(grounding.begin(), grounding.end());
    }
    bool drained() const { return reasoning_.empty() && grounding_.empty(); }

    std::string complete(const llm::CompletionRequest& request) override {
        auto& queue = request.system_prompt == grounding_prompt_ ? grounding_ : reasoning_;
        if (queue.empty())
            throw Error(std::string("no canned ") + (&queue == &grounding_ ? "grounding" : "reasoning") +
                        " answer left for:\n" + request.user_message);
        auto out = queue.front().get<std::string>();
        queue.pop_front();
        return out;
    }

private:
    std::string grounding_prompt_;
    std::deque<json> reasoning_;
    std::deque<json> grounding_;
};

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read " + path.string());
    return json::parse(in);
}

std::string describe(const CaseScore& s) {
    auto b = [](bool v) { return v ? "1" : "0"; };
    return std::string("correct=") + b(s.correctness) + " complete=" + b(s.completeness) + " exec=" + b(s.executability) +
           " env=" + b(s.env_conformance);
}

bool seed_corpus(const fs::path& data, const Pipeline& pipeline, QueueBackend& queue) {
    auto corpus = load_corpus_file((data / "corpus" / "bundled.json").string());
    auto responses = read_json(data / "corpus" / "responses.json");
    bool ok = true;
    for (const auto& c : corpus) {
        const auto& r = responses.at(c.id);
        queue.load(r.at("reasoning"), r.at("grounding"));
        auto result = pipeline.run(c.expression, c.snapshot, c.base_nl);
        if (result.error) {
            std::cerr << c.id << ": " << *result.error << "\n";
            ok = false;
            continue;
        }
        auto score = score_case(c, *result.nl_rule, *result.grounded, pipeline.catalog());
        if (!score.success || !queue.drained()) {
            std::cerr << c.id << ": " << describe(score) << (queue.drained() ? "" : " (unused answers)") << "\n";
            ok = false;
        }
    }
    std::cout << "corpus: " << corpus.size() << " cases\n";
    return ok;
}

bool seed_session(const fs::path& path, const std::shared_ptr<const Pipeline>& pipeline, QueueBackend& queue) {
    auto flow = read_json(path);
    Service service(pipeline, Engine(pipeline->catalog()));
    auto id = service.create_session().at("id").get<std::string>();
    for (const auto& round : flow.at("rounds")) {
        queue.load(round.at("reasoning"), round.at("grounding"));
        const auto& body = round.at("body");
        json reply;
        if (round.at("kind") == "expression")
            reply = service.submit_expression(id, expression_from_json(body.at("expression")),
                                              snapshot_from_json(body.at("snapshot")));
        else
            reply = service.edit_rule_text(id, body.at("document").get<std::string>());
        if (!queue.drained()) {
            std::cerr << path.filename().string() << ": unused answers in round\n";
            return false;
        }
        const auto& expect = round.at("expect");
        auto codes = json::array();
        for (const auto& e : reply.value("grounding_errors", json::array())) codes.push_back(e.at("code"));
        if (reply.value("feasible", !expect.at("feasible").get<bool>()) != expect.at("feasible") ||
            codes != expect.at("codes")) {
            std::cerr << path.filename().string() << ": round " << reply.value("round", -1)
                      << " did not match its expectation: " << reply.dump() << "\n";
            return false;
        }
    }
    auto reply = service.confirm(id);
    std::cout << path.filename().string() << ": " << reply.dump() << "\n";
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"seed scripted fixtures from canned model answers"};
    std::string data_dir = "data";
    bool clean = false;
    app.add_option("--data", data_dir, "data directory");
    app.add_flag("--clean", clean, "remove existing fixtures first");
    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path data(data_dir);
        const auto fixtures = data / "fixtures";
        if (clean) fs::remove_all(fixtures);
        fs::create_directories(fixtures);

        auto catalog = load_catalog_file((data / "catalog" / "living_room.json").string());
        auto prompts = PromptSet::load(data / "prompts");
        auto queue = std::make_shared<QueueBackend>(build_grounding_prompt(prompts, catalog));
        auto recorder = std::make_shared<llm::RecordingBackend>(queue, fixtures);
        auto pipeline = std::make_shared<const Pipeline>(catalog, prompts, recorder);

        bool ok = seed_corpus(data, *pipeline, *queue);
        if (fs::exists(data / "sessions"))
            for (const auto& entry : fs::directory_iterator(data / "sessions"))
                if (entry.path().extension() == ".json") ok = seed_session(entry.path(), pipeline, *queue) && ok;
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "seed_fixtures: " << e.what() << "\n";
        return 1;
    }
}
