// Python bindings. Structured values cross the boundary as JSON text; the
// package __init__ turns them into dicts.

#include "awareauto/catalog.hpp"
#include "awareauto/engine.hpp"
#include "awareauto/eval.hpp"
#include "awareauto/grounded.hpp"
#include "awareauto/grounding.hpp"
#include "awareauto/normalizer.hpp"
#include "awareauto/rule_text.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace awareauto;
using nlohmann::json;

namespace {

std::string normalize(const std::string& expression, const std::string& snapshot) {
    return normalize_expression(expression_from_json(json::parse(expression)),
                                snapshot.empty() ? ContextSnapshot{} : snapshot_from_json(json::parse(snapshot)));
}

// Canonical text of a rule document; raises on parse errors.
std::string reformat_rule_text(const std::string& document) { return serialize_rule_text(parse_rule_text(document)); }

std::string validate(const std::string& catalog_path, const std::string& rule) {
    const auto catalog = load_catalog_file(catalog_path);
    return to_json(validate_grounded(catalog, parse_grounded_json(rule))).dump();
}

std::string simulate(const std::string& catalog_path, const std::string& rules, const std::string& events,
                     std::optional<std::int64_t> until) {
    Engine engine(load_catalog_file(catalog_path));
    const auto doc = json::parse(rules);
    if (doc.is_array())
        for (const auto& r : doc) engine.deploy(grounded_from_json(r));
    else
        engine.deploy(grounded_from_json(doc));
    for (const auto& e : load_event_script(json::parse(events))) engine.inject(e);
    if (until) engine.advance(*until);
    auto out = json::array();
    for (const auto& e : engine.trace()) out.push_back(to_json(e));
    return out.dump();
}

std::string evaluate(const std::string& corpus_path, const std::string& catalog_path, const std::string& prompt_dir,
                     const std::string& fixture_dir) {
    Pipeline pipeline(load_catalog_file(catalog_path), PromptSet::load(prompt_dir),
                      std::make_shared<llm::ScriptedBackend>(fixture_dir));
    py::gil_scoped_release release;
    return run_corpus(load_corpus_file(corpus_path), pipeline).to_json().dump();
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "awareauto native core";

    // Translators are tried newest first, so the base goes in first.
    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
    py::register_exception<DeploymentError>(m, "DeploymentError", base.ptr());

    m.def("default_data_dir", [] { return std::string(AWAREAUTO_DATA_DIR); });
    m.def("normalize", &normalize, py::arg("expression"), py::arg("snapshot") = "");
    m.def("describe", [](const std::string& e) { return describe_expression(expression_from_json(json::parse(e))); });
    m.def("reformat_rule_text", &reformat_rule_text, py::arg("document"));
    m.def("format_rate", &format_rate, py::arg("count"), py::arg("total"), py::arg("decimals") = 1);
    m.def("display_trigger", [](const std::string& s) { return display(parse_trigger_tuple(s)); });
    m.def("display_action", [](const std::string& s) { return display(parse_action_tuple(s)); });
    m.def("validate", &validate, py::arg("catalog_path"), py::arg("rule"));
    m.def("simulate", &simulate, py::arg("catalog_path"), py::arg("rules"), py::arg("events"), py::arg("until") = py::none());
    m.def("evaluate", &evaluate, py::arg("corpus_path"), py::arg("catalog_path"), py::arg("prompt_dir"),
          py::arg("fixture_dir"));
}
