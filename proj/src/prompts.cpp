#include "awareauto/prompts.hpp"

#include "awareauto/error.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace awareauto {

const std::string_view kRuleTextGrammar = R"(OPERATION: CREATE|MODIFY|DELETE
NAME: <text>|NONE
TRIGGERS:
  T<i> | EVENT | <text>
  T<i> | STATE | <text>
  T<i> | STATE(<int><unit>) | <text>
ACTIONS:
  G<k> WHEN T<i>[,T<j>...]:
    A<m> | <text>
    A<m> | WAIT <int><unit>)";

const std::string_view kGroundedJsonSchema = R"({
  "operation": "create" | "modify" | "delete",
  "name": <string> | null,
  "feasible": <bool>,
  "ta_pairs": [
    {
      "triggers": [{"target": <string>, "interface": <string>, "condition": <string>, "mode": "event" | "state", "delay_s": <int>}],
      "actions": [{"target": <string>, "interface": <string>, "parameter": <string>}]
    }
  ],
  "errors": [{"code": "UNKNOWN_TARGET" | "UNKNOWN_INTERFACE" | "BAD_CONDITION" | "BAD_PARAMETER" | "UNSUPPORTED_CAPABILITY" | "MALFORMED_OUTPUT", "target": <string> | null, "interface": <string> | null, "message": <string>}]
})";

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read prompt file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Template files end with a newline that should not leak into the prompt.
std::string chomp(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

} // namespace

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    std::size_t pos = 0;
    std::map<std::string, int> used;
    while (pos < tmpl.size()) {
        auto open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        auto close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) throw InvalidArgument("unterminated placeholder in template");
        out.append(tmpl.substr(pos, open - pos));
        const std::string key(tmpl.substr(open + 2, close - open - 2));
        auto it = values.find(key);
        if (it == values.end()) throw InvalidArgument("template placeholder {{" + key + "}} has no value");
        out += it->second;
        ++used[key];
        pos = close + 2;
    }
    for (const auto& [key, value] : values)
        if (!used.count(key)) throw InvalidArgument("template is missing placeholder {{" + key + "}}");
    return out;
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
    PromptSet p;
    p.reasoning_template = chomp(read_file(dir / "reasoning_template.txt"));
    p.reasoning_format = chomp(read_file(dir / "reasoning_format.txt"));
    p.reasoning_details = chomp(read_file(dir / "reasoning_details.txt"));
    p.grounding_template = chomp(read_file(dir / "grounding_template.txt"));
    p.grounding_format = chomp(read_file(dir / "grounding_format.txt"));
    p.grounding_details = chomp(read_file(dir / "grounding_details.txt"));
    p.grounding_example = chomp(read_file(dir / "grounding_example.txt"));

    const auto examples_path = dir / "reasoning_examples.json";
    auto doc = nlohmann::json::parse(read_file(examples_path), nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) throw SchemaError("", examples_path.string() + " must be a JSON array");
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& e = doc[i];
        if (!e.is_object() || !e.contains("input") || !e.contains("output") || !e["input"].is_string() ||
            !e["output"].is_string())
            throw SchemaError("/" + std::to_string(i), "example needs string fields input and output");
        p.examples.push_back({e["input"].get<std::string>(), chomp(e["output"].get<std::string>())});
    }
    return p;
}

} // namespace awareauto
