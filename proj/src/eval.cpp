#include "awareauto/eval.hpp"

#include "awareauto/grounded.hpp"
#include "awareauto/grounding.hpp"
#include "awareauto/rule_text.hpp"
#include "awareauto/text.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace awareauto {

namespace {

struct ComplexityName {
    Complexity value;
    std::string_view id;
    std::string_view label;
};

constexpr ComplexityName kComplexityNames[] = {
    {Complexity::multi_parameter, "multi_parameter", "Multi-parameter"},
    {Complexity::dynamic_parameters, "dynamic_parameters", "Dynamic parameters"},
    {Complexity::multimodal_parameters, "multimodal_parameters", "Multimodal parameters"},
    {Complexity::fuzzy_expression, "fuzzy_expression", "Fuzzy expression"},
    {Complexity::redundant_expressions, "redundant_expressions", "Redundant expressions"},
    {Complexity::complex_branch, "complex_branch", "Complex branch"},
    {Complexity::time_related_trigger, "time_related_trigger", "Time-related trigger"},
    {Complexity::time_dependent_action, "time_dependent_action", "Time-dependent action"},
    {Complexity::combination, "combination", "Combination"},
};

const ComplexityName& entry(Complexity c) {
    for (const auto& n : kComplexityNames)
        if (n.value == c) return n;
    throw InvalidArgument("unknown complexity");
}

} // namespace

std::string_view to_string(Complexity c) { return entry(c).id; }
std::string_view table_label(Complexity c) { return entry(c).label; }

Complexity parse_complexity(std::string_view s) {
    for (const auto& n : kComplexityNames)
        if (text::iequals(text::trim(s), n.id)) return n.value;
    throw InvalidArgument("unknown complexity class '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

namespace {

const nlohmann::json& require(const nlohmann::json& doc, const std::string& base, const char* name) {
    if (!doc.contains(name)) throw SchemaError(base + "/" + name, "missing field");
    return doc.at(name);
}

std::string require_string(const nlohmann::json& doc, const std::string& base, const char* name) {
    const auto& v = require(doc, base, name);
    if (!v.is_string()) throw SchemaError(base + "/" + name, "expected a string");
    return v.get<std::string>();
}

NLRule rule_text_at(const nlohmann::json& v, const std::string& pointer) {
    if (!v.is_string()) throw SchemaError(pointer, "expected a rule-text string");
    try {
        return parse_rule_text(v.get<std::string>());
    } catch (const ParseError& e) {
        throw SchemaError(pointer, e.what());
    }
}

template <class F>
auto nested(const std::string& pointer, F&& f) {
    try {
        return f();
    } catch (const SchemaError& e) {
        throw SchemaError(pointer + (e.pointer() == "/" ? "" : e.pointer()),
                          std::string(e.what()).substr(e.pointer().size() + 2));
    } catch (const InvalidArgument& e) {
        throw SchemaError(pointer, e.what());
    }
}

} // namespace

EvalCase eval_case_from_json(const nlohmann::json& doc, const std::string& base) {
    if (!doc.is_object()) throw SchemaError(base.empty() ? "/" : base, "expected an object");
    EvalCase c;
    c.id = require_string(doc, base, "id");
    if (text::trim(c.id).empty()) throw SchemaError(base + "/id", "empty id");
    const auto complexity = require_string(doc, base, "complexity");
    c.complexity = nested(base + "/complexity", [&] { return parse_complexity(complexity); });

    const auto& input = require(doc, base, "input");
    if (!input.is_object()) throw SchemaError(base + "/input", "expected an object");
    const auto& expression = require(input, base + "/input", "expression");
    c.expression = nested(base + "/input/expression", [&] { return expression_from_json(expression); });
    if (input.contains("snapshot"))
        c.snapshot = nested(base + "/input/snapshot", [&] { return snapshot_from_json(input.at("snapshot")); });

    c.gold_nl = rule_text_at(require(doc, base, "gold_nl"), base + "/gold_nl");
    if (doc.contains("base_nl") && !doc.at("base_nl").is_null()) c.base_nl = rule_text_at(doc.at("base_nl"), base + "/base_nl");

    const bool has_grounded = doc.contains("gold_grounded") && !doc.at("gold_grounded").is_null();
    const bool has_reason = doc.contains("gold_infeasible_reason") && !doc.at("gold_infeasible_reason").is_null();
    if (has_grounded == has_reason)
        throw SchemaError(base, "exactly one of gold_grounded and gold_infeasible_reason is required");
    if (has_grounded) {
        c.gold_grounded = nested(base + "/gold_grounded", [&] { return grounded_from_json(doc.at("gold_grounded")); });
    } else {
        const auto& codes = doc.at("gold_infeasible_reason");
        if (!codes.is_array() || codes.empty())
            throw SchemaError(base + "/gold_infeasible_reason", "expected a non-empty array of error codes");
        std::set<ErrorCode> set;
        for (std::size_t i = 0; i < codes.size(); ++i) {
            const auto ptr = base + "/gold_infeasible_reason/" + std::to_string(i);
            if (!codes[i].is_string()) throw SchemaError(ptr, "expected an error code string");
            set.insert(nested(ptr, [&] { return parse_error_code(codes[i].get<std::string>()); }));
        }
        c.gold_infeasible_reason = std::move(set);
    }
    return c;
}

nlohmann::json to_json(const EvalCase& c) {
    nlohmann::json doc{{"id", c.id},
                       {"complexity", to_string(c.complexity)},
                       {"input", {{"expression", to_json(c.expression)}, {"snapshot", to_json(c.snapshot)}}},
                       {"gold_nl", serialize_rule_text(c.gold_nl)}};
    if (c.base_nl) doc["base_nl"] = serialize_rule_text(*c.base_nl);
    if (c.gold_grounded) doc["gold_grounded"] = to_json(*c.gold_grounded);
    if (c.gold_infeasible_reason) {
        auto codes = nlohmann::json::array();
        for (auto code : *c.gold_infeasible_reason) codes.push_back(to_string(code));
        doc["gold_infeasible_reason"] = codes;
    }
    return doc;
}

std::vector<EvalCase> load_corpus(const nlohmann::json& doc) {
    if (!doc.is_array()) throw SchemaError("/", "a corpus is a JSON array of cases");
    std::vector<EvalCase> out;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto base = "/" + std::to_string(i);
        out.push_back(eval_case_from_json(doc[i], base));
        if (!ids.insert(out.back().id).second) throw SchemaError(base + "/id", "duplicate case id '" + out.back().id + "'");
    }
    return out;
}

std::vector<EvalCase> load_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open corpus " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("/", path + ": " + e.what());
    }
    return load_corpus(doc);
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

namespace {

// A group with trigger ids already mapped into the prediction's numbering.
using GroupShape = std::pair<std::vector<int>, std::vector<std::int64_t>>;

std::vector<std::int64_t> step_shape(const ActionGroup& g) {
    std::vector<std::int64_t> out;
    for (const auto& s : g.steps) out.push_back(s.kind == StepKind::wait ? s.wait.seconds() : -1);
    return out;
}

std::vector<GroupShape> shapes(const NLRule& rule, const std::map<int, int>& ids) {
    std::vector<GroupShape> out;
    for (const auto& g : rule.groups) {
        std::vector<int> triggers;
        for (int t : g.trigger_ids) triggers.push_back(ids.count(t) ? ids.at(t) : -1000 - t);
        std::sort(triggers.begin(), triggers.end());
        out.emplace_back(std::move(triggers), step_shape(g));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool same_name(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || text::normalize_phrase(*a) == text::normalize_phrase(*b);
}

} // namespace

bool same_logic(const NLRule& gold, const NLRule& predicted) {
    if (gold.operation != predicted.operation || !same_name(gold.name, predicted.name)) return false;
    if (gold.triggers.size() != predicted.triggers.size() || gold.groups.size() != predicted.groups.size()) return false;

    std::map<int, int> identity{{kNameTriggerId, kNameTriggerId}};
    for (const auto& t : predicted.triggers) identity[t.id] = t.id;
    const auto target = shapes(predicted, identity);

    std::vector<std::size_t> perm(predicted.triggers.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::map<int, int> ids{{kNameTriggerId, kNameTriggerId}};
        bool ok = true;
        for (std::size_t i = 0; i < gold.triggers.size() && ok; ++i) {
            const auto& g = gold.triggers[i];
            const auto& p = predicted.triggers[perm[i]];
            ok = g.mode == p.mode && g.delay == p.delay;
            ids[g.id] = p.id;
        }
        if (ok && shapes(gold, ids) == target) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

bool covers(const NLRule& gold, const NLRule& predicted) {
    for (const auto& g : gold.triggers) {
        const auto want = text::normalize_phrase(g.description);
        const bool found = std::any_of(predicted.triggers.begin(), predicted.triggers.end(), [&](const TriggerSpec& p) {
            return p.mode == g.mode && p.delay == g.delay && text::normalize_phrase(p.description) == want;
        });
        if (!found) return false;
    }
    for (const auto& gg : gold.groups) {
        for (const auto& s : gg.steps) {
            const bool found = std::any_of(predicted.groups.begin(), predicted.groups.end(), [&](const ActionGroup& pg) {
                return std::any_of(pg.steps.begin(), pg.steps.end(), [&](const ActionStep& p) {
                    if (p.kind != s.kind) return false;
                    return s.kind == StepKind::wait ? p.wait == s.wait
                                                    : text::normalize_phrase(p.text) == text::normalize_phrase(s.text);
                });
            });
            if (!found) return false;
        }
    }
    return true;
}

CaseScore score_case(const EvalCase& c, const NLRule& predicted_nl, const GroundedRule& predicted_grounded,
                     const DeviceCatalog& catalog) {
    CaseScore s;
    s.correctness = same_logic(c.gold_nl, predicted_nl);
    s.completeness = covers(c.gold_nl, predicted_nl);

    const auto validated = validate_grounded(catalog, predicted_grounded);
    const bool gold_feasible = c.gold_grounded && c.gold_grounded->feasible;
    s.executability = validated.feasible || (!gold_feasible && !validated.feasible);

    if (gold_feasible) {
        s.env_conformance = validated.feasible && rules_equivalent(validated, *c.gold_grounded);
    } else {
        std::set<ErrorCode> expected;
        if (c.gold_infeasible_reason) expected = *c.gold_infeasible_reason;
        if (c.gold_grounded)
            for (const auto& e : c.gold_grounded->errors) expected.insert(e.code);
        std::set<ErrorCode> got;
        for (const auto& e : validated.errors) got.insert(e.code);
        s.env_conformance = !validated.feasible && got == expected;
    }
    s.success = s.correctness && s.completeness && s.executability && s.env_conformance;
    return s;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

std::string format_rate(std::size_t count, std::size_t total, int decimals) {
    if (total == 0) return "n/a";
    if (decimals < 0 || decimals > 6) throw InvalidArgument("decimals out of range");
    std::uint64_t scale = 1;
    for (int i = 0; i < decimals; ++i) scale *= 10;
    const std::uint64_t scaled = (std::uint64_t(count) * 100 * scale * 2 + total) / (2 * std::uint64_t(total));
    std::string out = std::to_string(scaled / scale);
    if (decimals > 0) {
        auto frac = std::to_string(scaled % scale);
        out += "." + std::string(decimals - frac.size(), '0') + frac;
    }
    return out;
}

void Tally::add(const CaseScore& s) {
    ++cases;
    correctness += s.correctness;
    completeness += s.completeness;
    executability += s.executability;
    env_conformance += s.env_conformance;
    success += s.success;
}

EvalReport build_report(std::vector<CaseResult> results) {
    EvalReport r;
    std::sort(results.begin(), results.end(), [](const CaseResult& a, const CaseResult& b) { return a.id < b.id; });
    r.cases = std::move(results);
    std::map<Complexity, Tally> by_class;
    for (const auto& c : r.cases) {
        by_class[c.complexity].add(c.score);
        r.overall.add(c.score);
    }
    for (auto c : kAllComplexities)
        if (by_class.count(c)) r.classes.emplace_back(c, by_class[c]);
    return r;
}

namespace {

constexpr const char* kScoringNote =
    "Correctness and completeness are graded structurally against gold labels, not by human judgment.";

nlohmann::json tally_json(const Tally& t) {
    nlohmann::json counts{{"correctness", t.correctness},     {"completeness", t.completeness},
                          {"executability", t.executability}, {"env_conformance", t.env_conformance},
                          {"success", t.success}};
    nlohmann::json rates;
    for (auto& [k, v] : counts.items()) rates[k] = format_rate(v.get<std::size_t>(), t.cases);
    return {{"cases", t.cases}, {"counts", counts}, {"rates", rates}};
}

} // namespace

nlohmann::json EvalReport::to_json() const {
    nlohmann::json doc;
    doc["note"] = kScoringNote;
    doc["cases"] = overall.cases;
    if (cases.empty()) {
        doc["status"] = "no cases";
        doc["classes"] = nlohmann::json::array();
        return doc;
    }
    auto rows = nlohmann::json::array();
    for (const auto& [c, t] : classes) {
        auto row = tally_json(t);
        row["class"] = to_string(c);
        row["label"] = table_label(c);
        rows.push_back(row);
    }
    doc["classes"] = rows;
    doc["overall"] = tally_json(overall);
    doc["overall"]["intent_consistency"] =
        format_rate(std::count_if(cases.begin(), cases.end(),
                                  [](const CaseResult& c) { return c.score.correctness && c.score.completeness; }),
                    overall.cases, 2);
    doc["overall"]["feasibility"] =
        format_rate(std::count_if(cases.begin(), cases.end(),
                                  [](const CaseResult& c) { return c.score.executability && c.score.env_conformance; }),
                    overall.cases, 2);
    auto per_case = nlohmann::json::array();
    for (const auto& c : cases) {
        nlohmann::json item{{"id", c.id},
                            {"class", to_string(c.complexity)},
                            {"correctness", c.score.correctness},
                            {"completeness", c.score.completeness},
                            {"executability", c.score.executability},
                            {"env_conformance", c.score.env_conformance},
                            {"success", c.score.success}};
        if (c.failure) item["failure"] = *c.failure;
        per_case.push_back(item);
    }
    doc["case_results"] = per_case;
    return doc;
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    out << "# " << kScoringNote << "\n";
    if (cases.empty()) {
        out << "no cases\n";
        return out.str();
    }
    const std::vector<std::string> header{"Rule Type", "Correctness", "Completeness", "Executability", "Env Conformance",
                                          "Success Rate"};
    std::vector<std::vector<std::string>> rows;
    auto add_row = [&](const std::string& label, const Tally& t) {
        rows.push_back({label + "(" + std::to_string(t.cases) + ")", format_rate(t.correctness, t.cases),
                        format_rate(t.completeness, t.cases), format_rate(t.executability, t.cases),
                        format_rate(t.env_conformance, t.cases), format_rate(t.success, t.cases)});
    };
    for (const auto& [c, t] : classes) add_row(std::string(table_label(c)), t);
    add_row("Overall", overall);

    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());

    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i == 0)
                out << std::left << std::setw(int(width[i])) << cells[i];
            else
                out << "  " << std::right << std::setw(int(width[i])) << cells[i];
        }
        out << "\n";
    };
    out << std::left << std::setw(int(width[0])) << "" << "  "
        << std::setw(int(width[1] + 2 + width[2])) << "Intent Consistency" << "  "
        << std::setw(int(width[3] + 2 + width[4])) << "Feasibility" << "\n";
    line(header);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out << std::string(total + 2 * (width.size() - 1), '-') << "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i + 1 == rows.size()) out << std::string(total + 2 * (width.size() - 1), '-') << "\n";
        line(rows[i]);
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Corpus run
// ---------------------------------------------------------------------------

namespace {

CaseResult run_case(const EvalCase& c, const Pipeline& pipeline) {
    CaseResult r{c.id, c.complexity, {}, std::nullopt};
    try {
        const auto result = pipeline.run(c.expression, c.snapshot, c.base_nl);
        if (result.error) {
            r.failure = *result.error;
            return r;
        }
        r.score = score_case(c, *result.nl_rule, *result.grounded, pipeline.catalog());
    } catch (const std::exception& e) {
        r.failure = e.what();
        r.score = {};
    }
    return r;
}

} // namespace

EvalReport run_corpus(const std::vector<EvalCase>& corpus, const Pipeline& pipeline, unsigned threads) {
    std::vector<CaseResult> results(corpus.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, std::max<std::size_t>(1, corpus.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < corpus.size(); i = next++) results[i] = run_case(corpus[i], pipeline);
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return build_report(std::move(results));
}

} // namespace awareauto
