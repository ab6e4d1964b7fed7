#include "awareauto/rule_text.hpp"

#include "awareauto/error.hpp"
#include "awareauto/text.hpp"

#include <charconv>
#include <map>
#include <set>

namespace awareauto {

namespace {

enum class Section { start, operation_done, name_done, triggers, actions };

// Line being parsed plus the offset of the view inside it, so errors can
// report a column.
struct LineCursor {
    std::string_view full;
    std::string_view rest;
    int number;

    int column() const { return static_cast<int>(rest.data() - full.data()) + 1; }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, number, column()); }

    void skip_space() {
        while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
    }

    bool eat(char c) {
        skip_space();
        if (rest.empty() || rest.front() != c) return false;
        rest.remove_prefix(1);
        return true;
    }

    bool eat_keyword(std::string_view kw) {
        skip_space();
        if (!text::starts_with_ci(rest, kw)) return false;
        rest.remove_prefix(kw.size());
        return true;
    }

    // `<prefix><digits>`; returns the number.
    int expect_id(char prefix) {
        skip_space();
        if (rest.empty() || (rest.front() != prefix && rest.front() != prefix + ('a' - 'A')))
            fail(std::string("expected ") + prefix + "<number>");
        rest.remove_prefix(1);
        int value = 0;
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
        if (ec != std::errc{} || ptr == rest.data()) fail(std::string("expected a number after '") + prefix + "'");
        rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
        return value;
    }
};

bool header_is(std::string_view line, std::string_view kw) {
    auto t = text::trim(line);
    return text::starts_with_ci(t, kw) && t.size() >= kw.size();
}

TriggerSpec parse_trigger_line(LineCursor& c) {
    TriggerSpec t;
    t.id = c.expect_id('T');
    if (!c.eat('|')) c.fail("expected '|' after trigger id");
    c.skip_space();
    if (c.eat_keyword("EVENT")) {
        t.mode = TriggerMode::event;
    } else if (c.eat_keyword("STATE")) {
        t.mode = TriggerMode::state;
        if (!c.rest.empty() && c.rest.front() == '(') {
            c.rest.remove_prefix(1);
            auto close = c.rest.find(')');
            if (close == std::string_view::npos) c.fail("missing ')' after STATE delay");
            auto d = Duration::try_parse(text::trim(c.rest.substr(0, close)));
            if (!d) c.fail("invalid delay '" + std::string(c.rest.substr(0, close)) + "'");
            t.delay = *d;
            c.rest.remove_prefix(close + 1);
        }
    } else {
        c.fail("expected EVENT, STATE or STATE(<duration>)");
    }
    if (!c.eat('|')) c.fail("expected '|' after trigger mode");
    c.skip_space();
    t.description = std::string(text::trim(c.rest));
    if (t.description.empty()) c.fail("trigger description is empty");
    return t;
}

ActionStep parse_step_line(LineCursor& c) {
    ActionStep s;
    s.id = c.expect_id('A');
    if (!c.eat('|')) c.fail("expected '|' after step id");
    c.skip_space();
    auto body = text::trim(c.rest);
    if (body.empty()) c.fail("action step is empty");
    if (text::starts_with_ci(body, "WAIT ")) {
        auto arg = text::trim(body.substr(5));
        if (auto d = Duration::try_parse(arg)) {
            if (d->is_zero()) c.fail("WAIT duration must be positive");
            s.kind = StepKind::wait;
            s.wait = *d;
            return s;
        }
        c.rest = c.rest.substr(static_cast<std::size_t>(arg.data() - c.rest.data()));
        c.fail("invalid WAIT duration '" + std::string(arg) + "'");
    }
    s.kind = StepKind::command;
    s.text = std::string(body);
    return s;
}

struct GroupRef {
    int trigger;
    int line;
    int column;
};

} // namespace

NLRule parse_rule_text(std::string_view document) {
    NLRule rule;
    Section section = Section::start;
    ActionGroup* current = nullptr;
    std::map<int, int> trigger_lines;
    std::vector<GroupRef> refs;
    int last_line = 0;

    const auto lines = text::split_lines(document);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        LineCursor c{lines[i], lines[i], number};
        c.skip_space();
        if (text::trim(c.rest).empty()) continue;
        last_line = number;

        if (section == Section::start) {
            if (!c.eat_keyword("OPERATION:")) c.fail("expected 'OPERATION:'");
            try {
                rule.operation = parse_operation(text::trim(c.rest));
            } catch (const InvalidArgument&) {
                c.skip_space();
                c.fail("expected CREATE, MODIFY or DELETE");
            }
            section = Section::operation_done;
            continue;
        }
        if (section == Section::operation_done) {
            if (!c.eat_keyword("NAME:")) c.fail("expected 'NAME:'");
            auto name = text::trim(c.rest);
            if (name.empty()) {
                c.skip_space();
                c.fail("NAME must be text or NONE");
            }
            if (name != "NONE") rule.name = std::string(name);
            section = Section::name_done;
            continue;
        }
        if (section == Section::name_done) {
            if (!header_is(c.rest, "TRIGGERS:") || text::trim(c.rest).size() != 9) c.fail("expected 'TRIGGERS:'");
            section = Section::triggers;
            continue;
        }
        if (section == Section::triggers) {
            if (header_is(c.rest, "ACTIONS:") && text::trim(c.rest).size() == 8) {
                section = Section::actions;
                continue;
            }
            const int id_column = c.column();
            auto t = parse_trigger_line(c);
            if (t.id == kNameTriggerId) throw ParseError("T0 is reserved for the rule-name trigger", number, id_column);
            if (!trigger_lines.emplace(t.id, number).second)
                throw ParseError("duplicate trigger id T" + std::to_string(t.id), number, id_column);
            rule.triggers.push_back(std::move(t));
            continue;
        }

        // ACTIONS section: group headers or steps.
        if (text::starts_with_ci(c.rest, "G")) {
            const int id_column = c.column();
            ActionGroup g;
            g.id = c.expect_id('G');
            if (rule.find_group(g.id)) throw ParseError("duplicate group id G" + std::to_string(g.id), number, id_column);
            if (!c.eat_keyword("WHEN")) c.fail("expected 'WHEN' after group id");
            do {
                c.skip_space();
                const int ref_column = c.column();
                int tid = c.expect_id('T');
                for (int existing : g.trigger_ids)
                    if (existing == tid)
                        throw ParseError("trigger T" + std::to_string(tid) + " listed twice", number, ref_column);
                g.trigger_ids.push_back(tid);
                refs.push_back({tid, number, ref_column});
            } while (c.eat(','));
            if (!c.eat(':')) c.fail("expected ':' at end of group header");
            c.skip_space();
            if (!c.rest.empty()) c.fail("unexpected text after group header");
            rule.groups.push_back(std::move(g));
            current = &rule.groups.back();
            continue;
        }
        if (text::starts_with_ci(c.rest, "A")) {
            if (!current) c.fail("action step outside of a group");
            const int id_column = c.column();
            auto s = parse_step_line(c);
            for (const auto& existing : current->steps)
                if (existing.id == s.id)
                    throw ParseError("duplicate step id A" + std::to_string(s.id), number, id_column);
            current->steps.push_back(std::move(s));
            continue;
        }
        c.fail("expected a group header 'G<k> WHEN ...:' or a step 'A<m> | ...'");
    }

    if (section == Section::start) throw ParseError("document is empty; expected 'OPERATION:'", 1, 1);
    if (section == Section::operation_done) throw ParseError("missing 'NAME:' line", last_line + 1, 1);
    if (section == Section::name_done) throw ParseError("missing 'TRIGGERS:' section", last_line + 1, 1);
    if (section == Section::triggers) throw ParseError("missing 'ACTIONS:' section", last_line + 1, 1);

    for (const auto& ref : refs) {
        if (ref.trigger == kNameTriggerId) {
            if (!rule.name) throw ParseError("T0 refers to the rule-name trigger but NAME is NONE", ref.line, ref.column);
            continue;
        }
        if (rule.operation != RuleOperation::modify && !trigger_lines.count(ref.trigger))
            throw ParseError("dangling reference to undefined trigger T" + std::to_string(ref.trigger), ref.line,
                             ref.column);
    }

    try {
        check_invariants(rule);
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), last_line, 0);
    }
    return rule;
}

std::string serialize_rule_text(const NLRule& rule) {
    std::string out;
    out += "OPERATION: ";
    switch (rule.operation) {
    case RuleOperation::create: out += "CREATE"; break;
    case RuleOperation::modify: out += "MODIFY"; break;
    case RuleOperation::remove: out += "DELETE"; break;
    }
    out += "\nNAME: ";
    out += rule.name ? *rule.name : "NONE";
    out += "\nTRIGGERS:\n";
    for (const auto& t : rule.triggers) {
        out += "  T" + std::to_string(t.id) + " | ";
        if (t.mode == TriggerMode::event) out += "EVENT";
        else if (t.delay.is_zero()) out += "STATE";
        else out += "STATE(" + t.delay.str() + ")";
        out += " | " + t.description + "\n";
    }
    out += "ACTIONS:\n";
    for (const auto& g : rule.groups) {
        out += "  G" + std::to_string(g.id) + " WHEN ";
        for (std::size_t i = 0; i < g.trigger_ids.size(); ++i) {
            if (i) out += ",";
            out += "T" + std::to_string(g.trigger_ids[i]);
        }
        out += ":\n";
        for (const auto& s : g.steps) {
            out += "    A" + std::to_string(s.id) + " | ";
            out += s.kind == StepKind::wait ? "WAIT " + s.wait.str() : s.text;
            out += "\n";
        }
    }
    return out;
}

std::string extract_rule_text(std::string_view raw) {
    const auto lines = text::split_lines(raw);
    std::size_t first = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (text::starts_with_ci(text::trim(lines[i]), "OPERATION:")) {
            first = i;
            break;
        }
    }
    if (first == lines.size()) return std::string(raw);
    std::string out;
    for (std::size_t i = first; i < lines.size(); ++i) {
        auto t = text::trim(lines[i]);
        if (t.substr(0, 3) == "```") break;
        out += lines[i];
        out += '\n';
    }
    return out;
}

} // namespace awareauto
