#include "tbsynth/json_io.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "tbsynth/errors.hpp"

namespace tbsynth::json_io {

namespace {

using nlohmann::json;

constexpr const char* kSpecFormat = "tbsynth-spec/1";
constexpr const char* kPlanFormat = "tbsynth-plan/1";
constexpr const char* kControllerFormat = "tbsynth-controller/1";

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw InputError(where + ": " + what);
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void expect_format(const json& j, const char* format) {
    if (!j.is_object()) fail(format, "document is not a JSON object");
    auto it = j.find("format");
    if (it == j.end() || !it->is_string() || it->get<std::string>() != format) {
        fail(format, "missing or wrong \"format\" field");
    }
}

const json& member(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing \"") + key + "\"");
    return *it;
}

std::string get_string(const json& j, const char* key,
                       const std::string& where) {
    const json& v = member(j, key, where);
    if (!v.is_string()) fail(where, std::string("\"") + key + "\" must be a string");
    return v.get<std::string>();
}

/// A bound value: integer, or null for infinity.
std::int64_t get_bound(const json& v, const std::string& where) {
    if (v.is_null()) return kInfinity;
    if (!v.is_number_integer()) fail(where, "bound must be an integer or null");
    return v.get<std::int64_t>();
}

json bound_to_json(std::int64_t bound) {
    return bound == kInfinity ? json(nullptr) : json(bound);
}

// --- spec documents --------------------------------------------------------

StateVariable parse_variable(const json& j, bool& eve_owned) {
    if (!j.is_object()) fail("variable", "entry must be an object");
    StateVariable var;
    var.name = get_string(j, "name", "variable");
    const std::string where = "variable " + var.name;

    const json& values = member(j, "values", where);
    if (!values.is_array()) fail(where, "\"values\" must be an array");
    for (const json& v : values) {
        if (!v.is_string()) fail(where, "values must be strings");
        var.values.push_back(v.get<std::string>());
    }

    if (auto it = j.find("transitions"); it != j.end()) {
        if (!it->is_object()) fail(where, "\"transitions\" must be an object");
        for (const auto& [value, list] : it->items()) {
            if (!list.is_array()) fail(where, "transition targets must be an array");
            std::vector<Name> targets;
            for (const json& t : list) {
                if (!t.is_string()) fail(where, "transition targets must be strings");
                targets.push_back(t.get<std::string>());
            }
            var.transitions[value] = std::move(targets);
        }
    }
    for (const Name& value : var.values) {
        var.transitions.try_emplace(value);
    }

    for (const Name& value : var.values) {
        var.durations[value] = DurationBound{};
    }
    if (auto it = j.find("durations"); it != j.end()) {
        if (!it->is_object()) fail(where, "\"durations\" must be an object");
        for (const auto& [value, pair] : it->items()) {
            if (!pair.is_array() || pair.size() != 2) {
                fail(where, "durations must be [min, max] pairs");
            }
            var.durations[value] =
                DurationBound{get_bound(pair[0], where), get_bound(pair[1], where)};
        }
    }

    eve_owned = false;
    if (auto it = j.find("owner"); it != j.end()) {
        const std::string owner = it->is_string() ? it->get<std::string>() : "";
        if (owner == "eve") eve_owned = true;
        else if (owner != "charlie") fail(where, "\"owner\" must be \"charlie\" or \"eve\"");
    }

    const Controllability fallback = eve_owned ? Controllability::Uncontrollable
                                               : Controllability::Controllable;
    for (const Name& value : var.values) {
        var.control[value] = fallback;
    }
    if (auto it = j.find("controllability"); it != j.end()) {
        if (!it->is_object()) fail(where, "\"controllability\" must be an object");
        for (const auto& [value, tag] : it->items()) {
            const std::string text = tag.is_string() ? tag.get<std::string>() : "";
            if (text == "c") var.control[value] = Controllability::Controllable;
            else if (text == "u") var.control[value] = Controllability::Uncontrollable;
            else fail(where, "controllability tags must be \"c\" or \"u\"");
        }
    }
    return var;
}

Quantifier parse_quantifier(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "quantifier must be an object");
    return Quantifier{get_string(j, "token", where),
                      get_string(j, "variable", where),
                      get_string(j, "value", where)};
}

Term parse_term(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "term must be an object");
    const std::string endpoint = get_string(j, "endpoint", where);
    if (endpoint != "start" && endpoint != "end") {
        fail(where, "\"endpoint\" must be \"start\" or \"end\"");
    }
    return Term{endpoint == "start" ? Endpoint::Start : Endpoint::End,
                get_string(j, "token", where)};
}

SyncRule parse_rule(const json& j, bool& domain_role) {
    if (!j.is_object()) fail("rule", "entry must be an object");
    SyncRule rule;
    domain_role = false;
    if (auto it = j.find("role"); it != j.end()) {
        const std::string role = it->is_string() ? it->get<std::string>() : "";
        if (role == "domain") domain_role = true;
        else if (role != "system") fail("rule", "\"role\" must be \"system\" or \"domain\"");
    }
    const json& trigger = member(j, "trigger", "rule");
    if (!trigger.is_null()) {
        rule.trigger = parse_quantifier(trigger, "rule trigger");
    }
    const json& statements = member(j, "statements", "rule");
    if (!statements.is_array()) fail("rule", "\"statements\" must be an array");
    for (const json& s : statements) {
        if (!s.is_object()) fail("rule", "statement must be an object");
        ExistentialStatement statement;
        if (auto it = s.find("quantifiers"); it != s.end()) {
            if (!it->is_array()) fail("rule", "\"quantifiers\" must be an array");
            for (const json& q : *it) {
                statement.quantifiers.push_back(parse_quantifier(q, "quantifier"));
            }
        }
        if (auto it = s.find("atoms"); it != s.end()) {
            if (!it->is_array()) fail("rule", "\"atoms\" must be an array");
            for (const json& a : *it) {
                if (!a.is_object()) fail("rule", "atom must be an object");
                Atom atom;
                atom.lhs = parse_term(member(a, "lhs", "atom"), "atom lhs");
                atom.rhs = parse_term(member(a, "rhs", "atom"), "atom rhs");
                if (auto lower = a.find("lower"); lower != a.end()) {
                    atom.lower = get_bound(*lower, "atom lower");
                }
                if (auto upper = a.find("upper"); upper != a.end()) {
                    atom.upper = get_bound(*upper, "atom upper");
                }
                statement.clause.push_back(std::move(atom));
            }
        }
        rule.statements.push_back(std::move(statement));
    }
    return rule;
}

json quantifier_to_json(const Quantifier& q) {
    return json{{"token", q.token}, {"variable", q.variable}, {"value", q.value}};
}

json term_to_json(const Term& t) {
    return json{{"endpoint", t.endpoint == Endpoint::Start ? "start" : "end"},
                {"token", t.token}};
}

json variable_to_json(const StateVariable& var, const char* owner) {
    json transitions = json::object();
    json durations = json::object();
    json control = json::object();
    for (const Name& value : var.values) {
        transitions[value] = var.transitions.count(value)
                                 ? json(var.transitions.at(value))
                                 : json::array();
        const DurationBound bound = var.durations.count(value)
                                        ? var.durations.at(value)
                                        : DurationBound{};
        durations[value] = json::array({bound_to_json(bound.min),
                                        bound_to_json(bound.max)});
        const bool controllable =
            !var.control.count(value) ||
            var.control.at(value) == Controllability::Controllable;
        control[value] = controllable ? "c" : "u";
    }
    return json{{"name", var.name},       {"values", var.values},
                {"transitions", transitions}, {"durations", durations},
                {"controllability", control}, {"owner", owner}};
}

json rule_to_json(const SyncRule& rule, const char* role) {
    json statements = json::array();
    for (const ExistentialStatement& statement : rule.statements) {
        json quantifiers = json::array();
        for (const Quantifier& q : statement.quantifiers) {
            quantifiers.push_back(quantifier_to_json(q));
        }
        json atoms = json::array();
        for (const Atom& atom : statement.clause) {
            atoms.push_back(json{{"lhs", term_to_json(atom.lhs)},
                                 {"rhs", term_to_json(atom.rhs)},
                                 {"lower", bound_to_json(atom.lower)},
                                 {"upper", bound_to_json(atom.upper)}});
        }
        statements.push_back(json{{"quantifiers", quantifiers}, {"atoms", atoms}});
    }
    json out{{"role", role}, {"statements", statements}};
    out["trigger"] = rule.trigger ? quantifier_to_json(*rule.trigger) : json(nullptr);
    return out;
}

// --- plans and moves -------------------------------------------------------

Action parse_action(const json& j) {
    if (!j.is_object()) fail("action", "entry must be an object");
    const std::string kind = get_string(j, "kind", "action");
    if (kind != "start" && kind != "end") {
        fail("action", "\"kind\" must be \"start\" or \"end\"");
    }
    return Action{kind == "start" ? ActionKind::Start : ActionKind::End,
                  get_string(j, "variable", "action"),
                  get_string(j, "value", "action")};
}

json action_to_json(const Action& action) {
    return json{{"kind", action.kind == ActionKind::Start ? "start" : "end"},
                {"variable", action.variable},
                {"value", action.value}};
}

std::vector<Action> parse_actions(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "\"actions\" must be an array");
    std::vector<Action> actions;
    for (const json& a : j) actions.push_back(parse_action(a));
    return actions;
}

json actions_to_json(const std::vector<Action>& actions) {
    json out = json::array();
    for (const Action& action : actions) out.push_back(action_to_json(action));
    return out;
}

Event parse_event(const json& j) {
    if (!j.is_object()) fail("event", "entry must be an object");
    const json& delta = member(j, "delta", "event");
    if (!delta.is_number_integer()) fail("event", "\"delta\" must be an integer");
    return make_event(parse_actions(member(j, "actions", "event"), "event"),
                      delta.get<std::int64_t>());
}

json move_c_to_json(const MoveC& move) {
    if (move.kind == MoveC::Kind::Wait) {
        return json{{"kind", "wait"}, {"delta", move.wait_delta}};
    }
    return json{{"kind", "play"}, {"actions", actions_to_json(move.actions)}};
}

MoveC parse_move_c(const json& j) {
    if (!j.is_object()) fail("charlie move", "must be an object");
    const std::string kind = get_string(j, "kind", "charlie move");
    if (kind == "wait") {
        const json& delta = member(j, "delta", "charlie move");
        if (!delta.is_number_integer()) fail("charlie move", "\"delta\" must be an integer");
        return MoveC::wait(delta.get<std::int64_t>());
    }
    if (kind != "play") fail("charlie move", "\"kind\" must be \"wait\" or \"play\"");
    return MoveC::play(parse_actions(member(j, "actions", "charlie move"),
                                     "charlie move"));
}

json move_e_to_json(const MoveE& move) {
    return json{{"delta", move.has_delta ? json(move.delta) : json(nullptr)},
                {"actions", actions_to_json(move.actions)}};
}

MoveE parse_move_e(const json& j) {
    if (!j.is_object()) fail("eve move", "must be an object");
    auto actions = parse_actions(member(j, "actions", "eve move"), "eve move");
    const json& delta = member(j, "delta", "eve move");
    if (delta.is_null()) return MoveE::play(std::move(actions));
    if (!delta.is_number_integer()) fail("eve move", "\"delta\" must be an integer or null");
    return MoveE::play(delta.get<std::int64_t>(), std::move(actions));
}

}  // namespace

PlanningProblem SpecDocument::planning() const {
    PlanningProblem p;
    p.variables = game.all_variables();
    p.rules = game.system_rules;
    p.rules.insert(p.rules.end(), game.domain_rules.begin(),
                   game.domain_rules.end());
    return p;
}

SpecDocument parse_spec(const std::string& text) {
    const json j = parse_text(text);
    expect_format(j, kSpecFormat);
    SpecDocument doc;
    const json& variables = member(j, "variables", kSpecFormat);
    if (!variables.is_array()) fail(kSpecFormat, "\"variables\" must be an array");
    for (const json& v : variables) {
        bool eve_owned = false;
        StateVariable var = parse_variable(v, eve_owned);
        doc.is_game = doc.is_game || eve_owned;
        (eve_owned ? doc.game.external : doc.game.controlled)
            .push_back(std::move(var));
    }
    if (auto it = j.find("rules"); it != j.end()) {
        if (!it->is_array()) fail(kSpecFormat, "\"rules\" must be an array");
        for (const json& r : *it) {
            bool domain_role = false;
            SyncRule rule = parse_rule(r, domain_role);
            doc.is_game = doc.is_game || domain_role;
            (domain_role ? doc.game.domain_rules : doc.game.system_rules)
                .push_back(std::move(rule));
        }
    }
    return doc;
}

SpecDocument load_spec(const std::string& path) {
    return parse_spec(read_file(path));
}

std::string write_spec(const GameSpec& game) {
    json variables = json::array();
    for (const StateVariable& var : game.controlled) {
        variables.push_back(variable_to_json(var, "charlie"));
    }
    for (const StateVariable& var : game.external) {
        variables.push_back(variable_to_json(var, "eve"));
    }
    json rules = json::array();
    for (const SyncRule& rule : game.system_rules) {
        rules.push_back(rule_to_json(rule, "system"));
    }
    for (const SyncRule& rule : game.domain_rules) {
        rules.push_back(rule_to_json(rule, "domain"));
    }
    const json j{{"format", kSpecFormat}, {"variables", variables}, {"rules", rules}};
    return j.dump(2) + "\n";
}

EventSequence parse_plan(const std::string& text) {
    const json j = parse_text(text);
    expect_format(j, kPlanFormat);
    const json& events = member(j, "events", kPlanFormat);
    if (!events.is_array()) fail(kPlanFormat, "\"events\" must be an array");
    EventSequence seq;
    for (const json& e : events) seq.push_back(parse_event(e));
    return seq;
}

EventSequence load_plan(const std::string& path) {
    return parse_plan(read_file(path));
}

std::string write_plan(const EventSequence& seq) {
    json events = json::array();
    for (const Event& event : seq) {
        events.push_back(json{{"delta", event.delta},
                              {"actions", actions_to_json(event.actions)}});
    }
    const json j{{"format", kPlanFormat}, {"events", events}};
    return j.dump(2) + "\n";
}

std::string write_controller(const MooreController& controller) {
    json variables = json::array();
    for (const StateVariable& var : controller.variables) {
        variables.push_back(variable_to_json(var, "charlie"));
    }
    json states = json::array();
    for (std::size_t i = 0; i < controller.states.size(); ++i) {
        const MooreController::State& state = controller.states[i];
        json transitions = json::array();
        for (const auto& [move, target] : state.transitions) {
            transitions.push_back(json{{"eve", move_e_to_json(move)},
                                       {"target", target}});
        }
        json entry{{"id", static_cast<std::int64_t>(i)},
                   {"arena_state", state.arena_state},
                   {"final", state.final},
                   {"ending_round", state.ending_round},
                   {"transitions", transitions}};
        entry["output"] = state.output ? move_c_to_json(*state.output) : json(nullptr);
        states.push_back(std::move(entry));
    }
    const json j{{"format", kControllerFormat},
                 {"variables", variables},
                 {"default_rounds", controller.default_rounds},
                 {"initial", 0},
                 {"states", states}};
    return j.dump(2) + "\n";
}

MooreController parse_controller(const std::string& text) {
    const json j = parse_text(text);
    expect_format(j, kControllerFormat);
    MooreController controller;
    const json& variables = member(j, "variables", kControllerFormat);
    if (!variables.is_array()) fail(kControllerFormat, "\"variables\" must be an array");
    for (const json& v : variables) {
        bool ignored = false;
        controller.variables.push_back(parse_variable(v, ignored));
    }
    if (auto it = j.find("default_rounds"); it != j.end()) {
        if (!it->is_number_unsigned()) {
            fail(kControllerFormat, "\"default_rounds\" must be a non-negative integer");
        }
        controller.default_rounds = it->get<std::size_t>();
    }
    const json& states = member(j, "states", kControllerFormat);
    if (!states.is_array()) fail(kControllerFormat, "\"states\" must be an array");
    for (std::size_t i = 0; i < states.size(); ++i) {
        const json& s = states[i];
        if (!s.is_object()) fail(kControllerFormat, "state must be an object");
        const json& id = member(s, "id", kControllerFormat);
        if (!id.is_number_integer() ||
            id.get<std::int64_t>() != static_cast<std::int64_t>(i)) {
            fail(kControllerFormat, "state ids must be consecutive from 0");
        }
        MooreController::State state;
        if (auto it = s.find("arena_state"); it != s.end() && it->is_number_integer()) {
            state.arena_state = it->get<int>();
        }
        const json& final_flag = member(s, "final", kControllerFormat);
        if (!final_flag.is_boolean()) fail(kControllerFormat, "\"final\" must be a boolean");
        state.final = final_flag.get<bool>();
        const json& ending = member(s, "ending_round", kControllerFormat);
        if (!ending.is_boolean()) fail(kControllerFormat, "\"ending_round\" must be a boolean");
        state.ending_round = ending.get<bool>();
        const json& output = member(s, "output", kControllerFormat);
        if (!output.is_null()) state.output = parse_move_c(output);
        const json& transitions = member(s, "transitions", kControllerFormat);
        if (!transitions.is_array()) fail(kControllerFormat, "\"transitions\" must be an array");
        for (const json& t : transitions) {
            if (!t.is_object()) fail(kControllerFormat, "transition must be an object");
            const json& target = member(t, "target", kControllerFormat);
            if (!target.is_number_integer()) fail(kControllerFormat, "\"target\" must be an integer");
            const auto target_id = target.get<std::int64_t>();
            if (target_id < 0 || static_cast<std::size_t>(target_id) >= states.size()) {
                fail(kControllerFormat, "transition target out of range");
            }
            state.transitions.emplace_back(
                parse_move_e(member(t, "eve", kControllerFormat)),
                static_cast<int>(target_id));
        }
        controller.states.push_back(std::move(state));
    }
    if (controller.states.empty()) {
        fail(kControllerFormat, "controller needs at least one state");
    }
    return controller;
}

MooreController load_controller(const std::string& path) {
    return parse_controller(read_file(path));
}

}  // namespace tbsynth::json_io
