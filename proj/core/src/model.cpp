#include "tbsynth/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "tbsynth/errors.hpp"

namespace tbsynth {

std::string bound_to_string(std::int64_t bound) {
    return bound == kInfinity ? "inf" : std::to_string(bound);
}

std::string term_to_string(const Term& term) {
    std::ostringstream out;
    out << (term.endpoint == Endpoint::Start ? "start(" : "end(") << term.token << ")";
    return out.str();
}

bool StateVariable::has_value(const Name& v) const {
    return std::find(values.begin(), values.end(), v) != values.end();
}

const StateVariable* PlanningProblem::find_variable(const Name& name) const {
    for (const auto& var : variables) {
        if (var.name == name) return &var;
    }
    return nullptr;
}

std::vector<StateVariable> GameSpec::all_variables() const {
    std::vector<StateVariable> all = controlled;
    all.insert(all.end(), external.begin(), external.end());
    return all;
}

bool GameSpec::is_controlled(const Name& variable) const {
    for (const auto& var : controlled) {
        if (var.name == variable) return true;
    }
    return false;
}

bool is_valid_identifier(const Name& name) {
    if (name.empty()) return false;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

namespace {

void check_identifier(const Name& name, const std::string& context,
                      std::vector<Diagnostic>& out) {
    if (!is_valid_identifier(name)) {
        out.push_back({"invalid identifier \"" + name + "\"", context});
    }
}

void validate_variable(const StateVariable& var, std::vector<Diagnostic>& out) {
    const std::string ctx = "variable " + var.name;
    check_identifier(var.name, ctx, out);
    if (var.values.empty()) {
        out.push_back({"empty value domain", ctx});
    }
    std::set<Name> seen;
    for (const auto& v : var.values) {
        check_identifier(v, ctx + ", value " + v, out);
        if (!seen.insert(v).second) {
            out.push_back({"duplicate value \"" + v + "\"", ctx});
        }
    }
    for (const auto& [from, successors] : var.transitions) {
        if (!var.has_value(from)) {
            out.push_back({"transition source \"" + from + "\" is not a value", ctx});
        }
        std::set<Name> succ_seen;
        for (const auto& to : successors) {
            if (!var.has_value(to)) {
                out.push_back({"transition target \"" + to + "\" is not a value",
                               ctx + ", from " + from});
            }
            if (!succ_seen.insert(to).second) {
                out.push_back({"duplicate transition target \"" + to + "\"",
                               ctx + ", from " + from});
            }
        }
    }
    for (const auto& v : var.values) {
        auto dur = var.durations.find(v);
        if (dur == var.durations.end()) {
            out.push_back({"missing duration bound for value \"" + v + "\"", ctx});
        } else {
            if (dur->second.min < 0) {
                out.push_back({"negative duration lower bound for value \"" + v + "\"", ctx});
            }
            if (dur->second.max != kInfinity && dur->second.max < dur->second.min) {
                out.push_back({"duration bounds inverted for value \"" + v + "\"", ctx});
            }
        }
        if (!var.control.count(v)) {
            out.push_back({"missing controllability tag for value \"" + v + "\"", ctx});
        }
    }
    for (const auto& [v, unused] : var.durations) {
        (void)unused;
        if (!var.has_value(v)) {
            out.push_back({"duration bound for unknown value \"" + v + "\"", ctx});
        }
    }
    for (const auto& [v, unused] : var.control) {
        (void)unused;
        if (!var.has_value(v)) {
            out.push_back({"controllability tag for unknown value \"" + v + "\"", ctx});
        }
    }
}

void validate_quantifier(const Quantifier& q, const std::vector<StateVariable>& variables,
                         const std::string& ctx, std::vector<Diagnostic>& out) {
    check_identifier(q.token, ctx, out);
    const StateVariable* var = nullptr;
    for (const auto& candidate : variables) {
        if (candidate.name == q.variable) {
            var = &candidate;
            break;
        }
    }
    if (var == nullptr) {
        out.push_back({"unknown variable \"" + q.variable + "\"", ctx});
    } else if (!var->has_value(q.value)) {
        out.push_back({"unknown value \"" + q.value + "\" of variable \"" + q.variable + "\"",
                       ctx});
    }
}

void validate_rules(const std::vector<SyncRule>& rules,
                    const std::vector<StateVariable>& variables,
                    const std::string& role, std::vector<Diagnostic>& out) {
    for (std::size_t r = 0; r < rules.size(); ++r) {
        const auto& rule = rules[r];
        const std::string ctx = role + " rule " + std::to_string(r + 1);
        if (!rule.trigger.has_value()) {
            out.push_back({"unsupported: triggerless rule", ctx});
            continue;
        }
        validate_quantifier(*rule.trigger, variables, ctx + ", trigger", out);
        if (rule.statements.empty()) {
            out.push_back({"rule has no existential statement", ctx});
        }
        for (std::size_t s = 0; s < rule.statements.size(); ++s) {
            const auto& stmt = rule.statements[s];
            const std::string sctx = ctx + ", statement " + std::to_string(s + 1);
            std::set<Name> tokens{rule.trigger->token};
            for (const auto& q : rule.statements[s].quantifiers) {
                validate_quantifier(q, variables, sctx + ", token " + q.token, out);
                if (!tokens.insert(q.token).second) {
                    out.push_back({"duplicate token name \"" + q.token + "\"", sctx});
                }
            }
            for (const auto& atom : stmt.clause) {
                for (const Term* term : {&atom.lhs, &atom.rhs}) {
                    if (!tokens.count(term->token)) {
                        out.push_back({"atom references undeclared token \"" + term->token + "\"",
                                       sctx});
                    }
                }
                if (atom.lower < 0) {
                    out.push_back({"negative atom lower bound", sctx});
                }
                if (atom.upper != kInfinity && atom.upper < atom.lower) {
                    out.push_back({"atom bounds inverted", sctx});
                }
            }
        }
    }
}

void validate_variables(const std::vector<StateVariable>& variables,
                        std::vector<Diagnostic>& out) {
    std::set<Name> names;
    for (const auto& var : variables) {
        if (!names.insert(var.name).second) {
            out.push_back({"duplicate variable name \"" + var.name + "\"", ""});
        }
        validate_variable(var, out);
    }
}

} // namespace

std::vector<Diagnostic> validate(const PlanningProblem& problem) {
    std::vector<Diagnostic> out;
    validate_variables(problem.variables, out);
    validate_rules(problem.rules, problem.variables, "sync", out);
    return out;
}

std::vector<Diagnostic> validate(const GameSpec& game) {
    std::vector<Diagnostic> out;
    const auto all = game.all_variables();
    validate_variables(all, out);
    validate_rules(game.system_rules, all, "system", out);
    validate_rules(game.domain_rules, all, "domain", out);
    return out;
}

namespace {

// Duration rules reuse a fixed rule-local token name; token namespaces are
// per-rule, so no collision is possible.
constexpr const char* kDurationToken = "a";

SyncRule make_duration_rule(const Name& variable, const Name& value, DurationBound bound) {
    SyncRule rule;
    rule.trigger = Quantifier{kDurationToken, variable, value};
    ExistentialStatement stmt;
    stmt.clause.push_back(Atom{Term{Endpoint::Start, kDurationToken},
                               Term{Endpoint::End, kDurationToken}, bound.min, bound.max});
    rule.statements.push_back(std::move(stmt));
    return rule;
}

// Appends one rule per nontrivial duration and resets the bound maps.
void desugar_into(std::vector<StateVariable>& variables,
                  const std::vector<SyncRule>*, // unused; kept for symmetry
                  std::vector<SyncRule>& system_sink,
                  std::vector<SyncRule>* domain_sink) {
    for (auto& var : variables) {
        for (const auto& value : var.values) {
            auto it = var.durations.find(value);
            if (it == var.durations.end() || it->second.is_trivial()) continue;
            SyncRule rule = make_duration_rule(var.name, value, it->second);
            bool controllable = true;
            auto tag = var.control.find(value);
            if (tag != var.control.end()) {
                controllable = tag->second == Controllability::Controllable;
            }
            if (domain_sink != nullptr && !controllable) {
                domain_sink->push_back(std::move(rule));
            } else {
                system_sink.push_back(std::move(rule));
            }
        }
        for (auto& [value, bound] : var.durations) {
            (void)value;
            bound = DurationBound{};
        }
    }
}

} // namespace

PlanningProblem desugar_durations(const PlanningProblem& problem) {
    PlanningProblem out = problem;
    desugar_into(out.variables, nullptr, out.rules, nullptr);
    return out;
}

GameSpec desugar_durations(const GameSpec& game) {
    GameSpec out = game;
    desugar_into(out.controlled, nullptr, out.system_rules, &out.domain_rules);
    desugar_into(out.external, nullptr, out.system_rules, &out.domain_rules);
    return out;
}

namespace {

void fold_rule_bounds(const std::vector<SyncRule>& rules, std::int64_t& max_lower,
                      std::int64_t& max_finite_upper) {
    for (const auto& rule : rules) {
        for (const auto& stmt : rule.statements) {
            for (const auto& atom : stmt.clause) {
                max_lower = std::max(max_lower, atom.lower);
                if (atom.upper != kInfinity) {
                    max_finite_upper = std::max(max_finite_upper, atom.upper);
                }
            }
        }
    }
}

} // namespace

std::int64_t horizon_d(const PlanningProblem& problem) {
    std::int64_t max_lower = 0;
    std::int64_t max_upper = 0;
    fold_rule_bounds(problem.rules, max_lower, max_upper);
    const std::int64_t d = std::max(max_lower, max_upper) + 1;
    return d < 1 ? 1 : d;
}

std::int64_t horizon_d(const GameSpec& game) {
    std::int64_t max_lower = 0;
    std::int64_t max_upper = 0;
    fold_rule_bounds(game.system_rules, max_lower, max_upper);
    fold_rule_bounds(game.domain_rules, max_lower, max_upper);
    const std::int64_t d = std::max(max_lower, max_upper) + 1;
    return d < 1 ? 1 : d;
}

std::int64_t window(const PlanningProblem& problem) {
    std::int64_t sum = 0;
    for (const auto& rule : problem.rules) {
        for (const auto& stmt : rule.statements) {
            for (const auto& atom : stmt.clause) {
                if (atom.upper == kInfinity) continue;
                if (sum > kInfinity - atom.upper) {
                    throw OverflowError("window(P) overflows 64-bit bound arithmetic");
                }
                sum += atom.upper;
            }
        }
    }
    return sum;
}

std::vector<DifferenceConstraint> clause_to_constraints(
    const ExistentialStatement& statement,
    const Quantifier& trigger,
    const std::vector<StateVariable>& variables) {
    std::vector<DifferenceConstraint> out;
    for (const auto& atom : statement.clause) {
        if (atom.upper != kInfinity) {
            out.push_back({atom.rhs, atom.lhs, atom.upper});
        }
        out.push_back({atom.lhs, atom.rhs, -atom.lower});
    }

    auto duration_of = [&](const Quantifier& q) -> DurationBound {
        for (const auto& var : variables) {
            if (var.name != q.variable) continue;
            auto it = var.durations.find(q.value);
            if (it != var.durations.end()) return it->second;
        }
        return DurationBound{};
    };

    // Token duration constraints; trivial bounds stay implicit (match-event
    // condition 1(b) already orders a token's start before its end).
    auto emit_duration = [&](const Quantifier& q) {
        const DurationBound bound = duration_of(q);
        const Term start{Endpoint::Start, q.token};
        const Term end{Endpoint::End, q.token};
        if (bound.min > 0) {
            out.push_back({start, end, -bound.min});
        }
        if (bound.max != kInfinity) {
            out.push_back({end, start, bound.max});
        }
    };
    emit_duration(trigger);
    for (const auto& q : statement.quantifiers) {
        emit_duration(q);
    }
    return out;
}

} // namespace tbsynth
