#include "tbsynth/oracle.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

#include "tbsynth/errors.hpp"

namespace tbsynth::oracle {

namespace {

std::optional<int> term_position(const TokenView& token, Endpoint endpoint) {
    return endpoint == Endpoint::Start ? token.start_index : token.end_index;
}

std::int64_t signed_distance(const EventSequence& seq, int i, int j) {
    return i <= j ? duration_between(seq, i, j) : -duration_between(seq, j, i);
}

/// Checks the clause under a complete token binding; on success records the
/// positions of every term mentioned by an atom.
std::optional<MatchingAssignment> check_clause(
    const EventSequence& seq, const ExistentialStatement& statement,
    const std::map<Name, TokenView>& binding) {
    MatchingAssignment assignment;
    for (const Atom& atom : statement.clause) {
        std::optional<int> positions[2];
        const Term* terms[2] = {&atom.lhs, &atom.rhs};
        for (int side = 0; side < 2; ++side) {
            auto bound = binding.find(terms[side]->token);
            if (bound == binding.end()) {
                throw InputError("atom references unknown token '" +
                                 terms[side]->token + "'");
            }
            positions[side] =
                term_position(bound->second, terms[side]->endpoint);
        }
        // An endpoint that never happens (open token) satisfies no bound.
        if (!positions[0] || !positions[1]) return std::nullopt;
        const std::int64_t dist =
            signed_distance(seq, *positions[0], *positions[1]);
        if (dist < atom.lower) return std::nullopt;
        if (atom.upper != kInfinity && dist > atom.upper) return std::nullopt;
        assignment.positions[atom.lhs] = static_cast<std::size_t>(*positions[0]);
        assignment.positions[atom.rhs] = static_cast<std::size_t>(*positions[1]);
    }
    return assignment;
}

std::optional<MatchingAssignment> search_binding(
    const EventSequence& seq, const ExistentialStatement& statement,
    std::size_t next_quantifier, std::map<Name, TokenView>& binding) {
    if (next_quantifier == statement.quantifiers.size()) {
        return check_clause(seq, statement, binding);
    }
    const Quantifier& quantifier = statement.quantifiers[next_quantifier];
    for (const TokenView& token : tokens_of(seq, quantifier.variable)) {
        if (token.value != quantifier.value) continue;
        binding[quantifier.token] = token;
        if (auto found =
                search_binding(seq, statement, next_quantifier + 1, binding)) {
            return found;
        }
    }
    binding.erase(quantifier.token);
    return std::nullopt;
}

bool event_has(const Event& event, const Action& action) {
    return std::find(event.actions.begin(), event.actions.end(), action) !=
           event.actions.end();
}

bool transitions_respected(const EventSequence& seq,
                           const StateVariable& variable) {
    const auto tokens = tokens_of(seq, variable.name);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto& allowed = variable.transitions.at(tokens[i - 1].value);
        if (std::find(allowed.begin(), allowed.end(), tokens[i].value) ==
            allowed.end()) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::optional<MatchingAssignment> find_matching(
    const EventSequence& seq, const Quantifier& trigger,
    std::size_t trigger_position, const ExistentialStatement& statement) {
    std::optional<TokenView> trigger_token;
    for (const TokenView& token : tokens_of(seq, trigger.variable)) {
        if (token.value == trigger.value && token.start_index &&
            static_cast<std::size_t>(*token.start_index) == trigger_position) {
            trigger_token = token;
            break;
        }
    }
    if (!trigger_token) {
        throw InputError("no token of " + trigger.variable + " = " +
                         trigger.value + " starts at event " +
                         std::to_string(trigger_position));
    }
    std::map<Name, TokenView> binding;
    binding[trigger.token] = *trigger_token;
    return search_binding(seq, statement, 0, binding);
}

bool satisfies_rule(const EventSequence& seq, const SyncRule& rule) {
    if (!rule.trigger) {
        throw InputError("triggerless rules are not supported");
    }
    const Action trigger_start{ActionKind::Start, rule.trigger->variable,
                               rule.trigger->value};
    for (std::size_t p = 1; p <= seq.size(); ++p) {
        if (!event_has(seq[p - 1], trigger_start)) continue;
        bool witnessed = false;
        for (const ExistentialStatement& statement : rule.statements) {
            if (find_matching(seq, *rule.trigger, p, statement)) {
                witnessed = true;
                break;
            }
        }
        if (!witnessed) return false;
    }
    return true;
}

bool is_solution_plan(const EventSequence& seq,
                      const PlanningProblem& problem) {
    if (!check_event_sequence(seq, problem.variables).ok) return false;
    for (const StateVariable& variable : problem.variables) {
        if (openness(seq, variable.name) != Openness::Closed) return false;
        if (!transitions_respected(seq, variable)) return false;
    }
    const PlanningProblem desugared = desugar_durations(problem);
    for (const SyncRule& rule : desugared.rules) {
        if (!satisfies_rule(seq, rule)) return false;
    }
    return true;
}

std::vector<EventSequence> enumerate_sequences(
    const std::vector<StateVariable>& variables, const EnumBounds& bounds) {
    if (bounds.max_delta < 1) {
        throw InputError("max_delta must be at least 1");
    }
    std::vector<Action> universe;
    for (const StateVariable& variable : variables) {
        for (const Name& value : variable.values) {
            universe.push_back({ActionKind::Start, variable.name, value});
            universe.push_back({ActionKind::End, variable.name, value});
        }
    }
    if (universe.size() > 20) {
        throw ResourceError("enumeration guard exceeded: " +
                                std::to_string(universe.size()) +
                                " distinct actions",
                            universe.size());
    }
    std::vector<Event> candidates;
    for (std::size_t mask = 0; mask < (std::size_t{1} << universe.size());
         ++mask) {
        std::vector<Action> actions;
        for (std::size_t bit = 0; bit < universe.size(); ++bit) {
            if (mask & (std::size_t{1} << bit)) actions.push_back(universe[bit]);
        }
        for (std::int64_t delta = 1; delta <= bounds.max_delta; ++delta) {
            try {
                candidates.push_back(make_event(actions, delta));
            } catch (const InputError&) {
                break;  // two starts/ends of one variable; no delta helps
            }
        }
    }
    std::sort(candidates.begin(), candidates.end());

    std::vector<EventSequence> out;
    EventSequence prefix;
    auto grow = [&](auto&& self) -> void {
        if (out.size() >= bounds.guard) {
            throw ResourceError("enumeration guard exceeded", out.size() + 1);
        }
        out.push_back(prefix);
        if (prefix.size() == bounds.max_length) return;
        for (const Event& candidate : candidates) {
            prefix.push_back(candidate);
            if (check_event_sequence(prefix, variables).ok) self(self);
            prefix.pop_back();
        }
    };
    grow(grow);
    return out;
}

std::string verdict_to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Charlie: return "Charlie";
        case Verdict::Eve: return "Eve";
        case Verdict::Unknown: return "Unknown";
    }
    throw std::logic_error("unreachable");
}

namespace {

/// Three-valued accumulation. `better` wins outright, `worse` only when
/// every alternative yields it; Unknown otherwise.
class KleeneFold {
public:
    KleeneFold(Verdict better, Verdict worse) : better_(better), acc_(worse) {}

    /// Returns false once the outcome is settled (short-circuit).
    bool feed(Verdict v) {
        if (v == better_) acc_ = better_;
        else if (v == Verdict::Unknown && acc_ != better_) acc_ = v;
        return acc_ != better_;
    }

    Verdict result() const { return acc_; }

private:
    Verdict better_;
    Verdict acc_;
};

struct MinimaxContext {
    GameSpec game;  // durations already desugared
    std::vector<StateVariable> variables;
    std::int64_t horizon = 1;
    std::size_t node_guard = 0;
    std::size_t consumed = 0;
};

bool side_coherent(const EventSequence& plan,
                   const std::vector<StateVariable>& side,
                   const std::vector<SyncRule>& rules) {
    for (const StateVariable& variable : side) {
        if (openness(plan, variable.name) != Openness::Closed) return false;
        if (!transitions_respected(plan, variable)) return false;
    }
    for (const SyncRule& rule : rules) {
        if (!satisfies_rule(plan, rule)) return false;
    }
    return true;
}

/// A plan wins for Charlie when his obligations hold or Eve's are broken.
bool successful(const MinimaxContext& ctx, const EventSequence& plan) {
    if (side_coherent(plan, ctx.game.controlled, ctx.game.system_rules)) {
        return true;
    }
    return !side_coherent(plan, ctx.game.external, ctx.game.domain_rules);
}

/// No event whatsoever may follow a plan whose last event left a bare end.
bool is_terminal(const MinimaxContext& ctx, EventSequence& plan) {
    plan.push_back(Event{{}, 1});
    const bool extendable = check_event_sequence(plan, ctx.variables).ok;
    plan.pop_back();
    return !extendable;
}

std::vector<Action> open_ends(const MinimaxContext& ctx,
                              const EventSequence& plan, bool charlie) {
    std::vector<Action> ends;
    for (const StateVariable& variable : ctx.variables) {
        const auto tokens = tokens_of(plan, variable.name);
        if (tokens.empty() || tokens.back().end_index) continue;
        const Name& value = tokens.back().value;
        const bool controllable =
            variable.control.at(value) == Controllability::Controllable;
        if (controllable == charlie) {
            ends.push_back({ActionKind::End, variable.name, value});
        }
    }
    return ends;
}

/// Start options for one player's variables: a fresh plan may open any of
/// them; later only a variable ended in this very event may restart (with
/// any value — discipline is judged at checkpoints, not when moving).
std::vector<std::vector<Action>> start_choices(
    const MinimaxContext& ctx, bool charlie, bool fresh,
    const std::vector<Action>& ends) {
    std::vector<std::vector<std::optional<Action>>> per_variable;
    for (const StateVariable& variable : ctx.variables) {
        if (ctx.game.is_controlled(variable.name) != charlie) continue;
        const bool ended =
            std::any_of(ends.begin(), ends.end(), [&](const Action& action) {
                return action.variable == variable.name;
            });
        std::vector<std::optional<Action>> options = {std::nullopt};
        if (fresh || ended) {
            for (const Name& value : variable.values) {
                options.push_back(Action{ActionKind::Start, variable.name, value});
            }
        }
        per_variable.push_back(std::move(options));
    }
    std::vector<std::vector<Action>> products = {{}};
    for (const auto& options : per_variable) {
        std::vector<std::vector<Action>> grown;
        for (const auto& base : products) {
            for (const auto& option : options) {
                grown.push_back(base);
                if (option) grown.back().push_back(*option);
            }
        }
        products = std::move(grown);
    }
    return products;
}

/// All subsets of `pool`, the empty one first.
std::vector<std::vector<Action>> subsets(const std::vector<Action>& pool) {
    std::vector<std::vector<Action>> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << pool.size()); ++mask) {
        std::vector<Action> subset;
        for (std::size_t bit = 0; bit < pool.size(); ++bit) {
            if (mask & (std::size_t{1} << bit)) subset.push_back(pool[bit]);
        }
        out.push_back(std::move(subset));
    }
    return out;
}

Verdict node_value(MinimaxContext& ctx, EventSequence& plan,
                   std::size_t depth);

Verdict child_value(MinimaxContext& ctx, EventSequence& plan,
                    std::vector<Action> actions, std::int64_t delta,
                    std::size_t depth) {
    if (++ctx.consumed > ctx.node_guard) {
        throw ResourceError("minimax node guard exceeded", ctx.consumed);
    }
    plan.push_back(make_event(std::move(actions), delta));
    if (!check_event_sequence(plan, ctx.variables).ok) {
        plan.pop_back();
        throw std::logic_error("minimax generated a malformed round");
    }
    const Verdict verdict = node_value(ctx, plan, depth - 1);
    plan.pop_back();
    return verdict;
}

/// The move chain for one event: Charlie's ends are fixed by the caller
/// (empty past delta 1), then Eve ends, Charlie starts, Eve starts.
Verdict event_phase(MinimaxContext& ctx, EventSequence& plan,
                    std::size_t depth, std::int64_t delta,
                    const std::vector<Action>& charlie_ends) {
    const bool fresh = plan.empty();
    KleeneFold eve_ends_fold(Verdict::Eve, Verdict::Charlie);
    for (const auto& eve_ends : subsets(open_ends(ctx, plan, false))) {
        std::vector<Action> all_ends = charlie_ends;
        all_ends.insert(all_ends.end(), eve_ends.begin(), eve_ends.end());
        KleeneFold charlie_starts_fold(Verdict::Charlie, Verdict::Eve);
        for (const auto& charlie_starts :
             start_choices(ctx, true, fresh, all_ends)) {
            KleeneFold eve_starts_fold(Verdict::Eve, Verdict::Charlie);
            for (const auto& eve_starts :
                 start_choices(ctx, false, fresh, all_ends)) {
                std::vector<Action> actions = all_ends;
                actions.insert(actions.end(), charlie_starts.begin(),
                               charlie_starts.end());
                actions.insert(actions.end(), eve_starts.begin(),
                               eve_starts.end());
                if (!eve_starts_fold.feed(
                        child_value(ctx, plan, std::move(actions), delta,
                                    depth))) {
                    break;
                }
            }
            if (!charlie_starts_fold.feed(eve_starts_fold.result())) break;
        }
        if (!eve_ends_fold.feed(charlie_starts_fold.result())) break;
    }
    return eve_ends_fold.result();
}

Verdict node_value(MinimaxContext& ctx, EventSequence& plan,
                   std::size_t depth) {
    if (!plan.empty() && successful(ctx, plan)) return Verdict::Charlie;
    if (is_terminal(ctx, plan)) return Verdict::Eve;
    if (depth == 0) return Verdict::Unknown;

    KleeneFold charlie_fold(Verdict::Charlie, Verdict::Eve);
    // Next round at distance 1: Charlie chooses which of his tokens end.
    bool settled = false;
    for (const auto& charlie_ends : subsets(open_ends(ctx, plan, true))) {
        if (!charlie_fold.feed(event_phase(ctx, plan, depth, 1, charlie_ends))) {
            settled = true;
            break;
        }
    }
    // Or he waits; Eve may sit the wait out or interrupt it anywhere past 1,
    // ending only her own tokens.  A fresh plan's first distance is
    // meaningless, so waiting is offered only once the plan is nonempty.
    if (!settled && !plan.empty()) {
        for (std::int64_t wait = 2; wait <= ctx.horizon; ++wait) {
            KleeneFold eve_delta_fold(Verdict::Eve, Verdict::Charlie);
            for (std::int64_t delta = 2; delta <= wait; ++delta) {
                if (!eve_delta_fold.feed(
                        event_phase(ctx, plan, depth, delta, {}))) {
                    break;
                }
            }
            if (!charlie_fold.feed(eve_delta_fold.result())) break;
        }
    }
    return charlie_fold.result();
}

}  // namespace

Verdict minimax_winner(const GameSpec& game, std::size_t depth,
                       std::size_t node_guard) {
    const auto diagnostics = validate(game);
    if (!diagnostics.empty()) {
        throw InputError("invalid game: " + diagnostics.front().message);
    }
    MinimaxContext ctx;
    ctx.game = desugar_durations(game);
    ctx.variables = ctx.game.all_variables();
    ctx.horizon = horizon_d(ctx.game);
    ctx.node_guard = node_guard;
    EventSequence plan;
    return node_value(ctx, plan, depth);
}

}  // namespace tbsynth::oracle
