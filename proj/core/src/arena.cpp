#include "tbsynth/arena.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "tbsynth/errors.hpp"

namespace tbsynth {

namespace {

std::vector<Action> sorted_unique(std::vector<Action> actions) {
    std::sort(actions.begin(), actions.end());
    actions.erase(std::unique(actions.begin(), actions.end()), actions.end());
    return actions;
}

void require_homogeneous(const std::vector<Action>& actions, const char* who) {
    bool has_start = false;
    bool has_end = false;
    for (const Action& action : actions) {
        (action.kind == ActionKind::Start ? has_start : has_end) = true;
    }
    if (has_start && has_end) {
        throw InputError(std::string(who) +
                         " play mixes starting and ending actions");
    }
}

std::string actions_to_string(const std::vector<Action>& actions) {
    std::string out = "{";
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i > 0) out += ", ";
        out += action_to_string(actions[i]);
    }
    out += "}";
    return out;
}

}  // namespace

std::string player_to_string(Player player) {
    return player == Player::Charlie ? "Charlie" : "Eve";
}

// ---------------------------------------------------------------------------
// Action ownership.
// ---------------------------------------------------------------------------

bool ActionPartition::is_charlie(const Action& action) const {
    return std::binary_search(charlie.begin(), charlie.end(), action);
}

ActionPartition partition_actions(const GameSpec& game) {
    ActionPartition out;
    for (const StateVariable& variable : game.all_variables()) {
        const bool controlled_variable = game.is_controlled(variable.name);
        for (const Name& value : variable.values) {
            const Action start{ActionKind::Start, variable.name, value};
            const Action end{ActionKind::End, variable.name, value};
            (controlled_variable ? out.charlie : out.eve).push_back(start);
            const bool controllable_end =
                variable.control.at(value) == Controllability::Controllable;
            (controllable_end ? out.charlie : out.eve).push_back(end);
        }
    }
    std::sort(out.charlie.begin(), out.charlie.end());
    std::sort(out.eve.begin(), out.eve.end());
    return out;
}

// ---------------------------------------------------------------------------
// Moves.
// ---------------------------------------------------------------------------

MoveC MoveC::wait(std::int64_t delta) {
    if (delta < 1) throw InputError("wait delay must be at least 1");
    MoveC move;
    move.kind = Kind::Wait;
    move.wait_delta = delta;
    return move;
}

MoveC MoveC::play(std::vector<Action> actions) {
    require_homogeneous(actions, "Charlie");
    MoveC move;
    move.kind = Kind::Play;
    move.actions = sorted_unique(std::move(actions));
    return move;
}

MoveE MoveE::play(std::vector<Action> actions) {
    require_homogeneous(actions, "Eve");
    MoveE move;
    move.actions = sorted_unique(std::move(actions));
    return move;
}

MoveE MoveE::play(std::int64_t delta, std::vector<Action> actions) {
    if (delta < 1) throw InputError("interruption delay must be at least 1");
    require_homogeneous(actions, "Eve");
    MoveE move;
    move.has_delta = true;
    move.delta = delta;
    move.actions = sorted_unique(std::move(actions));
    return move;
}

std::string move_to_string(const MoveC& move) {
    if (move.kind == MoveC::Kind::Wait) {
        return "wait(" + std::to_string(move.wait_delta) + ")";
    }
    return "play(" + actions_to_string(move.actions) + ")";
}

std::string move_to_string(const MoveE& move) {
    std::string out = "play(";
    if (move.has_delta) out += std::to_string(move.delta) + ", ";
    out += actions_to_string(move.actions) + ")";
    return out;
}

std::string move_to_string(const Move& move) {
    return std::visit([](const auto& m) { return move_to_string(m); }, move);
}

bool move_less(const Move& a, const Move& b) {
    if (a.index() != b.index()) return a.index() < b.index();
    if (a.index() == 0) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
}

// ---------------------------------------------------------------------------
// Rounds.
// ---------------------------------------------------------------------------

RoundOutcome round_outcome(const EventSequence& seq, const Round& round,
                           const std::vector<StateVariable>& variables) {
    // Structural validation first: a malformed pairing is a protocol bug in
    // the caller, not a mere inapplicable round.
    const bool charlie_waits = round.charlie.kind == MoveC::Kind::Wait;
    if (charlie_waits && !round.ending) {
        throw InputError("waiting is only possible in an ending round");
    }
    if (charlie_waits != round.eve.has_delta) {
        throw InputError(
            "Eve picks an interruption delay exactly when Charlie waits");
    }
    if (charlie_waits && round.eve.delta > round.charlie.wait_delta) {
        throw InputError("interruption delay exceeds Charlie's wait");
    }
    std::vector<Action> actions = round.charlie.actions;
    actions.insert(actions.end(), round.eve.actions.begin(),
                   round.eve.actions.end());
    actions = sorted_unique(std::move(actions));
    for (const Action& action : actions) {
        const bool is_end = action.kind == ActionKind::End;
        if (round.ending != is_end) {
            throw InputError("round kind disagrees with its action kinds");
        }
        const StateVariable* variable = nullptr;
        for (const StateVariable& v : variables) {
            if (v.name == action.variable) variable = &v;
        }
        if (variable == nullptr || !variable->has_value(action.value)) {
            throw InputError("round plays undeclared action " +
                             action_to_string(action));
        }
    }

    RoundOutcome outcome;
    // Build the candidate sequence.  A merge yielding a malformed single
    // event (say, a second start for a variable) is exactly a clause (a)
    // violation, not a caller bug.
    EventSequence result = seq;
    try {
        if (round.ending) {
            const std::int64_t delta =
                round.eve.has_delta ? round.eve.delta : 1;
            result.push_back(make_event(actions, delta));
        } else if (result.empty()) {
            result.push_back(make_event(actions, 1));
        } else {
            std::vector<Action> merged = result.back().actions;
            merged.insert(merged.end(), actions.begin(), actions.end());
            result.back() = make_event(std::move(merged), result.back().delta);
        }
    } catch (const InputError&) {
        outcome.violated = 'a';
        return outcome;
    }

    // Clause (a): the merged word must stay well-formed.
    if (!check_event_sequence(result, variables).ok) {
        outcome.violated = 'a';
        return outcome;
    }
    // Clause (b): the round ends tokens iff every touched variable is open.
    bool all_open = true;
    std::vector<Name> seen;
    for (const Action& action : actions) {
        if (std::find(seen.begin(), seen.end(), action.variable) != seen.end()) {
            continue;
        }
        seen.push_back(action.variable);
        const Openness state = openness(seq, action.variable);
        if (state != Openness::OpenRight && state != Openness::OpenBoth) {
            all_open = false;
        }
    }
    if (round.ending != all_open) {
        outcome.violated = 'b';
        return outcome;
    }
    outcome.applicable = true;
    outcome.result = std::move(result);
    return outcome;
}

// ---------------------------------------------------------------------------
// Game automaton.
// ---------------------------------------------------------------------------

GameAutomata build_game_automata(const GameSpec& game) {
    const std::vector<Diagnostic> diagnostics = validate(game);
    if (!diagnostics.empty()) {
        std::string message = "invalid game";
        for (const Diagnostic& d : diagnostics) {
            message += "\n  " + d.message;
        }
        throw InputError(message);
    }

    GameAutomata out;
    out.game = std::make_shared<const GameSpec>(desugar_durations(game));
    out.horizon = horizon_d(*out.game);
    out.partition = partition_actions(*out.game);

    const std::vector<StateVariable> everything = out.game->all_variables();
    out.system_side = std::make_shared<const PlanningProblem>(
        PlanningProblem{everything, out.game->system_rules});
    out.domain_side = std::make_shared<const PlanningProblem>(
        PlanningProblem{everything, out.game->domain_rules});

    out.sync_system =
        std::make_shared<const SyncAutomaton>(out.system_side, out.horizon);
    out.sync_domain =
        std::make_shared<const SyncAutomaton>(out.domain_side, out.horizon);
    out.tv_controlled = std::make_shared<const TvAutomaton>(
        out.game->controlled, /*check_transitions=*/true);
    out.tv_external = std::make_shared<const TvAutomaton>(
        out.game->external, /*check_transitions=*/true);
    out.shape = std::make_shared<const TvAutomaton>(
        everything, /*check_transitions=*/false);

    // Charlie wins on words satisfying his obligations outright, and on
    // words where the environment itself misbehaves.
    out.dfa = unite(
        intersect(make_sync_dfa(out.sync_system), make_tv_dfa(out.tv_controlled)),
        complement(intersect(make_sync_dfa(out.sync_domain),
                             make_tv_dfa(out.tv_external))));
    return out;
}

LazyDfa build_game_dfa(const GameSpec& game) {
    return build_game_automata(game).dfa;
}

// ---------------------------------------------------------------------------
// Pruning.
// ---------------------------------------------------------------------------

PrunedDfa prune(const LazyDfa& dfa, const GameSpec& game,
                PruneReading reading) {
    // Map each ending action to "Charlie may play it" under the chosen
    // reading, over the desugared variable set (identical to the original:
    // desugaring touches durations only).
    std::vector<Action> charlie_ends;
    for (const StateVariable& variable : game.all_variables()) {
        for (const Name& value : variable.values) {
            const bool his = reading == PruneReading::Controllability
                ? variable.control.at(value) == Controllability::Controllable
                : game.is_controlled(variable.name);
            if (his) {
                charlie_ends.push_back(Action{ActionKind::End, variable.name, value});
            }
        }
    }
    std::sort(charlie_ends.begin(), charlie_ends.end());

    PrunedDfa out;
    out.dfa = dfa;
    out.defined = [charlie_ends = std::move(charlie_ends)](const Event& event) {
        if (event.delta <= 1) return true;
        for (const Action& action : event.actions) {
            if (action.kind != ActionKind::End) continue;
            if (std::binary_search(charlie_ends.begin(), charlie_ends.end(),
                                   action)) {
                return false;
            }
        }
        return true;
    };
    return out;
}

// ---------------------------------------------------------------------------
// Arena states.
// ---------------------------------------------------------------------------

Player ArenaState::turn() const {
    switch (kind) {
        case Kind::Original:
        case Kind::CharlieStarts:
            return Player::Charlie;
        default:
            return Player::Eve;
    }
}

namespace {

char kind_letter(ArenaState::Kind kind) {
    switch (kind) {
        case ArenaState::Kind::Original: return 'O';
        case ArenaState::Kind::AfterWait: return 'W';
        case ArenaState::Kind::EveEnds: return 'E';
        case ArenaState::Kind::CharlieStarts: return 'C';
        case ArenaState::Kind::EveStarts: return 'S';
    }
    return '?';
}

}  // namespace

std::string ArenaState::key() const {
    std::string out;
    out += kind_letter(kind);
    out += std::to_string(delta);
    out += '|';
    for (const Action& action : accumulated) {
        out += action_to_string(action);
        out += ',';
    }
    out += '|';
    out += base.key;
    out += '|';
    out += shape.key();
    return out;
}

int Arena::find(const std::string& key) const {
    const auto it = index.find(key);
    return it == index.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// Splitting.
// ---------------------------------------------------------------------------

namespace {

/// Edge bookkeeping during construction: per-state move -> target with a
/// determinism check.
class ArenaBuilder {
public:
    ArenaBuilder(const PrunedDfa& dfa, std::size_t budget)
        : dfa_(dfa), budget_(budget) {}

    int intern(ArenaState state) {
        const std::string key = state.key();
        const auto it = arena_.index.find(key);
        if (it != arena_.index.end()) return it->second;
        if (arena_.states.size() >= budget_) {
            throw ResourceError("arena state budget exceeded",
                                arena_.states.size() + 1);
        }
        const int id = static_cast<int>(arena_.states.size());
        arena_.index.emplace(key, id);
        arena_.turn.push_back(state.turn());
        arena_.final_state.push_back(state.kind == ArenaState::Kind::Original &&
                                     dfa_.dfa.is_final(state.base));
        arena_.states.push_back(std::move(state));
        arena_.edges.emplace_back();
        move_index_.emplace_back();
        if (arena_.states.back().kind == ArenaState::Kind::Original) {
            frontier_.push_back(id);
        }
        return id;
    }

    void add_edge(int from, Move move, int target) {
        const std::string key = move_to_string(move);
        auto [it, inserted] = move_index_[from].emplace(key, target);
        if (!inserted) {
            if (it->second != target) {
                throw std::logic_error("arena construction is nondeterministic: " +
                                       key);
            }
            return;
        }
        arena_.edges[from].push_back(Arena::Edge{std::move(move), target});
    }

    void set_variables(std::vector<StateVariable> variables) {
        arena_.variables = std::move(variables);
    }

    void clear_final(int id) { arena_.final_state[id] = false; }

    bool frontier_empty() const { return frontier_.empty(); }
    int pop_frontier() {
        const int id = frontier_.front();
        frontier_.pop_front();
        return id;
    }

    const ArenaState& state(int id) const { return arena_.states[id]; }

    Arena finish() {
        for (std::vector<Arena::Edge>& out : arena_.edges) {
            std::sort(out.begin(), out.end(),
                      [](const Arena::Edge& a, const Arena::Edge& b) {
                          return move_less(a.move, b.move);
                      });
        }
        return std::move(arena_);
    }

private:
    const PrunedDfa& dfa_;
    std::size_t budget_;
    Arena arena_;
    std::vector<std::unordered_map<std::string, int>> move_index_;
    std::deque<int> frontier_;
};

}  // namespace

Arena split(const PrunedDfa& dfa, const GameSpec& game,
            std::size_t state_budget) {
    const GameSpec desugared = desugar_durations(game);
    const std::vector<StateVariable> variables = desugared.all_variables();
    const std::int64_t horizon = horizon_d(desugared);
    const ActionPartition partition = partition_actions(desugared);
    const TvAutomaton shape_automaton(variables, /*check_transitions=*/false);

    ArenaBuilder builder(dfa, state_budget);
    ArenaState start;
    start.kind = ArenaState::Kind::Original;
    start.base = dfa.dfa.initial();
    start.shape = shape_automaton.initial();
    builder.intern(std::move(start));
    builder.set_variables(variables);
    // Success is judged on the plan after at least one round; the pristine
    // position, though vacuously accepting, is not a checkpoint.  It never
    // recurs (consuming any event clears the freshness of the openness
    // tracker), so clearing its flag is exact.
    builder.clear_final(0);

    while (!builder.frontier_empty()) {
        const int q = builder.pop_frontier();
        // Copy: interning below may reallocate the state vector.
        const ArenaState origin = builder.state(q);
        if (origin.shape.bottom || origin.shape.terminal) {
            continue;  // no continuation is well-formed
        }
        const std::vector<Event> events =
            enumerate_events(origin.shape, variables, horizon);
        for (const Event& event : events) {
            if (!dfa.defined(event)) continue;
            // Every acceptor ignores the delay before the first event, so
            // only the canonical representative enters the arena.
            if (origin.shape.fresh && event.delta != 1) continue;

            std::vector<Action> ends_c, ends_e, starts_c, starts_e;
            for (const Action& action : event.actions) {
                const bool his = partition.is_charlie(action);
                if (action.kind == ActionKind::End) {
                    (his ? ends_c : ends_e).push_back(action);
                } else {
                    (his ? starts_c : starts_e).push_back(action);
                }
            }

            const DfaState next_base = dfa.dfa.successor(origin.base, event);
            const TvState next_shape =
                shape_automaton.successor(origin.shape, event);

            ArenaState target;
            target.kind = ArenaState::Kind::Original;
            target.base = next_base;
            target.shape = next_shape;

            auto partial = [&](ArenaState::Kind kind, std::int64_t delta,
                               std::vector<Action> accumulated) {
                ArenaState state;
                state.kind = kind;
                state.base = origin.base;
                state.shape = origin.shape;
                state.delta = delta;
                state.accumulated = std::move(accumulated);
                return state;
            };
            auto join = [](std::vector<Action> a, const std::vector<Action>& b) {
                a.insert(a.end(), b.begin(), b.end());
                std::sort(a.begin(), a.end());
                return a;
            };

            if (event.delta == 1) {
                const int n1 = builder.intern(
                    partial(ArenaState::Kind::EveEnds, 1, ends_c));
                builder.add_edge(q, MoveC::play(ends_c), n1);
                const std::vector<Action> all_ends = join(ends_c, ends_e);
                const int n2 = builder.intern(
                    partial(ArenaState::Kind::CharlieStarts, 1, all_ends));
                builder.add_edge(n1, MoveE::play(ends_e), n2);
                const std::vector<Action> with_starts = join(all_ends, starts_c);
                const int n3 = builder.intern(
                    partial(ArenaState::Kind::EveStarts, 1, with_starts));
                builder.add_edge(n2, MoveC::play(starts_c), n3);
                const int w = builder.intern(target);
                builder.add_edge(n3, MoveE::play(starts_e), w);
            } else {
                if (!ends_c.empty()) {
                    throw InputError(
                        "arena construction requires pruning away Charlie's "
                        "delayed ends; got " +
                        event_to_string(event));
                }
                const int n2 = builder.intern(partial(
                    ArenaState::Kind::CharlieStarts, event.delta, ends_e));
                const int n3 = builder.intern(
                    partial(ArenaState::Kind::EveStarts, event.delta,
                            join(ends_e, starts_c)));
                builder.add_edge(n2, MoveC::play(starts_c), n3);
                const int w = builder.intern(target);
                builder.add_edge(n3, MoveE::play(starts_e), w);
                for (std::int64_t wait = event.delta; wait <= horizon; ++wait) {
                    const int aw = builder.intern(
                        partial(ArenaState::Kind::AfterWait, wait, {}));
                    builder.add_edge(q, MoveC::wait(wait), aw);
                    builder.add_edge(aw, MoveE::play(event.delta, ends_e), n2);
                }
            }
        }
    }
    return builder.finish();
}

// ---------------------------------------------------------------------------
// Playing.
// ---------------------------------------------------------------------------

int read_play(const Arena& arena, const std::vector<Move>& play) {
    if (arena.states.empty()) throw InputError("empty arena");
    int current = arena.initial;
    for (std::size_t i = 0; i < play.size(); ++i) {
        const std::vector<Arena::Edge>& out = arena.edges[current];
        const auto it = std::find_if(
            out.begin(), out.end(), [&](const Arena::Edge& edge) {
                return edge.move == play[i];
            });
        if (it == out.end()) {
            throw ProtocolError("move " + std::to_string(i + 1) + " (" +
                                move_to_string(play[i]) +
                                ") is not applicable");
        }
        current = it->target;
    }
    return current;
}

// ---------------------------------------------------------------------------
// Rendering.
// ---------------------------------------------------------------------------

namespace {

std::string dot_escape_label(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string to_dot(const Arena& arena, const std::string& graph_name) {
    std::ostringstream out;
    out << "digraph " << graph_name << " {\n";
    out << "  rankdir=LR;\n";
    out << "  __init [shape=point, style=invis];\n";
    for (std::size_t i = 0; i < arena.states.size(); ++i) {
        const ArenaState& state = arena.states[i];
        std::string label = std::to_string(i);
        label += ':';
        label += kind_letter(state.kind);
        if (state.kind == ArenaState::Kind::AfterWait) {
            label += std::to_string(state.delta);
        } else if (state.kind != ArenaState::Kind::Original) {
            label += std::to_string(state.delta);
            label += ' ';
            label += actions_to_string(state.accumulated);
        }
        out << "  s" << i << " [shape="
            << (arena.turn[i] == Player::Charlie ? "box" : "diamond");
        if (arena.final_state[i]) out << ", peripheries=2";
        out << ", label=\"" << dot_escape_label(label) << "\"];\n";
    }
    out << "  __init -> s" << arena.initial << ";\n";
    for (std::size_t i = 0; i < arena.states.size(); ++i) {
        for (const Arena::Edge& edge : arena.edges[i]) {
            out << "  s" << i << " -> s" << edge.target << " [label=\""
                << dot_escape_label(move_to_string(edge.move)) << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

}  // namespace tbsynth
