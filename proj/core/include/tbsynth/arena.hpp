#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tbsynth/automaton.hpp"
#include "tbsynth/events.hpp"
#include "tbsynth/model.hpp"

namespace tbsynth {

enum class Player { Charlie, Eve };

std::string player_to_string(Player player);

// ---------------------------------------------------------------------------
// Action ownership.
// ---------------------------------------------------------------------------

/// Which player may play each action: Charlie owns the starts of his
/// variables and the ends of controllable values (of either side's
/// variables); Eve owns the rest.  The two sets partition the action
/// universe.
struct ActionPartition {
    std::vector<Action> charlie;
    std::vector<Action> eve;

    bool is_charlie(const Action& action) const;
};

ActionPartition partition_actions(const GameSpec& game);

// ---------------------------------------------------------------------------
// Moves and rounds.
// ---------------------------------------------------------------------------

/// Charlie either waits 1..d time units or plays a homogeneous set of his
/// actions.  Real player moves have nonempty play sets; the arena's internal
/// chain bookkeeping also materializes play({}) edges where a phase has
/// nothing for Charlie to contribute.
struct MoveC {
    enum class Kind { Wait, Play };
    Kind kind = Kind::Play;
    std::int64_t wait_delta = 0;   // Wait only
    std::vector<Action> actions;   // Play only; kept sorted

    static MoveC wait(std::int64_t delta);
    static MoveC play(std::vector<Action> actions);

    friend bool operator==(const MoveC&, const MoveC&) = default;
    friend auto operator<=>(const MoveC&, const MoveC&) = default;
};

/// Eve plays a homogeneous, possibly empty set of her actions; in reply to a
/// wait she additionally picks the interruption delay delta <= Charlie's.
struct MoveE {
    bool has_delta = false;
    std::int64_t delta = 0;        // meaningful iff has_delta
    std::vector<Action> actions;   // kept sorted

    static MoveE play(std::vector<Action> actions);
    static MoveE play(std::int64_t delta, std::vector<Action> actions);

    friend bool operator==(const MoveE&, const MoveE&) = default;
    friend auto operator<=>(const MoveE&, const MoveE&) = default;
};

using Move = std::variant<MoveC, MoveE>;

std::string move_to_string(const MoveC& move);
std::string move_to_string(const MoveE& move);
std::string move_to_string(const Move& move);
bool move_less(const Move& a, const Move& b);

/// One simultaneous exchange.  `ending` tags the round kind explicitly:
/// action sets may be empty (bookkeeping), so the kind is not always
/// recoverable from the moves themselves.
struct Round {
    MoveC charlie;
    MoveE eve;
    bool ending = false;
};

/// Result of applying one round to a partial plan.
struct RoundOutcome {
    bool applicable = false;
    /// 'a' (the merged word breaks token parenthesization) or 'b' (the
    /// round's kind disagrees with the openness of the touched variables);
    /// 0 when applicable.
    char violated = 0;
    EventSequence result;
};

/// Applies a round per the game semantics: an ending round appends the new
/// event (A, delta_E), a starting round merges its actions into the last
/// event (on the empty plan it creates the first event with delta 1).
/// Applicability: (a) the result must stay well-formed, and (b) the round is
/// ending iff every variable appearing in its moves has an open token.
RoundOutcome round_outcome(const EventSequence& seq, const Round& round,
                           const std::vector<StateVariable>& variables);

// ---------------------------------------------------------------------------
// Game automaton: system side vs complemented domain side.
// ---------------------------------------------------------------------------

struct GameAutomata {
    std::shared_ptr<const GameSpec> game;  ///< desugared copy
    /// Side problems share the full variable set; rules differ.
    std::shared_ptr<const PlanningProblem> system_side;
    std::shared_ptr<const PlanningProblem> domain_side;
    std::shared_ptr<const SyncAutomaton> sync_system;
    std::shared_ptr<const SyncAutomaton> sync_domain;
    std::shared_ptr<const TvAutomaton> tv_controlled;  ///< strict, Charlie's vars
    std::shared_ptr<const TvAutomaton> tv_external;    ///< strict, Eve's vars
    std::shared_ptr<const TvAutomaton> shape;          ///< lax, all vars
    /// union(system_side ∩ tv_controlled, complement(domain_side ∩ tv_external))
    LazyDfa dfa;
    std::int64_t horizon = 1;  ///< shared step bound over both sides
    ActionPartition partition;
};

/// Validates, desugars (routing duration rules to the side owning the
/// value), and assembles the game automaton.
GameAutomata build_game_automata(const GameSpec& game);

/// The spec'd single-result view of build_game_automata.
LazyDfa build_game_dfa(const GameSpec& game);

// ---------------------------------------------------------------------------
// Pruning.
// ---------------------------------------------------------------------------

/// Which actions count as Charlie's ends for pruning: by controllability tag
/// (the reading consistent with action ownership) or by variable ownership
/// (the construction text's literal wording, kept for comparison).
enum class PruneReading { Controllability, Ownership };

/// A lazily evaluated partial automaton: `defined` tells which symbols keep
/// their transition.
struct PrunedDfa {
    LazyDfa dfa;
    std::function<bool(const Event&)> defined;
};

/// Removes every delta > 1 transition whose event contains an ending action
/// playable by Charlie; the same outcomes remain reachable through an empty
/// padding event followed by the action set at delta 1.
PrunedDfa prune(const LazyDfa& dfa, const GameSpec& game,
                PruneReading reading = PruneReading::Controllability);

// ---------------------------------------------------------------------------
// Arena.
// ---------------------------------------------------------------------------

/// One interned arena position.  Original positions carry a base-automaton
/// state; the other kinds are the intermediate stops of the per-transition
/// move chains (wait target, then the partially accumulated event).  The
/// kind names the move expected next; the turn owner follows from it.
struct ArenaState {
    enum class Kind {
        Original,       // Charlie: wait or open an ending phase
        AfterWait,      // Eve: interrupt with play(delta, ends)
        EveEnds,        // Eve: add her ends (delta = 1 chains)
        CharlieStarts,  // Charlie: add his starts
        EveStarts,      // Eve: add her starts, completing the event
    };

    Kind kind = Kind::Original;
    DfaState base;   // game-automaton component
    TvState shape;   // all-variables openness tracker
    std::int64_t delta = 0;           // AfterWait: Charlie's wait; else event delta
    std::vector<Action> accumulated;  // actions of the event committed so far

    Player turn() const;
    std::string key() const;
};

struct Arena {
    struct Edge {
        Move move;
        int target = 0;
    };

    std::vector<ArenaState> states;  // index 0 is initial
    std::vector<std::vector<Edge>> edges;  // sorted by move
    std::vector<Player> turn;
    /// Original kind with accepting base; the initial (pristine) position is
    /// never final — success is judged only after at least one round.
    std::vector<bool> final_state;
    std::unordered_map<std::string, int> index;
    std::vector<StateVariable> variables;  // declaration context for plans
    int initial = 0;

    int find(const std::string& key) const;
};

/// Unfolds every defined base transition into its move chain, breadth-first
/// from the initial position, interning states and deduplicating edges.
/// Enumeration of candidate events is driven by the live openness profile,
/// so only applicable rounds materialize; the first event's delay (which no
/// acceptor distinguishes) is canonicalized to 1.  Throws ResourceError past
/// the state budget.
Arena split(const PrunedDfa& dfa, const GameSpec& game,
            std::size_t state_budget = default_state_budget());

/// Follows the moves from the initial state; every move must label an
/// existing edge of the current state (ProtocolError otherwise).
int read_play(const Arena& arena, const std::vector<Move>& play);

/// Graphviz rendering: Charlie states are boxes, Eve states diamonds, final
/// states get a double border.
std::string to_dot(const Arena& arena, const std::string& graph_name = "arena");

}  // namespace tbsynth
