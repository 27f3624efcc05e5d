#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tbsynth/arena.hpp"
#include "tbsynth/solver.hpp"

namespace tbsynth {

/// Moore machine for Charlie: states are the reachable Charlie-turn
/// positions of the winning region, each emitting its strategy move and
/// reading Eve's reply.
struct MooreController {
    struct State {
        int arena_state = 0;  ///< provenance id in the source arena
        bool final = false;   ///< goal already reached here
        /// Strategy output.  Absent exactly on goal states that have no
        /// winning-region-preserving continuation (the machine halts).
        std::optional<MoveC> output;
        /// The output opens an ending round (ends or a wait) rather than a
        /// starting one; drives reconstruction of the played plan.
        bool ending_round = false;
        /// Defined exactly for the Eve moves legal after the output move;
        /// sorted canonically.
        std::vector<std::pair<MoveE, int>> transitions;
    };

    std::vector<State> states;  ///< index 0 is initial
    std::vector<StateVariable> variables;  ///< declaration context for plans
    std::size_t default_rounds = 1;  ///< simulation budget: arena size + 1
};

/// Assembles the machine from the winning strategy, breadth-first from the
/// initial position, pruning unreachable winning states.  Throws
/// ProtocolError when Eve wins the game.
MooreController build_controller(const Arena& arena,
                                 const StrategyTable& strategy);

struct StepResult {
    int state = 0;
    std::optional<MoveC> output;  ///< the new state's emission
};

/// One Moore step; the move must be among the state's defined transitions
/// (ProtocolError naming the legal set otherwise).
StepResult controller_step(const MooreController& ctrl, int state,
                           const MoveE& eve_move);

/// Eve strategies for simulation: a fixed script, reproducible uniform
/// draws over the legal moves, or an interactive callback receiving the
/// plan so far plus the legal moves.
struct EvePolicy {
    enum class Kind { Scripted, Random, Interactive };

    Kind kind = Kind::Scripted;
    std::vector<MoveE> script;
    std::uint64_t seed = 0;
    std::function<MoveE(const EventSequence&, const std::vector<MoveE>&)>
        choose;

    static EvePolicy scripted(std::vector<MoveE> moves);
    static EvePolicy uniform_random(std::uint64_t seed);
    static EvePolicy interactive(
        std::function<MoveE(const EventSequence&, const std::vector<MoveE>&)>
            choose);
};

struct Playout {
    std::vector<Round> play;
    int final_state = 0;
    bool reached_goal = false;
    EventSequence plan;  ///< round outcomes folded over the play
};

/// Runs the controller against the policy until the goal is reached, the
/// budget or script runs out, or the machine halts.  Bookkeeping rounds
/// with no actions fold as the identity on the plan.
Playout simulate(const MooreController& ctrl, const EvePolicy& policy,
                 std::size_t max_rounds);
Playout simulate(const MooreController& ctrl, const EvePolicy& policy);

/// Moore-machine diagram with outputs inside the nodes.
std::string to_dot(const MooreController& ctrl,
                   const std::string& graph_name = "controller");

}  // namespace tbsynth
