#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tbsynth/events.hpp"
#include "tbsynth/model.hpp"

// Ground-truth reference semantics, deliberately implemented by plain
// backtracking search and enumeration with no reuse of the distance-matrix
// machinery: agreement between this module and the automaton pipeline is
// what the acceptance suite measures.
namespace tbsynth::oracle {

/// Witness for one existential statement: every term used by the clause is
/// mapped to the event position (1-based) where its action occurs, with the
/// start/end of each quantified token naming one real token's endpoints.
struct MatchingAssignment {
    std::map<Term, std::size_t> positions;
};

/// Searches for a witness of `statement` (of a rule with `trigger`) where
/// the trigger token is the one starting at event `trigger_position`.
/// Precondition: seq passes check_event_sequence.
std::optional<MatchingAssignment> find_matching(
    const EventSequence& seq, const Quantifier& trigger,
    std::size_t trigger_position, const ExistentialStatement& statement);

/// Def.-level rule satisfaction: every occurrence of the trigger action
/// admits a witness for at least one statement.
/// Precondition: seq passes check_event_sequence.
bool satisfies_rule(const EventSequence& seq, const SyncRule& rule);

/// Reference solution-plan predicate: well-formed, closed on every
/// variable, transition functions respected, and every rule of the
/// duration-desugared problem satisfied.
bool is_solution_plan(const EventSequence& seq,
                      const PlanningProblem& problem);

struct EnumBounds {
    std::size_t max_length = 0;
    std::int64_t max_delta = 1;
    /// Upper bound on generated sequences before refusing.
    std::size_t guard = 2000000;
};

/// Every well-formed event sequence over the variables within the bounds,
/// each exactly once, in a deterministic order (depth-first by event order,
/// prefixes included).  Throws ResourceError once more than `guard`
/// sequences would be produced.
std::vector<EventSequence> enumerate_sequences(
    const std::vector<StateVariable>& variables, const EnumBounds& bounds);

enum class Verdict { Charlie, Eve, Unknown };

std::string verdict_to_string(Verdict verdict);

/// Bounded backward induction over applicable rounds, mirroring the arena's
/// per-event move chains (three-valued: depth exhaustion yields Unknown).
/// A node is winning for Charlie when the plan built so far — after at
/// least one round — satisfies the system rules with his timelines closed
/// and coherent, or when the environment's side is broken; depth counts
/// events.  Throws ResourceError past `node_guard` explored event nodes.
Verdict minimax_winner(const GameSpec& game, std::size_t depth,
                       std::size_t node_guard = 2000000);

}  // namespace tbsynth::oracle
