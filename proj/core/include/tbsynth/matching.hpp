#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "tbsynth/dbm.hpp"
#include "tbsynth/events.hpp"
#include "tbsynth/model.hpp"

namespace tbsynth {

/// Position of an existential statement inside a rule set: (rule, disjunct).
struct StatementId {
    int rule = 0;
    int statement = 0;
    auto operator<=>(const StatementId&) const = default;
};

std::string statement_id_to_string(const StatementId& id);

/// One token of a compiled statement together with its two term indices.
struct CompiledToken {
    Name token;
    Name variable;
    Name value;
    std::size_t start_term = 0;
    std::size_t end_term = 0;
};

/// A statement preprocessed for the matching machinery: the trigger token
/// followed by the quantified tokens, the term universe (start/end per token,
/// in token order), and the unshifted constraint matrix.
struct CompiledStatement {
    StatementId id;
    std::vector<CompiledToken> tokens; // tokens[0] is the trigger
    std::vector<Term> terms;
    Dbm initial_dbm;

    const CompiledToken& trigger() const { return tokens.front(); }
};

/// Compiles every statement of every rule.  The problem must be validated;
/// rules are expected to be duration-desugared already.  The returned vector's
/// element addresses must stay stable while matching structures reference them.
std::vector<CompiledStatement> compile_statements(const PlanningProblem& problem);

/// Partial-satisfaction tracker for one statement: which terms have been seen
/// (matched), the constraint matrix as shifted so far, and the time elapsed
/// since the trigger start was matched (clock).
struct MatchingStructure {
    const CompiledStatement* statement = nullptr;
    Dbm dbm;
    std::vector<bool> matched; // aligned with statement->terms
    std::int64_t clock = 0;

    bool is_closed() const;   // every term matched
    bool is_initial() const;  // no term matched
    bool is_active() const;   // trigger start matched and not closed
    /// Active and no finite upper bound constrains any unmatched term against
    /// a matched one — the structure can be extended indefinitely.
    bool is_residual() const;

    bool operator==(const MatchingStructure& other) const;

    /// Canonical encoding (statement id, matched set, clock, dbm) used for
    /// deduplication and state interning.
    std::string key() const;

    std::string to_string() const;
};

/// The fresh structure for a statement: nothing matched, clock 0, initial dbm.
MatchingStructure initial_structure(const CompiledStatement& statement);

/// True iff elapsing the event's delta violates no upper bound between a
/// matched and an unmatched term.
bool admissible(const MatchingStructure& ms, const Event& event);

/// Indices of unmatched end terms the event forces into any match: end(a) such
/// that start(a) is matched and the event ends a token of a's variable/value.
std::vector<std::size_t> forced_ends(const MatchingStructure& ms, const Event& event);

/// All term sets I (sorted index lists) for which the event is an I-match:
/// admissible, start terms backed by start actions, end terms exactly the
/// forced ones, and the ordering/lower-bound/exactness side conditions hold.
/// Inadmissible events yield no candidates; the empty set is a candidate
/// whenever the event is admissible and no end is forced.
std::vector<std::vector<std::size_t>> i_match_candidates(const MatchingStructure& ms,
                                                         const Event& event);

/// Shifts the structure by the event's delta (clock advances only if it was
/// active, saturating at clock_cap) and then matches the chosen term set.
/// `chosen` must come from i_match_candidates.
MatchingStructure apply(const MatchingStructure& ms, const Event& event,
                        const std::vector<std::size_t>& chosen, std::int64_t clock_cap);

/// Every structure reachable from the given set through one event: the union
/// of apply over all structures and all candidate matches, deduplicated and
/// sorted by key.
std::vector<MatchingStructure> step(const std::vector<MatchingStructure>& structures,
                                    const Event& event, std::int64_t clock_cap);

} // namespace tbsynth
