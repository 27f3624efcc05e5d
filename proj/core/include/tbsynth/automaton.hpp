#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tbsynth/events.hpp"
#include "tbsynth/matching.hpp"
#include "tbsynth/model.hpp"

namespace tbsynth {

// ---------------------------------------------------------------------------
// Timeline-validity automaton.
//
// Tracks, for a chosen subset of the state variables, whether the event
// sequence read so far is a legal parenthesization of tokens (every end
// closes the currently open token, starts never overlap, mid-sequence
// events never leave a token dangling) and, optionally, whether each
// token's successor value is allowed by the variable's transition
// function.  Acceptance means every tracked variable's timeline is closed:
// nothing open, nothing that ended without ever starting.
// ---------------------------------------------------------------------------

/// Per-variable entry: the variable never started / has no live token.
inline constexpr int kTvNever = -2;
/// Per-variable entry: the last token was closed by an end action.
inline constexpr int kTvClosed = -1;
// Any entry >= 0 is an index into the variable's value list: a token with
// that value is currently open.

struct TvState {
    bool bottom = false;
    /// No event has been consumed yet (starts need no same-event end).
    bool fresh = true;
    /// Some tracked token ended without ever starting.  Such sequences stay
    /// readable but are never accepted.
    bool open_left = false;
    /// The previous event ended a tracked token without restarting the
    /// variable.  Legal only as the last event: any further event is a
    /// violation.
    bool terminal = false;
    /// One entry per tracked variable: kTvNever, kTvClosed, or the open
    /// token's value index.
    std::vector<int> entries;

    friend bool operator==(const TvState&, const TvState&) = default;

    std::string key() const;
};

class TvAutomaton {
public:
    /// `check_transitions` additionally enforces each variable's transition
    /// function on consecutive token values.  Without it the automaton
    /// recognizes pure shape: which tokens are open, closed, or untouched.
    TvAutomaton(std::vector<StateVariable> variables, bool check_transitions);

    const std::vector<StateVariable>& variables() const { return variables_; }
    bool checks_transitions() const { return check_transitions_; }

    TvState initial() const;

    /// Total transition function.  Actions on untracked variables are
    /// ignored.  Throws InputError for actions naming unknown values of a
    /// tracked variable.
    TvState successor(const TvState& state, const Event& event) const;

    /// True iff nothing is open, nothing was open to the left, and the
    /// state is not Bottom.  The initial state is final: the empty
    /// sequence is trivially closed.
    bool is_final(const TvState& state) const;

private:
    std::vector<StateVariable> variables_;
    std::unordered_map<Name, std::size_t> variable_index_;
    bool check_transitions_;
};

// ---------------------------------------------------------------------------
// Synchronization-rule automaton.
//
// One state carries, per the construction:
//   - upsilon: the current set of matching structures (all rules mixed),
//   - delta:   per statement, the structures whose trigger has aged past
//              the window and that still might discharge it,
//   - phi:     per statement, the set of partner statements whose
//              discharge would also discharge this one's pending trigger.
// Bottom absorbs every violation (missed deadline or uncaptured trigger).
// ---------------------------------------------------------------------------

struct SyncState {
    bool bottom = false;
    /// Sorted by MatchingStructure::key().
    std::vector<MatchingStructure> upsilon;
    /// Indexed by global statement index; each bucket sorted by key.
    std::vector<std::vector<MatchingStructure>> delta;
    /// Indexed by global statement index; sorted statement indices.
    std::vector<std::vector<std::size_t>> phi;

    std::string key() const;
};

class SyncAutomaton {
public:
    /// `problem` must already be duration-desugared and validated; `horizon`
    /// is the global step bound d used to cap clocks at window + horizon.
    SyncAutomaton(std::shared_ptr<const PlanningProblem> problem, std::int64_t horizon);

    const PlanningProblem& problem() const { return *problem_; }
    const std::vector<CompiledStatement>& statements() const { return statements_; }
    std::int64_t window() const { return window_; }
    std::int64_t horizon() const { return horizon_; }

    SyncState initial() const;

    /// Total transition function; requires 1 <= event.delta <= horizon.
    SyncState successor(const SyncState& state, const Event& event) const;

    /// True iff no structure is active and every delta bucket is empty.
    bool is_final(const SyncState& state) const;

private:
    std::shared_ptr<const PlanningProblem> problem_;
    std::vector<CompiledStatement> statements_;
    /// statement indices grouped by rule, in declaration order
    std::vector<std::vector<std::size_t>> rule_statements_;
    std::int64_t window_ = 0;
    std::int64_t horizon_ = 1;
    std::int64_t clock_cap_ = 0;
};

// ---------------------------------------------------------------------------
// Lazy deterministic automata and combinators.
//
// States are type-erased behind a canonical string key plus a payload; the
// transition function is total (violations land in absorbing non-final
// sinks, complements of sinks are final).  Combinators compose lazily so
// product spaces are only materialized where exploration actually walks.
// ---------------------------------------------------------------------------

struct DfaPayload {
    virtual ~DfaPayload() = default;
};

struct DfaState {
    std::string key;
    std::shared_ptr<const DfaPayload> payload;
};

struct TvPayload final : DfaPayload {
    TvState state;
};

struct SyncPayload final : DfaPayload {
    SyncState state;
};

struct ProductPayload final : DfaPayload {
    DfaState left;
    DfaState right;
};

/// Payload accessors; return nullptr when the state was not produced by the
/// corresponding constructor.
const TvState* tv_payload(const DfaState& state);
const SyncState* sync_payload(const DfaState& state);
const ProductPayload* product_payload(const DfaState& state);

class LazyDfa {
public:
    using SuccessorFn = std::function<DfaState(const DfaState&, const Event&)>;
    using FinalFn = std::function<bool(const DfaState&)>;
    using DescribeFn = std::function<std::string(const DfaState&)>;

    LazyDfa() = default;
    LazyDfa(DfaState initial, SuccessorFn successor, FinalFn is_final, DescribeFn describe = {});

    const DfaState& initial() const { return initial_; }
    DfaState successor(const DfaState& state, const Event& event) const {
        return successor_(state, event);
    }
    bool is_final(const DfaState& state) const { return is_final_(state); }
    /// Human-readable state label for DOT output; defaults to the key.
    std::string describe(const DfaState& state) const;

private:
    DfaState initial_;
    SuccessorFn successor_;
    FinalFn is_final_;
    DescribeFn describe_;
};

LazyDfa make_tv_dfa(std::shared_ptr<const TvAutomaton> tv);
LazyDfa make_sync_dfa(std::shared_ptr<const SyncAutomaton> sync);

/// Product automaton accepting the intersection of the two languages.
LazyDfa intersect(const LazyDfa& a, const LazyDfa& b);
/// Product automaton accepting the union of the two languages.
LazyDfa unite(const LazyDfa& a, const LazyDfa& b);
/// Same state space, complemented acceptance.
LazyDfa complement(const LazyDfa& a);

// ---------------------------------------------------------------------------
// Exploration.
// ---------------------------------------------------------------------------

struct ExploredDfa {
    /// Index 0 is the initial state.
    std::vector<DfaState> states;
    std::vector<bool> final;
    /// Per state, (symbol, target index) in enumeration order.
    std::vector<std::vector<std::pair<Event, int>>> edges;
    std::unordered_map<std::string, int> index;
    std::vector<std::string> labels;

    int find(const std::string& key) const;
};

/// Default exploration budget: TBSYNTH_STATE_BUDGET from the environment,
/// else 250000 states.
std::size_t default_state_budget();

/// Breadth-first exploration with state interning by key.  `symbols` yields
/// the alphabet slice to expand at each state.  Throws ResourceError when
/// the number of distinct states would exceed `state_budget`.
ExploredDfa explore(const LazyDfa& dfa,
                    const std::function<std::vector<Event>(const DfaState&)>& symbols,
                    std::size_t state_budget);

/// Graphviz rendering of an explored automaton: doublecircle finals,
/// edges labeled with their events.
std::string to_dot(const ExploredDfa& explored, const std::string& graph_name = "dfa");

/// Splits events whose delta exceeds `horizon` into empty padding events so
/// every delta fits in [1, horizon].  Language-preserving for all automata
/// built here.
EventSequence normalize_deltas(const EventSequence& seq, std::int64_t horizon);

/// Runs the word through the automaton (after delta normalization) and
/// reports acceptance.
bool accepts(const LazyDfa& dfa, const EventSequence& seq, std::int64_t horizon);

// ---------------------------------------------------------------------------
// Shape-guided event enumeration.
//
// Enumerates exactly the events that extend a left-closed well-formed
// sequence with shape `shape` to a longer well-formed sequence: ends of
// open tokens (value forced), restarts of just-ended variables (any value;
// transition functions are deliberately ignored so that violating them
// stays a reachable, classifiable behaviour), first-event starts, bare
// ends, and the empty event, each at every delta in [1, horizon].
// ---------------------------------------------------------------------------
std::vector<Event> enumerate_events(const TvState& shape,
                                    const std::vector<StateVariable>& variables,
                                    std::int64_t horizon);

// ---------------------------------------------------------------------------
// Planning-language automaton: sync rules x strict timeline validity.
// ---------------------------------------------------------------------------

struct PlanningAutomata {
    std::shared_ptr<const PlanningProblem> problem;  ///< desugared copy
    std::shared_ptr<const SyncAutomaton> sync;
    std::shared_ptr<const TvAutomaton> tv;     ///< all variables, strict
    std::shared_ptr<const TvAutomaton> shape;  ///< all variables, shape only
    LazyDfa dfa;                               ///< sync x tv product
    std::int64_t horizon = 1;

    /// Symbol callback for explore(): shape-guided enumeration driven by
    /// the tv component of the product state.
    std::function<std::vector<Event>(const DfaState&)> symbols() const;
};

/// Validates, desugars durations, and assembles the planning automaton.
PlanningAutomata build_planning_automata(const PlanningProblem& problem);

}  // namespace tbsynth
