#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tbsynth/model.hpp"

namespace tbsynth {

enum class ActionKind { Start, End };

/// start(x, v) or end(x, v).
struct Action {
    ActionKind kind = ActionKind::Start;
    Name variable;
    Name value;

    friend bool operator==(const Action&, const Action&) = default;
    friend auto operator<=>(const Action&, const Action&) = default;
};

std::string action_to_string(const Action& action);

/// One event: a set of simultaneous actions happening `delta` time units
/// after the previous event (delta >= 1; the first event's delta is
/// conventional). Actions are kept sorted and duplicate-free.
struct Event {
    std::vector<Action> actions;
    std::int64_t delta = 1;

    friend bool operator==(const Event&, const Event&) = default;
    friend auto operator<=>(const Event&, const Event&) = default;
};

std::string event_to_string(const Event& event);

/// Canonicalizes (sorts + dedups) and checks the per-event invariant:
/// delta >= 1 and at most one start and one end per variable.
/// Throws InputError on violation.
Event make_event(std::vector<Action> actions, std::int64_t delta);

using EventSequence = std::vector<Event>;

/// Well-formedness verdict. On failure, `position` is the first violating
/// event (1-based) and `conditions` lists every violated well-formedness
/// condition (1-4) at that position, ascending.
struct CheckResult {
    bool ok = true;
    int position = 0;
    std::vector<int> conditions;
};

/// Checks the four token-parenthesization conditions:
///  1. no second start of a variable while a token is open;
///  2. every end matches the value of the open token, and no two ends of a
///     variable occur without an interleaving start;
///  3. an end not accompanied by a same-variable start only in the last event;
///  4. a start not accompanied by a same-variable end only in the first event.
/// Actions must reference declared variables/values (InputError otherwise).
CheckResult check_event_sequence(const EventSequence& seq,
                                 const std::vector<StateVariable>& variables);

/// Elapsed time between events i and j (1-based, i <= j): sum of deltas of
/// events i+1..j. Zero when i == j.
std::int64_t duration_between(const EventSequence& seq, int i, int j);

/// One token occurrence reconstructed from an event sequence. Missing
/// start_index means the token is open to the left; missing end_index means
/// open to the right. Indices are 1-based.
struct TokenView {
    Name variable;
    Name value;
    std::optional<int> start_index;
    std::optional<int> end_index;

    friend bool operator==(const TokenView&, const TokenView&) = default;
};

/// Tokens of one variable in order of occurrence.
/// Precondition: seq passes check_event_sequence.
std::vector<TokenView> tokens_of(const EventSequence& seq, const Name& variable);

enum class Openness { Closed, OpenRight, OpenLeft, OpenBoth };

/// Openness of one variable's timeline within the sequence.
/// Precondition: seq passes check_event_sequence.
Openness openness(const EventSequence& seq, const Name& variable);

/// The first event's delta carries no meaning; the canonical form uses 1.
/// Returns the canonicalized sequence and whether a change was made.
struct CanonicalizeResult {
    EventSequence sequence;
    bool changed = false;
};
CanonicalizeResult canonicalize_first_delta(EventSequence seq);

} // namespace tbsynth
