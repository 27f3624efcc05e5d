#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tbsynth {

using Name = std::string;

/// Sentinel for an infinite upper bound. Finite bounds must stay well below
/// this value; bound arithmetic treats it as absorbing.
inline constexpr std::int64_t kInfinity = std::numeric_limits<std::int64_t>::max();

/// Renders a bound, using "inf" for kInfinity.
std::string bound_to_string(std::int64_t bound);

enum class Controllability { Controllable, Uncontrollable };

struct DurationBound {
    std::int64_t min = 0;
    std::int64_t max = kInfinity;

    bool is_trivial() const { return min == 0 && max == kInfinity; }
    friend bool operator==(const DurationBound&, const DurationBound&) = default;
};

/// A state variable: finite value domain, successor relation, per-value
/// duration bounds and per-value controllability tag.
struct StateVariable {
    Name name;
    std::vector<Name> values;                        // value domain, declaration order
    std::map<Name, std::vector<Name>> transitions;   // value -> allowed successor values
    std::map<Name, DurationBound> durations;         // total over values after validation
    std::map<Name, Controllability> control;         // total over values after validation

    bool has_value(const Name& v) const;
};

enum class Endpoint { Start, End };

/// Endpoint of a quantified token: start(a) or end(a).
struct Term {
    Endpoint endpoint = Endpoint::Start;
    Name token;

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term&, const Term&) = default;
};

std::string term_to_string(const Term& term);

/// Atom lhs <=_{lower,upper} rhs: lhs occurs at least `lower` and at most
/// `upper` time units before rhs. `upper` may be kInfinity.
struct Atom {
    Term lhs;
    Term rhs;
    std::int64_t lower = 0;
    std::int64_t upper = kInfinity;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Token quantifier a[x = v].
struct Quantifier {
    Name token;
    Name variable;
    Name value;

    friend bool operator==(const Quantifier&, const Quantifier&) = default;
};

/// One disjunct of a rule body: a quantifier prefix plus a clause of atoms.
/// Terms in the clause may also reference the rule's trigger token.
struct ExistentialStatement {
    std::vector<Quantifier> quantifiers;
    std::vector<Atom> clause;
};

/// Synchronization rule: trigger => disjunction of existential statements.
/// A disengaged trigger encodes the unsupported triggerless form; it is
/// reported by validate() and rejected by every downstream operation.
struct SyncRule {
    std::optional<Quantifier> trigger;
    std::vector<ExistentialStatement> statements;
};

struct PlanningProblem {
    std::vector<StateVariable> variables;
    std::vector<SyncRule> rules;

    const StateVariable* find_variable(const Name& name) const;
};

/// Two-player game: variables partitioned between the players, rules
/// partitioned into system (Charlie's goal) and domain (Eve's constraint).
struct GameSpec {
    std::vector<StateVariable> controlled; // Charlie decides start actions
    std::vector<StateVariable> external;   // Eve decides start actions
    std::vector<SyncRule> system_rules;
    std::vector<SyncRule> domain_rules;

    std::vector<StateVariable> all_variables() const;
    bool is_controlled(const Name& variable) const;
};

struct Diagnostic {
    std::string message;
    std::string context; // rule/variable path, empty when global
};

/// Structural validation. Empty result means the problem is well-formed.
/// Reported issues include duplicate or malformed identifiers, dangling
/// value references, inverted bounds and triggerless rules.
std::vector<Diagnostic> validate(const PlanningProblem& problem);
std::vector<Diagnostic> validate(const GameSpec& game);

/// True iff the name is a nonempty run of [A-Za-z0-9_].
bool is_valid_identifier(const Name& name);

/// Rewrites nontrivial duration bounds into explicit synchronization rules
/// (one per value: a[x=v] => start(a) within [dmin,dmax] of end(a)) and
/// resets every duration to (0, inf). Idempotent. Variable order, then value
/// order, determines the order of appended rules.
PlanningProblem desugar_durations(const PlanningProblem& problem);

/// Game variant: duration rules are appended to the system rules when the
/// value is controllable and to the domain rules otherwise.
GameSpec desugar_durations(const GameSpec& game);

/// Horizon bound d = max(L, U) + 1 over all rules, where L is the largest
/// lower bound and U the largest finite upper bound; 1 when no rule bound
/// exists. Compute after desugaring so duration bounds count.
std::int64_t horizon_d(const PlanningProblem& problem);
std::int64_t horizon_d(const GameSpec& game);

/// window(P): sum of every finite atom upper bound over all rules.
/// Compute after desugaring.
std::int64_t window(const PlanningProblem& problem);

/// Difference constraint lhs - rhs <= bound.
struct DifferenceConstraint {
    Term lhs;
    Term rhs;
    std::int64_t bound = 0;

    friend bool operator==(const DifferenceConstraint&, const DifferenceConstraint&) = default;
};

/// Constraint system of one statement: for each atom T <=_{l,u} T',
/// emit T' - T <= u (only when u is finite) and T - T' <= -l (always);
/// then, for the trigger and each quantified token, emit the duration
/// constraints start - end <= -dmin (when dmin > 0) and end - start <= dmax
/// (when dmax is finite). Variables supply the duration bounds.
std::vector<DifferenceConstraint> clause_to_constraints(
    const ExistentialStatement& statement,
    const Quantifier& trigger,
    const std::vector<StateVariable>& variables);

} // namespace tbsynth
