#include "corpus.hpp"

#include <map>
#include <utility>

namespace corpus {

using namespace tbsynth;

StateVariable make_variable(Name name, std::vector<Name> values,
                            std::map<Name, std::vector<Name>> transitions,
                            Controllability control) {
    StateVariable variable;
    variable.name = std::move(name);
    variable.values = std::move(values);
    variable.transitions = std::move(transitions);
    for (const Name& value : variable.values) {
        variable.durations[value] = DurationBound{};
        variable.control[value] = control;
    }
    return variable;
}

Action start(Name variable, Name value) {
    return {ActionKind::Start, std::move(variable), std::move(value)};
}

Action end(Name variable, Name value) {
    return {ActionKind::End, std::move(variable), std::move(value)};
}

Term term_start(Name token) { return {Endpoint::Start, std::move(token)}; }
Term term_end(Name token) { return {Endpoint::End, std::move(token)}; }

// ---------------------------------------------------------------------------
// Regression problem.
// ---------------------------------------------------------------------------

PlanningProblem worked_problem() {
    PlanningProblem problem;
    problem.variables = {
        make_variable("x0", {"v0", "v0p"}, {{"v0", {"v0p"}}, {"v0p", {"v0"}}}),
        make_variable("x1", {"v1p", "v1", "v1pp"},
                      {{"v1p", {"v1"}}, {"v1", {"v1pp"}}, {"v1pp", {"v1p"}}}),
        make_variable("x2", {"v2p", "v2", "v2pp"},
                      {{"v2p", {"v2"}}, {"v2", {"v2pp"}}, {"v2pp", {"v2p"}}}),
        make_variable("x3", {"v3", "v3p"}, {{"v3", {"v3p"}}, {"v3p", {"v3"}}}),
    };
    SyncRule rule;
    rule.trigger = Quantifier{"a0", "x0", "v0"};
    ExistentialStatement statement;
    statement.quantifiers = {{"a1", "x1", "v1"}, {"a2", "x2", "v2"}, {"a3", "x3", "v3"}};
    statement.clause = {
        Atom{term_start("a1"), term_end("a0"), 4, 14},
        Atom{term_end("a0"), term_end("a2"), 0, kInfinity},
        Atom{term_start("a2"), term_end("a3"), 0, 3},
    };
    rule.statements = {statement};
    problem.rules = {rule};
    return problem;
}

EventSequence worked_plan() {
    return {
        make_event({start("x0", "v0"), start("x1", "v1p"), start("x2", "v2p"),
                    start("x3", "v3")},
                   1),
        make_event({end("x2", "v2p"), start("x2", "v2")}, 5),
        make_event({end("x1", "v1p"), start("x1", "v1")}, 1),
        make_event({end("x3", "v3"), start("x3", "v3p")}, 2),
        make_event({end("x1", "v1"), start("x1", "v1pp")}, 6),
        make_event({end("x0", "v0"), start("x0", "v0p"), end("x2", "v2"),
                    start("x2", "v2pp")},
                   2),
        make_event({end("x0", "v0p"), end("x1", "v1pp"), end("x2", "v2pp"),
                    end("x3", "v3p")},
                   4),
    };
}

// ---------------------------------------------------------------------------
// Tiny problems.
// ---------------------------------------------------------------------------

namespace {

StateVariable flip_variable(Name name, Name low, Name high) {
    return make_variable(std::move(name), {low, high},
                         {{low, {high}}, {high, {low}}});
}

PlanningProblem free_flipflop() {
    PlanningProblem problem;
    problem.variables = {flip_variable("f", "p", "q")};
    return problem;
}

PlanningProblem bounded_pairing() {
    PlanningProblem problem;
    problem.variables = {flip_variable("f", "p", "q")};
    SyncRule rule;
    rule.trigger = Quantifier{"t", "f", "p"};
    ExistentialStatement statement;
    statement.quantifiers = {{"b", "f", "q"}};
    statement.clause = {Atom{term_start("t"), term_start("b"), 0, 2}};
    rule.statements = {statement};
    problem.rules = {rule};
    return problem;
}

PlanningProblem window_crossing() {
    // The only atom has no finite upper bound, so window(P) == 0 while
    // satisfaction needs the trigger to age at least four units: every
    // pending match outlives the window and must survive as a residual.
    PlanningProblem problem;
    problem.variables = {flip_variable("f", "p", "q")};
    SyncRule rule;
    rule.trigger = Quantifier{"t", "f", "p"};
    ExistentialStatement statement;
    statement.quantifiers = {{"b", "f", "q"}};
    statement.clause = {Atom{term_start("t"), term_start("b"), 4, kInfinity}};
    rule.statements = {statement};
    problem.rules = {rule};
    return problem;
}

PlanningProblem sugared_durations() {
    PlanningProblem problem;
    StateVariable machine = flip_variable("m", "run", "idle");
    machine.durations["run"] = DurationBound{1, 2};
    problem.variables = {machine};
    return problem;
}

PlanningProblem two_variable_link() {
    PlanningProblem problem;
    problem.variables = {
        flip_variable("g", "go", "stop"),
        make_variable("h", {"tick"}, {{"tick", {"tick"}}}),
    };
    SyncRule rule;
    rule.trigger = Quantifier{"t", "g", "go"};
    ExistentialStatement statement;
    statement.quantifiers = {{"b", "h", "tick"}};
    statement.clause = {Atom{term_start("b"), term_start("t"), 0, 1}};
    rule.statements = {statement};
    problem.rules = {rule};
    return problem;
}

PlanningProblem two_disjuncts() {
    PlanningProblem problem;
    problem.variables = {flip_variable("f", "p", "q")};
    SyncRule rule;
    rule.trigger = Quantifier{"t", "f", "p"};
    ExistentialStatement paired;
    paired.quantifiers = {{"b", "f", "q"}};
    paired.clause = {Atom{term_start("t"), term_start("b"), 1, 2}};
    ExistentialStatement self_bounded;
    self_bounded.clause = {Atom{term_start("t"), term_end("t"), 0, 3}};
    rule.statements = {paired, self_bounded};
    problem.rules = {rule};
    return problem;
}

}  // namespace

std::vector<NamedProblem> tiny_problems() {
    return {
        {"free-flipflop", free_flipflop()},
        {"bounded-pairing", bounded_pairing()},
        {"window-crossing", window_crossing()},
        {"sugared-durations", sugared_durations()},
        {"two-variable-link", two_variable_link()},
        {"two-disjuncts", two_disjuncts()},
    };
}

// ---------------------------------------------------------------------------
// Games.
// ---------------------------------------------------------------------------

GameSpec trivial_game() {
    GameSpec game;
    game.controlled = {make_variable("x", {"a"}, {{"a", {"a"}}})};
    return game;
}

GameSpec small_game() {
    GameSpec game;
    game.controlled = {make_variable("x", {"a", "b"},
                                     {{"a", {"b"}}, {"b", {"a"}}})};
    game.external = {make_variable("y", {"u"}, {{"u", {"u"}}},
                                   Controllability::Uncontrollable)};
    SyncRule rule;
    rule.trigger = Quantifier{"a0", "x", "a"};
    ExistentialStatement statement;
    statement.quantifiers = {{"b0", "y", "u"}};
    statement.clause = {Atom{term_start("b0"), term_start("a0"), 0, 2}};
    rule.statements = {statement};
    game.system_rules = {rule};
    return game;
}

GameSpec deadline_game() {
    GameSpec game;
    game.external = {make_variable("y", {"w"}, {{"w", {"w"}}},
                                   Controllability::Uncontrollable)};
    SyncRule rule;
    rule.trigger = Quantifier{"a", "y", "w"};
    ExistentialStatement statement;
    statement.clause = {Atom{term_start("a"), term_end("a"), 0, 5}};
    rule.statements = {statement};
    game.system_rules = {rule};
    return game;
}

GameSpec domain_game() {
    GameSpec game;
    game.controlled = {make_variable("x", {"a", "b"},
                                     {{"a", {"b"}}, {"b", {"a"}}})};
    game.external = {make_variable("y", {"u", "v"},
                                   {{"u", {"v"}}, {"v", {"u"}}},
                                   Controllability::Uncontrollable)};
    SyncRule system;
    system.trigger = Quantifier{"a0", "x", "a"};
    ExistentialStatement want_external;
    want_external.quantifiers = {{"b0", "y", "u"}};
    want_external.clause = {Atom{term_start("b0"), term_start("a0"), 0, 2}};
    system.statements = {want_external};
    game.system_rules = {system};

    SyncRule domain;
    domain.trigger = Quantifier{"d0", "y", "v"};
    ExistentialStatement answer;
    answer.quantifiers = {{"e0", "x", "b"}};
    answer.clause = {Atom{term_start("d0"), term_start("e0"), 0, 2}};
    domain.statements = {answer};
    game.domain_rules = {domain};
    return game;
}

std::vector<NamedGame> games() {
    return {
        {"trivial", trivial_game()},
        {"small", small_game()},
        {"deadline", deadline_game()},
        {"domain", domain_game()},
    };
}

// ---------------------------------------------------------------------------
// Synthetic arenas.
// ---------------------------------------------------------------------------

namespace {

/// Minimal arena scaffolding: states identified by synthetic base keys, the
/// turn derived from the kind exactly as in built arenas.
struct ArenaBuilder {
    Arena arena;

    int add(ArenaState::Kind kind, const std::string& tag, bool final) {
        ArenaState state;
        state.kind = kind;
        state.base.key = tag;
        const int id = static_cast<int>(arena.states.size());
        arena.states.push_back(state);
        arena.edges.emplace_back();
        arena.turn.push_back(state.turn());
        arena.final_state.push_back(final);
        arena.index[state.key()] = id;
        return id;
    }

    void edge(int from, Move move, int to) {
        arena.edges[static_cast<std::size_t>(from)].push_back(
            Arena::Edge{std::move(move), to});
    }

    Arena take() {
        arena.initial = 0;
        arena.variables = {};
        return std::move(arena);
    }
};

}  // namespace

Arena eve_wins_arena() {
    ArenaBuilder builder;
    const int c0 = builder.add(ArenaState::Kind::Original, "c0", false);
    const int e0 = builder.add(ArenaState::Kind::EveStarts, "e0", false);
    builder.edge(c0, MoveC::play({}), e0);
    builder.edge(e0, MoveE::play({}), c0);
    return builder.take();
}

Arena dead_end_arena() {
    ArenaBuilder builder;
    const int root = builder.add(ArenaState::Kind::Original, "root", false);
    const int pre_goal = builder.add(ArenaState::Kind::EveStarts, "pre", false);
    const int detour = builder.add(ArenaState::Kind::EveStarts, "detour", false);
    const int goal = builder.add(ArenaState::Kind::Original, "goal", true);
    const int eve_stuck = builder.add(ArenaState::Kind::EveStarts, "estuck", false);
    const int charlie_stuck =
        builder.add(ArenaState::Kind::Original, "cstuck", false);

    builder.edge(root, MoveC::wait(1), pre_goal);
    builder.edge(root, MoveC::play({}), detour);
    // pre is reached by a wait move, so Eve's reply carries the delta.
    builder.edge(pre_goal, MoveE::play(1, {}), goal);
    builder.edge(detour, MoveE::play({}), root);
    builder.edge(detour, MoveE::play(1, {}), eve_stuck);
    builder.edge(goal, MoveC::play({}), charlie_stuck);
    return builder.take();
}

Arena halting_goal_arena() {
    ArenaBuilder builder;
    const int root = builder.add(ArenaState::Kind::Original, "root", false);
    const int pre_goal = builder.add(ArenaState::Kind::EveStarts, "pre", false);
    const int goal = builder.add(ArenaState::Kind::Original, "goal", true);
    const int after = builder.add(ArenaState::Kind::EveStarts, "after", false);
    const int lost = builder.add(ArenaState::Kind::Original, "lost", false);

    builder.edge(root, MoveC::play({}), pre_goal);
    builder.edge(pre_goal, MoveE::play({}), goal);
    builder.edge(goal, MoveC::play({}), after);
    builder.edge(after, MoveE::play({}), lost);
    return builder.take();
}

}  // namespace corpus
