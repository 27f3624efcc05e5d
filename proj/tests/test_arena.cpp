// Arena layer: action ownership, move protocol, round application, the
// two-sided game automaton, pruning, and the split into a turn-based graph.
#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "doctest.h"
#include "tbsynth/arena.hpp"
#include "tbsynth/automaton.hpp"
#include "tbsynth/errors.hpp"
#include "tbsynth/events.hpp"
#include "tbsynth/model.hpp"

using namespace tbsynth;

namespace {

// Every declared action of the game, for coverage checks.
std::vector<Action> action_universe(const GameSpec& game) {
    std::vector<Action> out;
    for (const StateVariable& variable : game.all_variables()) {
        for (const Name& value : variable.values) {
            out.push_back(Action{ActionKind::Start, variable.name, value});
            out.push_back(Action{ActionKind::End, variable.name, value});
        }
    }
    return out;
}

bool contains(const std::vector<Action>& set, const Action& action) {
    return std::find(set.begin(), set.end(), action) != set.end();
}

}  // namespace

TEST_SUITE_BEGIN("arena");

TEST_CASE("action partition splits by ownership and controllability") {
    const GameSpec game = corpus::small_game();
    const ActionPartition partition = partition_actions(game);

    // x is Charlie's variable with controllable values: all four actions his.
    CHECK(partition.charlie.size() == 4);
    CHECK(contains(partition.charlie, corpus::start("x", "a")));
    CHECK(contains(partition.charlie, corpus::start("x", "b")));
    CHECK(contains(partition.charlie, corpus::end("x", "a")));
    CHECK(contains(partition.charlie, corpus::end("x", "b")));
    // y is external with an uncontrollable value: both actions Eve's.
    CHECK(partition.eve.size() == 2);
    CHECK(contains(partition.eve, corpus::start("y", "u")));
    CHECK(contains(partition.eve, corpus::end("y", "u")));

    SUBCASE("the two sets cover the universe disjointly") {
        for (const Action& action : action_universe(game)) {
            const bool his = contains(partition.charlie, action);
            const bool hers = contains(partition.eve, action);
            CHECK(his != hers);
            CHECK(partition.is_charlie(action) == his);
        }
        CHECK(std::is_sorted(partition.charlie.begin(), partition.charlie.end()));
        CHECK(std::is_sorted(partition.eve.begin(), partition.eve.end()));
    }

    SUBCASE("starts follow the variable, ends follow the value") {
        // An external variable may still have a controllable value; its start
        // stays Eve's while the matching end becomes Charlie's, and dually
        // for an uncontrollable value on Charlie's variable.
        GameSpec mixed;
        mixed.controlled = {corpus::make_variable(
            "w", {"m"}, {{"m", {"m"}}}, Controllability::Uncontrollable)};
        mixed.external = {corpus::make_variable(
            "z", {"c"}, {{"c", {"c"}}}, Controllability::Controllable)};
        const ActionPartition p = partition_actions(mixed);
        CHECK(p.is_charlie(corpus::start("w", "m")));
        CHECK(!p.is_charlie(corpus::end("w", "m")));
        CHECK(!p.is_charlie(corpus::start("z", "c")));
        CHECK(p.is_charlie(corpus::end("z", "c")));
    }
}

TEST_CASE("moves canonicalize their action sets and order stably") {
    SUBCASE("constructors validate") {
        CHECK_THROWS_AS(MoveC::wait(0), InputError);
        CHECK_THROWS_AS(MoveE::play(0, {}), InputError);
        // A move never mixes starting and ending actions.
        CHECK_THROWS_AS(
            MoveC::play({corpus::start("x", "a"), corpus::end("x", "a")}),
            InputError);
        CHECK_THROWS_AS(
            MoveE::play({corpus::end("y", "u"), corpus::start("y", "u")}),
            InputError);
    }

    SUBCASE("action sets are sorted and deduplicated") {
        const MoveC move = MoveC::play({corpus::start("x", "b"),
                                        corpus::start("x", "a"),
                                        corpus::start("x", "b")});
        REQUIRE(move.actions.size() == 2);
        CHECK(move.actions[0] == corpus::start("x", "a"));
        CHECK(move.actions[1] == corpus::start("x", "b"));
    }

    SUBCASE("rendering") {
        CHECK(move_to_string(MoveC::wait(7)) == "wait(7)");
        CHECK(move_to_string(MoveC::play({corpus::start("x", "a")})) ==
              "play({start(x,a)})");
        CHECK(move_to_string(MoveE::play(2, {corpus::end("y", "u")})) ==
              "play(2, {end(y,u)})");
        CHECK(move_to_string(Move{MoveE::play({})}) == "play({})");
    }

    SUBCASE("move_less is a strict weak order discriminating both players") {
        const std::vector<Move> moves = {
            MoveC::wait(1), MoveC::wait(2), MoveC::play({}),
            MoveC::play({corpus::start("x", "a")}), MoveE::play({}),
            MoveE::play(1, {}), MoveE::play({corpus::end("y", "u")})};
        for (const Move& a : moves) {
            CHECK(!move_less(a, a));
            for (const Move& b : moves) {
                if (move_less(a, b)) CHECK(!move_less(b, a));
            }
        }
        // Charlie's moves sort before Eve's.
        CHECK(move_less(MoveC::play({}), MoveE::play({})));
        CHECK(!move_less(MoveE::play({}), MoveC::wait(1)));
    }
}

TEST_CASE("rounds append, merge, and report their violation clause") {
    const GameSpec game = corpus::small_game();
    const std::vector<StateVariable> variables = game.all_variables();

    SUBCASE("a starting round on the empty plan creates the first event") {
        Round round;
        round.charlie = MoveC::play({corpus::start("x", "a")});
        round.eve = MoveE::play({corpus::start("y", "u")});
        round.ending = false;
        const RoundOutcome outcome = round_outcome({}, round, variables);
        REQUIRE(outcome.applicable);
        REQUIRE(outcome.result.size() == 1);
        CHECK(outcome.result[0].delta == 1);
        CHECK(outcome.result[0].actions.size() == 2);
    }

    const EventSequence opened = {
        make_event({corpus::start("x", "a"), corpus::start("y", "u")}, 1)};

    SUBCASE("an ending round after a wait appends at Eve's delay") {
        Round round;
        round.charlie = MoveC::wait(3);
        round.eve = MoveE::play(2, {corpus::end("y", "u")});
        round.ending = true;
        const RoundOutcome outcome = round_outcome(opened, round, variables);
        REQUIRE(outcome.applicable);
        REQUIRE(outcome.result.size() == 2);
        CHECK(outcome.result.back().delta == 2);
        CHECK(outcome.result.back().actions ==
              std::vector<Action>{corpus::end("y", "u")});
    }

    SUBCASE("an ending round without a wait appends one time unit later") {
        Round round;
        round.charlie = MoveC::play({corpus::end("x", "a")});
        round.eve = MoveE::play({corpus::end("y", "u")});
        round.ending = true;
        const RoundOutcome outcome = round_outcome(opened, round, variables);
        REQUIRE(outcome.applicable);
        CHECK(outcome.result.back().delta == 1);
        CHECK(outcome.result.back().actions.size() == 2);
    }

    SUBCASE("a starting round merges into the last event") {
        EventSequence seq = {make_event({corpus::start("x", "a")}, 1),
                             make_event({corpus::end("x", "a")}, 4)};
        Round round;
        round.charlie = MoveC::play({corpus::start("x", "b")});
        round.eve = MoveE::play({});
        round.ending = false;
        const RoundOutcome outcome = round_outcome(seq, round, variables);
        REQUIRE(outcome.applicable);
        REQUIRE(outcome.result.size() == 2);
        // The handover lands in the existing event, keeping its delay.
        CHECK(outcome.result.back().delta == 4);
        CHECK(outcome.result.back().actions.size() == 2);
    }

    SUBCASE("clause (a): the merged word must stay well-formed") {
        // Second start for an already-open variable: the merge itself is
        // malformed.
        Round restart;
        restart.charlie = MoveC::play({corpus::start("x", "b")});
        restart.eve = MoveE::play({});
        restart.ending = false;
        const RoundOutcome merged = round_outcome(opened, restart, variables);
        CHECK(!merged.applicable);
        CHECK(merged.violated == 'a');

        // Ending with the wrong value: the merge succeeds but the word fails
        // the well-formedness check.
        Round wrong;
        wrong.charlie = MoveC::play({corpus::end("x", "b")});
        wrong.eve = MoveE::play({});
        wrong.ending = true;
        const RoundOutcome ended = round_outcome(opened, wrong, variables);
        CHECK(!ended.applicable);
        CHECK(ended.violated == 'a');
    }

    SUBCASE("clause (b): round kind versus openness of the touched variables") {
        // Ending a variable that has no open token.
        Round premature;
        premature.charlie = MoveC::play({corpus::end("x", "a")});
        premature.eve = MoveE::play({});
        premature.ending = true;
        const RoundOutcome early = round_outcome({}, premature, variables);
        CHECK(!early.applicable);
        CHECK(early.violated == 'b');

        // A starting round touching no variable at all: vacuously "all
        // touched variables are open", which contradicts the starting kind.
        Round noop;
        noop.charlie = MoveC::play({});
        noop.eve = MoveE::play({});
        noop.ending = false;
        const RoundOutcome idle = round_outcome(opened, noop, variables);
        CHECK(!idle.applicable);
        CHECK(idle.violated == 'b');
    }

    SUBCASE("structural protocol bugs throw instead of reporting a clause") {
        Round round;
        round.charlie = MoveC::wait(2);
        round.eve = MoveE::play(1, {});
        round.ending = false;  // waiting outside an ending round
        CHECK_THROWS_AS(round_outcome(opened, round, variables), InputError);

        round.ending = true;
        round.eve = MoveE::play({});  // no interruption delay against a wait
        CHECK_THROWS_AS(round_outcome(opened, round, variables), InputError);

        round.eve = MoveE::play(3, {});  // delay exceeding the wait
        CHECK_THROWS_AS(round_outcome(opened, round, variables), InputError);

        Round mismatched;  // a start inside an ending round
        mismatched.charlie = MoveC::play({corpus::start("x", "b")});
        mismatched.eve = MoveE::play({});
        mismatched.ending = true;
        CHECK_THROWS_AS(round_outcome({}, mismatched, variables), InputError);

        Round undeclared;
        undeclared.charlie = MoveC::play({corpus::start("z", "q")});
        undeclared.eve = MoveE::play({});
        undeclared.ending = false;
        CHECK_THROWS_AS(round_outcome({}, undeclared, variables), InputError);
    }
}

TEST_CASE("the game automaton accepts iff Charlie's side holds or Eve broke hers") {
    const GameAutomata automata = build_game_automata(corpus::small_game());
    const GameSpec& game = *automata.game;
    CHECK(automata.horizon == horizon_d(game));
    CHECK(automata.horizon == 3);
    CHECK(automata.partition.charlie.size() == 4);
    CHECK(automata.partition.eve.size() == 2);
    CHECK(game.system_rules.size() == 1);
    CHECK(game.domain_rules.empty());

    const auto word_accepted = [&](const EventSequence& seq) {
        return accepts(automata.dfa, seq, automata.horizon);
    };

    // The empty word satisfies a triggerless-obligation-free system side.
    CHECK(word_accepted({}));

    // A genuine solution: the external witness starts together with the
    // trigger, and everything closes.
    CHECK(word_accepted(
        {make_event({corpus::start("x", "a"), corpus::start("y", "u")}, 1),
         make_event({corpus::end("x", "a"), corpus::end("y", "u")}, 1)}));

    // The trigger fires but no witness ever exists: Charlie's side fails and
    // Eve behaved, so the word is losing.
    CHECK(!word_accepted({make_event({corpus::start("x", "a")}, 1),
                          make_event({corpus::end("x", "a")}, 1)}));

    // A word where Charlie's variable misbehaves (token closed before it was
    // opened) is losing...
    CHECK(!word_accepted({make_event({corpus::end("x", "a")}, 1)}));
    // ...but the same shape on Eve's variable hands Charlie the win.
    CHECK(word_accepted({make_event({corpus::end("y", "u")}, 1)}));

    SUBCASE("invalid games are rejected up front") {
        GameSpec bad = corpus::small_game();
        bad.system_rules.push_back(SyncRule{});  // triggerless
        CHECK_THROWS_WITH_AS(build_game_dfa(bad),
                             doctest::Contains("invalid game"), InputError);
    }
}

TEST_CASE("pruning removes only Charlie's delayed ends") {
    const GameAutomata automata = build_game_automata(corpus::small_game());
    const GameSpec& game = *automata.game;
    const PrunedDfa pruned = prune(automata.dfa, game);

    // Delay 1 transitions always survive, as do pure delays and starts.
    CHECK(pruned.defined(make_event({}, 5)));
    CHECK(pruned.defined(make_event({corpus::end("x", "a")}, 1)));
    CHECK(pruned.defined(make_event({corpus::start("x", "b")}, 2)));
    // A delayed end of a controllable value is Charlie's move and is pruned.
    CHECK(!pruned.defined(make_event({corpus::end("x", "a")}, 2)));
    CHECK(!pruned.defined(make_event(
        {corpus::end("x", "b"), corpus::end("y", "u")}, 3)));
    // Eve's uncontrollable end keeps its delayed transitions.
    CHECK(pruned.defined(make_event({corpus::end("y", "u")}, 2)));

    SUBCASE("the two readings differ exactly on cross-owned values") {
        GameSpec mixed;
        mixed.controlled = {corpus::make_variable(
            "w", {"m"}, {{"m", {"m"}}}, Controllability::Uncontrollable)};
        mixed.external = {corpus::make_variable(
            "z", {"c"}, {{"c", {"c"}}}, Controllability::Controllable)};
        const Event delayed_z = make_event({corpus::end("z", "c")}, 2);
        const Event delayed_w = make_event({corpus::end("w", "m")}, 2);

        const PrunedDfa by_control =
            prune(automata.dfa, mixed, PruneReading::Controllability);
        CHECK(!by_control.defined(delayed_z));  // controllable value
        CHECK(by_control.defined(delayed_w));   // uncontrollable value

        const PrunedDfa by_owner =
            prune(automata.dfa, mixed, PruneReading::Ownership);
        CHECK(by_owner.defined(delayed_z));    // Eve's variable
        CHECK(!by_owner.defined(delayed_w));   // Charlie's variable
    }

    SUBCASE("a pruned transition stays reachable through padding") {
        const EventSequence direct = {
            make_event({corpus::start("x", "a"), corpus::start("y", "u")}, 1),
            make_event({corpus::end("x", "a")}, 2)};
        const EventSequence padded = {
            direct[0], make_event({}, 1),
            make_event({corpus::end("x", "a")}, 1)};
        CHECK(!pruned.defined(direct[1]));
        CHECK(accepts(automata.dfa, direct, automata.horizon) ==
              accepts(automata.dfa, padded, automata.horizon));
    }
}

namespace {

ArenaState::Kind kind_of(const Arena& arena, int state) {
    return arena.states[static_cast<std::size_t>(state)].kind;
}

// Checks the move-chain invariants that every split arena must satisfy.
void check_arena_invariants(const Arena& arena) {
    using Kind = ArenaState::Kind;
    REQUIRE(arena.states.size() == arena.edges.size());
    REQUIRE(arena.states.size() == arena.turn.size());
    REQUIRE(arena.states.size() == arena.final_state.size());
    REQUIRE(arena.initial == 0);
    CHECK(kind_of(arena, arena.initial) == Kind::Original);
    CHECK(!arena.final_state[static_cast<std::size_t>(arena.initial)]);

    for (std::size_t i = 0; i < arena.states.size(); ++i) {
        const ArenaState& state = arena.states[i];
        CHECK(arena.turn[i] == state.turn());
        if (arena.final_state[i]) CHECK(state.kind == Kind::Original);
        CHECK(arena.find(state.key()) == static_cast<int>(i));

        const std::vector<Arena::Edge>& out = arena.edges[i];
        CHECK(std::is_sorted(out.begin(), out.end(),
                             [](const Arena::Edge& a, const Arena::Edge& b) {
                                 return move_less(a.move, b.move);
                             }));
        for (const Arena::Edge& edge : out) {
            const Kind source = state.kind;
            const Kind target = kind_of(arena, edge.target);
            const bool charlie_move = edge.move.index() == 0;
            CHECK(charlie_move == (arena.turn[i] == Player::Charlie));
            switch (source) {
                case Kind::Original: {
                    REQUIRE(charlie_move);
                    const MoveC& move = std::get<MoveC>(edge.move);
                    if (move.kind == MoveC::Kind::Wait) {
                        CHECK(target == Kind::AfterWait);
                    } else {
                        CHECK(target == Kind::EveEnds);
                    }
                    break;
                }
                case Kind::AfterWait:
                    CHECK(std::get<MoveE>(edge.move).has_delta);
                    CHECK(target == Kind::CharlieStarts);
                    break;
                case Kind::EveEnds:
                    CHECK(!std::get<MoveE>(edge.move).has_delta);
                    CHECK(target == Kind::CharlieStarts);
                    break;
                case Kind::CharlieStarts:
                    CHECK(std::get<MoveC>(edge.move).kind == MoveC::Kind::Play);
                    CHECK(target == Kind::EveStarts);
                    break;
                case Kind::EveStarts:
                    CHECK(!std::get<MoveE>(edge.move).has_delta);
                    CHECK(target == Kind::Original);
                    break;
            }
        }
    }
}

}  // namespace

TEST_CASE("splitting unfolds the pruned automaton into move chains") {
    SUBCASE("rule-free single variable") {
        const GameSpec game = corpus::trivial_game();
        const GameAutomata automata = build_game_automata(game);
        const Arena arena = split(prune(automata.dfa, *automata.game),
                                  *automata.game);
        CHECK(arena.states.size() == 18);
        check_arena_invariants(arena);
        // Horizon 1 leaves Charlie no room to wait: no AfterWait states.
        for (const ArenaState& state : arena.states) {
            CHECK(state.kind != ArenaState::Kind::AfterWait);
        }
        REQUIRE(arena.variables.size() == 1);
        CHECK(arena.variables[0].name == "x");
        CHECK(arena.find("no such key") == -1);
    }

    SUBCASE("deadline game with real waits") {
        const GameAutomata automata = build_game_automata(corpus::deadline_game());
        const Arena arena = split(prune(automata.dfa, *automata.game),
                                  *automata.game);
        CHECK(arena.states.size() == 242);
        check_arena_invariants(arena);
        bool has_wait = false;
        for (const ArenaState& state : arena.states) {
            has_wait |= state.kind == ArenaState::Kind::AfterWait;
        }
        CHECK(has_wait);
    }

    SUBCASE("the state budget is enforced") {
        const GameAutomata automata = build_game_automata(corpus::trivial_game());
        CHECK_THROWS_AS(split(prune(automata.dfa, *automata.game),
                              *automata.game, 3),
                        ResourceError);
    }
}

TEST_CASE("read_play follows edges and rejects inapplicable moves") {
    const Arena arena = corpus::dead_end_arena();
    CHECK(read_play(arena, {}) == arena.initial);

    // root --wait(1)--> pre --play(1, {})--> goal.
    const int pre = read_play(arena, {MoveC::wait(1)});
    CHECK(arena.turn[static_cast<std::size_t>(pre)] == Player::Eve);
    const int goal = read_play(arena, {MoveC::wait(1), MoveE::play(1, {})});
    CHECK(arena.final_state[static_cast<std::size_t>(goal)]);

    CHECK_THROWS_WITH_AS(
        read_play(arena, {MoveC::play({corpus::start("x", "a")})}),
        doctest::Contains("not applicable"), ProtocolError);
    CHECK_THROWS_AS(read_play(arena, {MoveC::wait(1), MoveE::play({})}),
                    ProtocolError);
}

TEST_CASE("arena states expose turn and a discriminating key") {
    ArenaState state;
    CHECK(state.turn() == Player::Charlie);
    state.kind = ArenaState::Kind::CharlieStarts;
    CHECK(state.turn() == Player::Charlie);
    state.kind = ArenaState::Kind::AfterWait;
    CHECK(state.turn() == Player::Eve);
    state.kind = ArenaState::Kind::EveEnds;
    CHECK(state.turn() == Player::Eve);
    state.kind = ArenaState::Kind::EveStarts;
    CHECK(state.turn() == Player::Eve);

    ArenaState a;
    ArenaState b;
    CHECK(a.key() == b.key());
    b.kind = ArenaState::Kind::EveEnds;
    CHECK(a.key() != b.key());
    b = a;
    b.delta = 2;
    CHECK(a.key() != b.key());
    b = a;
    b.accumulated = {corpus::end("x", "a")};
    CHECK(a.key() != b.key());
}

TEST_CASE("arena rendering names players and finals") {
    const GameAutomata automata = build_game_automata(corpus::trivial_game());
    const Arena arena = split(prune(automata.dfa, *automata.game),
                              *automata.game);
    const std::string dot = to_dot(arena, "tiny");
    CHECK(dot.find("digraph tiny") != std::string::npos);
    CHECK(dot.find("box") != std::string::npos);
    CHECK(dot.find("diamond") != std::string::npos);
    CHECK(dot.find("peripheries=2") != std::string::npos);
    CHECK(dot.find("s17") != std::string::npos);
}

TEST_SUITE_END();
