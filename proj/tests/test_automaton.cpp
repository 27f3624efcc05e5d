#include <cstdlib>
#include <memory>

#include "corpus.hpp"
#include "doctest.h"
#include "tbsynth/automaton.hpp"
#include "tbsynth/errors.hpp"
#include "tbsynth/oracle.hpp"

using namespace tbsynth;

namespace {

PlanningProblem tiny(const std::string& name) {
    for (auto& [label, problem] : corpus::tiny_problems()) {
        if (label == name) return problem;
    }
    REQUIRE(false);
    return {};
}

}  // namespace

TEST_SUITE_BEGIN("automaton");

TEST_CASE("strict timeline tracking accepts the reference plan") {
    const PlanningProblem p = corpus::worked_problem();
    const TvAutomaton tv(p.variables, /*check_transitions=*/true);
    TvState state = tv.initial();
    CHECK(state.fresh);
    CHECK(tv.is_final(state));  // the empty sequence is trivially closed

    for (const Event& event : corpus::worked_plan()) {
        state = tv.successor(state, event);
        CHECK(!state.bottom);
    }
    CHECK(tv.is_final(state));
}

TEST_CASE("timeline violations fall into the absorbing bottom") {
    const std::vector<StateVariable> vars = {
        corpus::make_variable("f", {"p", "q"}, {{"p", {"q"}}, {"q", {"p"}}})};
    const TvAutomaton strict(vars, true);
    const TvAutomaton lax(vars, false);

    const Event open_p = make_event({corpus::start("f", "p")}, 1);
    const Event restart_p =
        make_event({corpus::end("f", "p"), corpus::start("f", "p")}, 1);

    SUBCASE("transition-function violations only trip the strict tracker") {
        TvState s = strict.successor(strict.initial(), open_p);
        s = strict.successor(s, restart_p);  // p -> p is not allowed
        CHECK(s.bottom);
        TvState l = lax.successor(lax.initial(), open_p);
        l = lax.successor(l, restart_p);
        CHECK(!l.bottom);
    }
    SUBCASE("bottom absorbs everything") {
        TvState s = strict.successor(strict.initial(), open_p);
        s = strict.successor(s, restart_p);
        REQUIRE(s.bottom);
        const TvState stuck = strict.successor(s, make_event({}, 1));
        CHECK(stuck.bottom);
        CHECK(!strict.is_final(stuck));
        CHECK(stuck.key() == s.key());
    }
    SUBCASE("mid-sequence bare start") {
        TvState s = strict.successor(strict.initial(), open_p);
        s = strict.successor(s, make_event({corpus::start("f", "q")}, 1));
        CHECK(s.bottom);
    }
    SUBCASE("bare end is terminal: any further event is a violation") {
        TvState s = strict.successor(strict.initial(), open_p);
        s = strict.successor(s, make_event({corpus::end("f", "p")}, 1));
        CHECK(!s.bottom);
        CHECK(s.terminal);
        CHECK(strict.is_final(s));
        const TvState late = strict.successor(s, make_event({}, 1));
        CHECK(late.bottom);
    }
    SUBCASE("open-left tokens are readable but never accepted") {
        const TvState s =
            strict.successor(strict.initial(), make_event({corpus::end("f", "p")}, 1));
        CHECK(!s.bottom);
        CHECK(s.open_left);
        CHECK(!strict.is_final(s));
        // Restarting afterwards keeps the sequence readable, still rejected.
        const TvState t =
            strict.successor(s, make_event({corpus::start("f", "p")}, 4));
        CHECK(!t.bottom);
        CHECK(!strict.is_final(t));
    }
    SUBCASE("unknown values throw instead of silently rejecting") {
        CHECK_THROWS_AS(
            strict.successor(strict.initial(), make_event({corpus::start("f", "zz")}, 1)),
            InputError);
    }
    SUBCASE("untracked variables are ignored") {
        const TvState s = strict.successor(
            strict.initial(), make_event({corpus::start("other", "w")}, 1));
        CHECK(!s.bottom);
        CHECK(strict.is_final(s));
    }
}

TEST_CASE("rule tracking over the reference plan") {
    const PlanningProblem p = corpus::worked_problem();
    const auto automata = build_planning_automata(p);
    CHECK(automata.horizon == 15);
    CHECK(automata.sync->window() == 17);

    SyncState state = automata.sync->initial();
    CHECK(!state.bottom);
    CHECK(automata.sync->is_final(state));  // nothing pending yet

    const EventSequence norm = normalize_deltas(corpus::worked_plan(), automata.horizon);
    bool saw_pending = false;
    for (const Event& event : norm) {
        state = automata.sync->successor(state, event);
        REQUIRE(!state.bottom);
        if (!automata.sync->is_final(state)) saw_pending = true;
    }
    CHECK(saw_pending);  // the trigger was live mid-plan
    CHECK(automata.sync->is_final(state));
}

TEST_CASE("duration overruns hit bottom at the offending event") {
    PlanningProblem p = corpus::worked_problem();
    p.variables[3].durations["v3"] = DurationBound{1, 4};
    const auto automata = build_planning_automata(p);
    const EventSequence norm =
        normalize_deltas(corpus::worked_plan(), automata.horizon);
    SyncState state = automata.sync->initial();
    state = automata.sync->successor(state, norm[0]);
    CHECK(!state.bottom);
    state = automata.sync->successor(state, norm[1]);  // 5 units > max 4
    CHECK(state.bottom);
    CHECK(!automata.sync->is_final(state));
    CHECK(!accepts(automata.dfa, corpus::worked_plan(), automata.horizon));

    // A generous bound keeps the plan acceptable.
    PlanningProblem relaxed = corpus::worked_problem();
    relaxed.variables[3].durations["v3"] = DurationBound{1, 8};
    const auto ok = build_planning_automata(relaxed);
    CHECK(accepts(ok.dfa, corpus::worked_plan(), ok.horizon));
}

TEST_CASE("aged obligations survive in the residual bucket until discharged") {
    const PlanningProblem p = tiny("window-crossing");
    const auto automata = build_planning_automata(p);
    REQUIRE(automata.horizon == 5);
    REQUIRE(automata.sync->window() == 0);

    SyncState state = automata.sync->initial();
    state = automata.sync->successor(
        state, make_event({corpus::start("f", "p")}, 1));
    CHECK(!state.bottom);
    CHECK(!automata.sync->is_final(state));  // trigger pending

    // Five units later the trigger has aged past the (empty) window: the
    // pending structure must survive as a residual in the aged bucket.
    state = automata.sync->successor(state, make_event({}, 5));
    CHECK(!state.bottom);
    CHECK(!automata.sync->is_final(state));
    std::size_t aged = 0;
    bool residual_seen = false;
    for (const auto& bucket : state.delta) {
        aged += bucket.size();
        for (const auto& ms : bucket) residual_seen |= ms.is_residual();
    }
    CHECK(aged > 0);
    CHECK(residual_seen);

    // Matching the partner start discharges the obligation; closing both
    // tokens returns the automaton to an accepting state.
    state = automata.sync->successor(
        state, make_event({corpus::end("f", "p"), corpus::start("f", "q")}, 1));
    CHECK(!state.bottom);
    state = automata.sync->successor(
        state, make_event({corpus::end("f", "q")}, 1));
    CHECK(!state.bottom);
    CHECK(automata.sync->is_final(state));

    const EventSequence whole = {
        make_event({corpus::start("f", "p")}, 1),
        make_event({}, 5),
        make_event({corpus::end("f", "p"), corpus::start("f", "q")}, 1),
        make_event({corpus::end("f", "q")}, 1),
    };
    CHECK(accepts(automata.dfa, whole, automata.horizon));

    // The premature variant pairs the tokens before the lower bound allows.
    const EventSequence premature = {
        make_event({corpus::start("f", "p")}, 1),
        make_event({corpus::end("f", "p"), corpus::start("f", "q")}, 1),
        make_event({corpus::end("f", "q")}, 1),
    };
    CHECK(!accepts(automata.dfa, premature, automata.horizon));
}

TEST_CASE("lazy combinators obey the boolean laws pointwise") {
    const auto base = build_planning_automata(tiny("bounded-pairing"));
    const auto free = build_planning_automata(tiny("free-flipflop"));

    oracle::EnumBounds bounds;
    bounds.max_length = 3;
    bounds.max_delta = 2;
    const auto words =
        oracle::enumerate_sequences(base.problem->variables, bounds);
    REQUIRE(words.size() > 100);

    const LazyDfa both = intersect(base.dfa, free.dfa);
    const LazyDfa either = unite(base.dfa, free.dfa);
    const LazyDfa neg = complement(base.dfa);
    const LazyDfa back = complement(complement(base.dfa));
    const LazyDfa empty_language = intersect(base.dfa, neg);
    const LazyDfa full_language = unite(base.dfa, neg);

    for (const auto& word : words) {
        const bool a = accepts(base.dfa, word, base.horizon);
        const bool b = accepts(free.dfa, word, base.horizon);
        CHECK(accepts(both, word, base.horizon) == (a && b));
        CHECK(accepts(either, word, base.horizon) == (a || b));
        CHECK(accepts(neg, word, base.horizon) == !a);
        CHECK(accepts(back, word, base.horizon) == a);
        CHECK(!accepts(empty_language, word, base.horizon));
        CHECK(accepts(full_language, word, base.horizon));
    }
}

TEST_CASE("payload accessors recover the constructor-specific state") {
    const auto automata = build_planning_automata(tiny("bounded-pairing"));
    const LazyDfa tv = make_tv_dfa(automata.tv);
    const LazyDfa sync = make_sync_dfa(automata.sync);

    CHECK(tv_payload(tv.initial()) != nullptr);
    CHECK(sync_payload(tv.initial()) == nullptr);
    CHECK(product_payload(tv.initial()) == nullptr);

    CHECK(sync_payload(sync.initial()) != nullptr);
    CHECK(tv_payload(sync.initial()) == nullptr);

    const LazyDfa product = intersect(sync, tv);
    const ProductPayload* pair = product_payload(product.initial());
    REQUIRE(pair != nullptr);
    CHECK(sync_payload(pair->left) != nullptr);
    CHECK(tv_payload(pair->right) != nullptr);
    CHECK(product.describe(product.initial()) != "");
}

TEST_CASE("exploration interns states and enforces the budget") {
    PlanningProblem p;
    p.variables = {corpus::make_variable("x", {"v"}, {{"v", {}}})};
    const auto automata = build_planning_automata(p);
    CHECK(automata.horizon == 1);

    const ExploredDfa explored =
        explore(automata.dfa, automata.symbols(), default_state_budget());
    // initial, drained initial, open token, closed terminal, bottom
    CHECK(explored.states.size() == 5);
    int finals = 0;
    for (const bool f : explored.final) finals += f ? 1 : 0;
    CHECK(finals == 3);
    std::size_t edges = 0;
    for (const auto& bucket : explored.edges) edges += bucket.size();
    CHECK(edges == 8);
    CHECK(explored.find(explored.states[0].key) == 0);
    CHECK(explored.find("no such key") == -1);

    const std::string dot = to_dot(explored, "tiny");
    CHECK(dot.find("digraph tiny") != std::string::npos);
    CHECK(dot.find("doublecircle") != std::string::npos);

    bool tripped = false;
    try {
        explore(automata.dfa, automata.symbols(), 3);
    } catch (const ResourceError& err) {
        tripped = true;
        CHECK(err.count() == 4);  // the budget plus the state that broke it
    }
    CHECK(tripped);
}

TEST_CASE("state budget honors the environment override") {
    const std::size_t fallback = 250000;
    unsetenv("TBSYNTH_STATE_BUDGET");
    CHECK(default_state_budget() == fallback);
    setenv("TBSYNTH_STATE_BUDGET", "123", 1);
    CHECK(default_state_budget() == 123);
    setenv("TBSYNTH_STATE_BUDGET", "garbage", 1);
    CHECK(default_state_budget() == fallback);
    setenv("TBSYNTH_STATE_BUDGET", "0", 1);
    CHECK(default_state_budget() == fallback);
    unsetenv("TBSYNTH_STATE_BUDGET");
}

TEST_CASE("delta normalization splits, pads, and canonicalizes") {
    const std::vector<StateVariable> vars = {
        corpus::make_variable("f", {"p", "q"}, {{"p", {"q"}}, {"q", {"p"}}})};

    SUBCASE("in-range sequences are untouched") {
        const EventSequence seq = {
            make_event({corpus::start("f", "p")}, 1),
            make_event({corpus::end("f", "p")}, 2),
        };
        CHECK(normalize_deltas(seq, 2) == seq);
    }
    SUBCASE("later events split into horizon-sized padding") {
        const EventSequence seq = {
            make_event({corpus::start("f", "p")}, 1),
            make_event({corpus::end("f", "p")}, 5),
        };
        const EventSequence norm = normalize_deltas(seq, 2);
        REQUIRE(norm.size() == 4);
        CHECK(norm[0] == seq[0]);
        CHECK(norm[1] == Event{{}, 2});
        CHECK(norm[2] == Event{{}, 2});
        CHECK(norm[3] == make_event({corpus::end("f", "p")}, 1));
        // Total elapsed time is preserved.
        std::int64_t total = 0;
        for (std::size_t i = 1; i < norm.size(); ++i) total += norm[i].delta;
        CHECK(total == 5);
    }
    SUBCASE("the opening event is canonicalized, never split") {
        // Padding in front of the first event would demote its starts to a
        // mid-sequence position and wrongly reject the word.
        const EventSequence seq = {make_event({corpus::start("f", "p")}, 7)};
        const EventSequence norm = normalize_deltas(seq, 2);
        REQUIRE(norm.size() == 1);
        CHECK(norm[0].actions == seq[0].actions);
        CHECK(norm[0].delta == 1);
    }
    SUBCASE("acceptance is blind to the first event's delay") {
        const PlanningProblem p = tiny("free-flipflop");
        const auto automata = build_planning_automata(p);
        REQUIRE(automata.horizon == 1);
        EventSequence word = {
            make_event({corpus::start("f", "p")}, 2),
            make_event({}, 1),
            make_event({}, 1),
            make_event({corpus::end("f", "p")}, 1),
        };
        CHECK(accepts(automata.dfa, word, automata.horizon));
        word[0].delta = 1;
        CHECK(accepts(automata.dfa, word, automata.horizon));
    }
}

TEST_CASE("shape-guided enumeration yields exactly the left-closed extensions") {
    const std::vector<StateVariable> vars = {
        corpus::make_variable("f", {"p", "q"}, {{"p", {"q"}}, {"q", {"p"}}})};
    const TvAutomaton shape(vars, false);

    // Fresh state, horizon 2: the empty event and two opening starts, each
    // at two delays.
    const auto fresh = enumerate_events(shape.initial(), vars, 2);
    CHECK(fresh.size() == 6);

    // With a token open: the empty event, its end, and the two end+restart
    // handovers (transition functions deliberately ignored so that
    // violating them stays a reachable, classifiable behaviour).
    const TvState open = shape.successor(
        shape.initial(), make_event({corpus::start("f", "p")}, 1));
    const auto extensions = enumerate_events(open, vars, 2);
    CHECK(extensions.size() == 8);
    for (const Event& event : extensions) {
        for (const Action& action : event.actions) {
            if (action.kind == ActionKind::Start) {
                // every start is accompanied by the forced end
                CHECK(event.actions.size() == 2);
            }
        }
        CHECK(event.delta >= 1);
        CHECK(event.delta <= 2);
    }

    // After an empty opening event the opening starts are gone: a bare
    // start is only well-formed in the very first event.
    const TvState drained = shape.successor(shape.initial(), make_event({}, 1));
    const auto stuck = enumerate_events(drained, vars, 2);
    REQUIRE(stuck.size() == 2);
    CHECK(stuck[0].actions.empty());
    CHECK(stuck[1].actions.empty());
}

TEST_CASE("assembly rejects invalid problems with bundled diagnostics") {
    PlanningProblem p = corpus::worked_problem();
    p.rules[0].trigger.reset();
    try {
        build_planning_automata(p);
        CHECK(false);
    } catch (const InputError& err) {
        const std::string what = err.what();
        CHECK(what.find("invalid problem") != std::string::npos);
        CHECK(what.find("triggerless") != std::string::npos);
    }
}

TEST_SUITE_END();
