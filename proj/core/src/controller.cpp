#include "tbsynth/controller.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "tbsynth/errors.hpp"

namespace tbsynth {

MooreController build_controller(const Arena& arena,
                                 const StrategyTable& strategy) {
    const AttractorResult regions = attractor(arena);
    if (!regions.winning_c[arena.initial]) {
        throw ProtocolError("synthesis impossible: Eve wins the game");
    }

    MooreController ctrl;
    ctrl.variables = arena.variables;
    ctrl.default_rounds = arena.states.size() + 1;

    std::unordered_map<int, int> ids;
    std::deque<int> frontier;
    auto intern = [&](int arena_state) {
        const auto it = ids.find(arena_state);
        if (it != ids.end()) return it->second;
        const int id = static_cast<int>(ctrl.states.size());
        ids.emplace(arena_state, id);
        ctrl.states.emplace_back();
        ctrl.states[id].arena_state = arena_state;
        frontier.push_back(arena_state);
        return id;
    };
    intern(arena.initial);

    while (!frontier.empty()) {
        const int q = frontier.front();
        frontier.pop_front();
        const int id = ids.at(q);
        if (arena.turn[q] != Player::Charlie || !regions.winning_c[q]) {
            throw std::logic_error("controller state outside Charlie's region");
        }
        ctrl.states[id].final = arena.final_state[q];
        ctrl.states[id].ending_round =
            arena.states[q].kind != ArenaState::Kind::CharlieStarts;

        const auto chosen = strategy.moves.find(q);
        if (chosen == strategy.moves.end()) continue;  // halting goal state
        ctrl.states[id].output = std::get<MoveC>(chosen->second);

        const auto edge = std::find_if(
            arena.edges[q].begin(), arena.edges[q].end(),
            [&](const Arena::Edge& e) { return e.move == chosen->second; });
        if (edge == arena.edges[q].end()) {
            throw std::logic_error("strategy move is not an arena edge");
        }
        const int mid = edge->target;  // Eve's turn
        // intern() may grow ctrl.states, so collect before writing back.
        std::vector<std::pair<MoveE, int>> transitions;
        for (const Arena::Edge& reply : arena.edges[mid]) {
            transitions.emplace_back(std::get<MoveE>(reply.move),
                                     intern(reply.target));
        }
        std::sort(transitions.begin(), transitions.end(),
                  [](const auto& a, const auto& b) {
                      return a.first < b.first;
                  });
        ctrl.states[id].transitions = std::move(transitions);
    }
    return ctrl;
}

namespace {

std::string legal_moves_text(const MooreController::State& state) {
    std::string out = "{";
    for (std::size_t i = 0; i < state.transitions.size(); ++i) {
        if (i > 0) out += ", ";
        out += move_to_string(state.transitions[i].first);
    }
    out += "}";
    return out;
}

}  // namespace

StepResult controller_step(const MooreController& ctrl, int state,
                           const MoveE& eve_move) {
    if (state < 0 || static_cast<std::size_t>(state) >= ctrl.states.size()) {
        throw ProtocolError("no such controller state");
    }
    const MooreController::State& from = ctrl.states[state];
    const auto it = std::find_if(
        from.transitions.begin(), from.transitions.end(),
        [&](const auto& entry) { return entry.first == eve_move; });
    if (it == from.transitions.end()) {
        throw ProtocolError("illegal move " + move_to_string(eve_move) +
                            "; legal moves: " + legal_moves_text(from));
    }
    StepResult result;
    result.state = it->second;
    result.output = ctrl.states[it->second].output;
    return result;
}

EvePolicy EvePolicy::scripted(std::vector<MoveE> moves) {
    EvePolicy policy;
    policy.kind = Kind::Scripted;
    policy.script = std::move(moves);
    return policy;
}

EvePolicy EvePolicy::uniform_random(std::uint64_t seed) {
    EvePolicy policy;
    policy.kind = Kind::Random;
    policy.seed = seed;
    return policy;
}

EvePolicy EvePolicy::interactive(
    std::function<MoveE(const EventSequence&, const std::vector<MoveE>&)>
        choose) {
    EvePolicy policy;
    policy.kind = Kind::Interactive;
    policy.choose = std::move(choose);
    return policy;
}

Playout simulate(const MooreController& ctrl, const EvePolicy& policy,
                 std::size_t max_rounds) {
    if (max_rounds < 1) throw InputError("simulation needs at least 1 round");
    std::mt19937_64 rng(policy.seed);
    std::size_t scripted = 0;

    Playout playout;
    int state = 0;
    for (std::size_t round_no = 0; round_no < max_rounds; ++round_no) {
        const MooreController::State& here = ctrl.states[state];
        if (here.final || !here.output.has_value() ||
            here.transitions.empty()) {
            break;
        }
        std::vector<MoveE> legal;
        legal.reserve(here.transitions.size());
        for (const auto& entry : here.transitions) {
            legal.push_back(entry.first);
        }

        std::optional<MoveE> reply;
        switch (policy.kind) {
            case EvePolicy::Kind::Scripted:
                if (scripted < policy.script.size()) {
                    reply = policy.script[scripted++];
                }
                break;
            case EvePolicy::Kind::Random: {
                std::uniform_int_distribution<std::size_t> pick(
                    0, legal.size() - 1);
                reply = legal[pick(rng)];
                break;
            }
            case EvePolicy::Kind::Interactive:
                reply = policy.choose(playout.plan, legal);
                break;
        }
        if (!reply.has_value()) break;  // script exhausted

        Round round;
        round.charlie = *here.output;
        round.eve = *reply;
        round.ending = here.ending_round;
        const StepResult step = controller_step(ctrl, state, *reply);
        playout.play.push_back(round);

        const bool noop = !round.ending && round.charlie.actions.empty() &&
                          round.eve.actions.empty();
        if (!noop) {
            RoundOutcome outcome =
                round_outcome(playout.plan, round, ctrl.variables);
            if (!outcome.applicable) {
                throw std::logic_error("controller emitted an inapplicable round");
            }
            playout.plan = std::move(outcome.result);
        }
        state = step.state;
    }
    playout.final_state = state;
    playout.reached_goal = ctrl.states[state].final;
    return playout;
}

Playout simulate(const MooreController& ctrl, const EvePolicy& policy) {
    return simulate(ctrl, policy, ctrl.default_rounds);
}

namespace {

std::string dot_escape_text(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string to_dot(const MooreController& ctrl,
                   const std::string& graph_name) {
    std::ostringstream out;
    out << "digraph " << graph_name << " {\n";
    out << "  rankdir=LR;\n";
    out << "  __init [shape=point, style=invis];\n";
    for (std::size_t i = 0; i < ctrl.states.size(); ++i) {
        const MooreController::State& state = ctrl.states[i];
        std::string label = "q" + std::to_string(i);
        label += state.output.has_value()
                     ? "\\n" + dot_escape_text(move_to_string(*state.output))
                     : "\\nhalt";
        out << "  q" << i << " [shape=box";
        if (state.final) out << ", peripheries=2";
        out << ", label=\"" << label << "\"];\n";
    }
    out << "  __init -> q0;\n";
    for (std::size_t i = 0; i < ctrl.states.size(); ++i) {
        for (const auto& [move, target] : ctrl.states[i].transitions) {
            out << "  q" << i << " -> q" << target << " [label=\""
                << dot_escape_text(move_to_string(move)) << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

}  // namespace tbsynth
