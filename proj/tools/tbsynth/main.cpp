// Command-line front end: validation, plan checking, automaton compilation,
// game solving, controller synthesis, interactive play, and the
// oracle-vs-automaton differential check.
//
// Exit codes: 0 success (and winner: Charlie), 1 Eve wins / synthesis
// impossible, 2 malformed input, 3 verdict disagreement, 4 resource guard
// tripped.  Diagnostics go to standard error as structured
// "error: <category>: <detail>" lines.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tbsynth/arena.hpp"
#include "tbsynth/automaton.hpp"
#include "tbsynth/controller.hpp"
#include "tbsynth/errors.hpp"
#include "tbsynth/events.hpp"
#include "tbsynth/json_io.hpp"
#include "tbsynth/model.hpp"
#include "tbsynth/oracle.hpp"
#include "tbsynth/solver.hpp"

namespace {

using nlohmann::json;

#ifndef TBSYNTH_VERSION
#define TBSYNTH_VERSION "0.0.0"
#endif
constexpr const char* kVersion = TBSYNTH_VERSION;

constexpr int kExitEve = 1;
constexpr int kExitInput = 2;
constexpr int kExitDisagreement = 3;
constexpr int kExitResource = 4;

/// One structured stderr line per line of `message`.
void emit_error(const std::string& category, const std::string& message) {
    std::istringstream lines(message);
    std::string line;
    bool emitted = false;
    while (std::getline(lines, line)) {
        const auto start = line.find_first_not_of(' ');
        if (start == std::string::npos) continue;
        std::cerr << "error: " << category << ": " << line.substr(start) << "\n";
        emitted = true;
    }
    if (!emitted) std::cerr << "error: " << category << ": unspecified\n";
}

const char* yes_no(bool value) { return value ? "yes" : "no"; }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw tbsynth::InputError("cannot open for writing: " + path);
    out << content;
    if (!out) throw tbsynth::InputError("write failed: " + path);
}

std::string plan_to_text(const tbsynth::EventSequence& plan) {
    if (plan.empty()) return "(empty)";
    std::string out;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (i > 0) out += " ";
        out += tbsynth::event_to_string(plan[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Document loading: schema parse plus semantic validation.
// ---------------------------------------------------------------------------

tbsynth::json_io::SpecDocument load_document(const std::string& path) {
    tbsynth::json_io::SpecDocument doc = tbsynth::json_io::load_spec(path);
    const std::vector<tbsynth::Diagnostic> diagnostics =
        doc.is_game ? tbsynth::validate(doc.game)
                    : tbsynth::validate(doc.planning());
    if (!diagnostics.empty()) {
        std::ostringstream out;
        out << path << ": invalid document";
        for (const tbsynth::Diagnostic& d : diagnostics) {
            out << "\n"
                << (d.context.empty() ? "" : d.context + ": ") << d.message;
        }
        throw tbsynth::InputError(out.str());
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Game pipeline shared by winner / synth / play.
// ---------------------------------------------------------------------------

struct SolvedGame {
    tbsynth::Arena arena;
    tbsynth::AttractorResult regions;
};

SolvedGame solve_game(const tbsynth::GameSpec& game) {
    const tbsynth::GameAutomata automata = tbsynth::build_game_automata(game);
    SolvedGame solved;
    solved.arena = tbsynth::split(tbsynth::prune(automata.dfa, *automata.game),
                                  *automata.game);
    solved.regions = tbsynth::attractor(solved.arena);
    std::cerr << "info: " << tbsynth::region_summary(solved.arena, solved.regions)
              << "\n";
    return solved;
}

// ---------------------------------------------------------------------------
// Move serialization for play transcripts (matches the controller schema).
// ---------------------------------------------------------------------------

json action_to_json(const tbsynth::Action& action) {
    return json{{"kind", action.kind == tbsynth::ActionKind::Start ? "start" : "end"},
                {"variable", action.variable},
                {"value", action.value}};
}

json actions_to_json(const std::vector<tbsynth::Action>& actions) {
    json out = json::array();
    for (const tbsynth::Action& action : actions) out.push_back(action_to_json(action));
    return out;
}

json move_to_json(const tbsynth::MoveC& move) {
    if (move.kind == tbsynth::MoveC::Kind::Wait) {
        return json{{"kind", "wait"}, {"delta", move.wait_delta}};
    }
    return json{{"kind", "play"}, {"actions", actions_to_json(move.actions)}};
}

json move_to_json(const tbsynth::MoveE& move) {
    json out{{"actions", actions_to_json(move.actions)}};
    out["delta"] = move.has_delta ? json(move.delta) : json(nullptr);
    return out;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const std::string& spec_path) {
    const tbsynth::json_io::SpecDocument doc = load_document(spec_path);
    const tbsynth::PlanningProblem merged = doc.planning();
    std::cout << "ok: " << (doc.is_game ? "game" : "planning") << " document, "
              << merged.variables.size()
              << (merged.variables.size() == 1 ? " variable, " : " variables, ")
              << merged.rules.size()
              << (merged.rules.size() == 1 ? " rule" : " rules") << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// check-plan
// ---------------------------------------------------------------------------

int cmd_check_plan(const std::string& spec_path, const std::string& plan_path) {
    const tbsynth::json_io::SpecDocument doc = load_document(spec_path);
    const tbsynth::PlanningProblem problem = doc.planning();
    const tbsynth::EventSequence plan = tbsynth::json_io::load_plan(plan_path);

    const bool solution = tbsynth::oracle::is_solution_plan(plan, problem);
    const tbsynth::PlanningAutomata automata =
        tbsynth::build_planning_automata(problem);
    const bool accepted =
        tbsynth::accepts(automata.dfa, plan, automata.horizon);

    std::cout << "solution: " << yes_no(solution)
              << " / accepted: " << yes_no(accepted) << "\n";
    if (solution != accepted) {
        emit_error("disagreement",
                   "oracle and automaton disagree on " + plan_path);
        return kExitDisagreement;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compile
// ---------------------------------------------------------------------------

/// Pairs the game automaton with the all-variables shape tracker so
/// exploration can enumerate exactly the applicable events; acceptance
/// consults the game component only.
struct PairedShape final : tbsynth::DfaPayload {
    tbsynth::DfaState base;
    tbsynth::TvState shape;
};

tbsynth::DfaState make_paired(tbsynth::DfaState base, tbsynth::TvState shape) {
    auto payload = std::make_shared<PairedShape>();
    payload->base = std::move(base);
    payload->shape = std::move(shape);
    tbsynth::DfaState out;
    out.key = payload->base.key + " || " + payload->shape.key();
    out.payload = std::move(payload);
    return out;
}

const PairedShape& paired_payload(const tbsynth::DfaState& state) {
    const auto* payload = dynamic_cast<const PairedShape*>(state.payload.get());
    if (payload == nullptr) {
        throw std::logic_error("state is not a paired exploration state");
    }
    return *payload;
}

int cmd_compile(const std::string& spec_path, const std::string& dot_path) {
    const tbsynth::json_io::SpecDocument doc = load_document(spec_path);
    const std::size_t budget = tbsynth::default_state_budget();
    tbsynth::ExploredDfa explored;
    std::ostringstream stats;

    if (doc.is_game) {
        const tbsynth::GameAutomata automata =
            tbsynth::build_game_automata(doc.game);
        const tbsynth::LazyDfa base = automata.dfa;
        const std::shared_ptr<const tbsynth::TvAutomaton> shape = automata.shape;
        const std::vector<tbsynth::StateVariable> variables =
            automata.game->all_variables();
        const std::int64_t horizon = automata.horizon;

        const tbsynth::LazyDfa paired(
            make_paired(base.initial(), shape->initial()),
            [base, shape](const tbsynth::DfaState& state,
                          const tbsynth::Event& event) {
                const PairedShape& here = paired_payload(state);
                return make_paired(base.successor(here.base, event),
                                   shape->successor(here.shape, event));
            },
            [base](const tbsynth::DfaState& state) {
                return base.is_final(paired_payload(state).base);
            },
            [base](const tbsynth::DfaState& state) {
                return base.describe(paired_payload(state).base);
            });
        const auto symbols = [variables, horizon](const tbsynth::DfaState& state) {
            const PairedShape& here = paired_payload(state);
            if (here.shape.bottom || here.shape.terminal) {
                return std::vector<tbsynth::Event>{tbsynth::Event{{}, 1}};
            }
            return tbsynth::enumerate_events(here.shape, variables, horizon);
        };
        explored = tbsynth::explore(paired, symbols, budget);

        stats << "kind: game\n"
              << "controlled variables: " << doc.game.controlled.size() << "\n"
              << "external variables: " << doc.game.external.size() << "\n"
              << "system rules (desugared): "
              << automata.system_side->rules.size() << "\n"
              << "domain rules (desugared): "
              << automata.domain_side->rules.size() << "\n"
              << "window (system side): "
              << tbsynth::window(*automata.system_side) << "\n"
              << "window (domain side): "
              << tbsynth::window(*automata.domain_side) << "\n"
              << "horizon: " << automata.horizon << "\n"
              << "charlie actions: " << automata.partition.charlie.size() << "\n"
              << "eve actions: " << automata.partition.eve.size() << "\n";
    } else {
        const tbsynth::PlanningAutomata automata =
            tbsynth::build_planning_automata(doc.planning());
        explored = tbsynth::explore(automata.dfa, automata.symbols(), budget);

        stats << "kind: planning\n"
              << "variables: " << automata.problem->variables.size() << "\n"
              << "rules (desugared): " << automata.problem->rules.size() << "\n"
              << "window: " << tbsynth::window(*automata.problem) << "\n"
              << "horizon: " << automata.horizon << "\n";
    }

    std::size_t edge_count = 0;
    std::size_t final_count = 0;
    for (const auto& bucket : explored.edges) edge_count += bucket.size();
    for (const bool is_final : explored.final) final_count += is_final ? 1 : 0;
    stats << "state budget: " << budget << "\n"
          << "states: " << explored.states.size() << "\n"
          << "final states: " << final_count << "\n"
          << "edges: " << edge_count << "\n";
    std::cout << stats.str();

    if (!dot_path.empty()) {
        write_file(dot_path,
                   tbsynth::to_dot(explored, doc.is_game ? "game" : "planning"));
        std::cout << "dot written to " << dot_path << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// winner
// ---------------------------------------------------------------------------

int cmd_winner(const std::string& spec_path) {
    const tbsynth::json_io::SpecDocument doc = load_document(spec_path);
    const SolvedGame solved = solve_game(doc.game);
    const tbsynth::Player who = tbsynth::winner(solved.arena, solved.regions);
    std::cout << tbsynth::player_to_string(who) << "\n";
    return who == tbsynth::Player::Charlie ? 0 : kExitEve;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

int cmd_synth(const std::string& spec_path, const std::string& out_path,
              const std::string& dot_path) {
    const tbsynth::json_io::SpecDocument doc = load_document(spec_path);
    const SolvedGame solved = solve_game(doc.game);
    if (tbsynth::winner(solved.arena, solved.regions) != tbsynth::Player::Charlie) {
        emit_error("synthesis", "Eve wins the game; no controller exists");
        return kExitEve;
    }
    const tbsynth::StrategyTable strategy =
        tbsynth::extract_strategy(solved.arena, solved.regions);
    const tbsynth::MooreController controller =
        tbsynth::build_controller(solved.arena, strategy);

    write_file(out_path, tbsynth::json_io::write_controller(controller));
    std::cout << "controller: " << controller.states.size()
              << " states, default rounds " << controller.default_rounds << "\n"
              << "written to " << out_path << "\n";
    if (!dot_path.empty()) {
        write_file(dot_path, tbsynth::to_dot(controller));
        std::cout << "dot written to " << dot_path << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// play
// ---------------------------------------------------------------------------

/// Reads one menu choice; nullopt means the session should stop (and
/// `stop_reason` says why).  Anything unparsable re-prompts without state
/// change.
std::optional<std::size_t> prompt_choice(std::size_t count,
                                         std::string& stop_reason) {
    for (;;) {
        std::cout << "eve> " << std::flush;
        std::string line;
        if (!std::getline(std::cin, line)) {
            stop_reason = "input closed";
            return std::nullopt;
        }
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);
        if (line == "q" || line == "quit") {
            stop_reason = "quit";
            return std::nullopt;
        }
        bool digits = !line.empty();
        for (const char c : line) {
            if (std::isdigit(static_cast<unsigned char>(c)) == 0) digits = false;
        }
        if (digits) {
            try {
                const std::size_t value = std::stoull(line);
                if (value < count) return value;
            } catch (const std::out_of_range&) {
            }
        }
        std::cout << "invalid choice; enter an index in [0, " << count - 1
                  << "] or q\n";
    }
}

int cmd_play(const std::string& spec_path, const std::string& transcript_path,
             std::size_t max_rounds_option) {
    const tbsynth::json_io::SpecDocument doc = load_document(spec_path);
    const SolvedGame solved = solve_game(doc.game);
    if (tbsynth::winner(solved.arena, solved.regions) != tbsynth::Player::Charlie) {
        emit_error("synthesis", "Eve wins the game; no controller exists");
        return kExitEve;
    }
    const tbsynth::StrategyTable strategy =
        tbsynth::extract_strategy(solved.arena, solved.regions);
    const tbsynth::MooreController controller =
        tbsynth::build_controller(solved.arena, strategy);
    const std::size_t max_rounds =
        max_rounds_option > 0 ? max_rounds_option : controller.default_rounds;

    std::cout << "tbsynth " << kVersion << " play session; you are Eve\n"
              << "controller: " << controller.states.size()
              << " states, round budget " << max_rounds << "\n";

    json rounds = json::array();
    tbsynth::EventSequence plan;
    int state = 0;
    std::size_t round_no = 0;
    std::string stop_reason = "round budget exhausted";

    while (round_no < max_rounds) {
        const tbsynth::MooreController::State& here =
            controller.states[static_cast<std::size_t>(state)];
        if (here.final) {
            stop_reason = "goal reached";
            break;
        }
        if (!here.output.has_value() || here.transitions.empty()) {
            stop_reason = "controller halted";
            break;
        }
        ++round_no;
        std::cout << "\nround " << round_no
                  << (here.ending_round ? " (ending)" : " (starting)") << "\n"
                  << "controller plays " << tbsynth::move_to_string(*here.output)
                  << "\n";
        for (std::size_t i = 0; i < here.transitions.size(); ++i) {
            std::cout << "  [" << i << "] "
                      << tbsynth::move_to_string(here.transitions[i].first)
                      << "\n";
        }
        const std::optional<std::size_t> pick =
            prompt_choice(here.transitions.size(), stop_reason);
        if (!pick.has_value()) break;

        tbsynth::Round round;
        round.charlie = *here.output;
        round.eve = here.transitions[*pick].first;
        round.ending = here.ending_round;
        const tbsynth::StepResult step =
            tbsynth::controller_step(controller, state, round.eve);

        const bool noop = !round.ending && round.charlie.actions.empty() &&
                          round.eve.actions.empty();
        if (!noop) {
            tbsynth::RoundOutcome outcome =
                tbsynth::round_outcome(plan, round, controller.variables);
            if (!outcome.applicable) {
                throw std::logic_error("controller emitted an inapplicable round");
            }
            plan = std::move(outcome.result);
        }
        rounds.push_back(json{{"charlie", move_to_json(round.charlie)},
                              {"eve", move_to_json(round.eve)},
                              {"ending", round.ending}});
        state = step.state;
        std::cout << "plan: " << plan_to_text(plan) << "\n";
    }

    const bool reached_goal =
        controller.states[static_cast<std::size_t>(state)].final;
    std::cout << "\nstopped: " << stop_reason
              << "; goal reached: " << yes_no(reached_goal) << "\n";

    json transcript{{"format", "tbsynth-play-transcript/1"},
                    {"version", kVersion},
                    {"seed", nullptr},
                    {"spec", spec_path},
                    {"max_rounds", max_rounds},
                    {"rounds", rounds},
                    {"stop", stop_reason},
                    {"reached_goal", reached_goal},
                    {"plan", json::parse(tbsynth::json_io::write_plan(plan))}};
    write_file(transcript_path, transcript.dump(2) + "\n");
    std::cout << "transcript saved to " << transcript_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// oracle-diff
// ---------------------------------------------------------------------------

int cmd_oracle_diff(const std::string& spec_path, std::size_t max_len,
                    std::int64_t max_delta, std::size_t guard) {
    const tbsynth::json_io::SpecDocument doc = load_document(spec_path);
    const tbsynth::PlanningProblem problem = doc.planning();

    tbsynth::oracle::EnumBounds bounds;
    bounds.max_length = max_len;
    bounds.max_delta = max_delta;
    bounds.guard = guard;
    const std::vector<tbsynth::EventSequence> sequences =
        tbsynth::oracle::enumerate_sequences(problem.variables, bounds);

    const tbsynth::PlanningAutomata automata =
        tbsynth::build_planning_automata(problem);
    for (const tbsynth::EventSequence& seq : sequences) {
        const bool by_oracle = tbsynth::oracle::is_solution_plan(seq, problem);
        const bool by_automaton =
            tbsynth::accepts(automata.dfa, seq, automata.horizon);
        if (by_oracle != by_automaton) {
            emit_error("disagreement",
                       std::string("oracle=") + yes_no(by_oracle) +
                           " automaton=" + yes_no(by_automaton) +
                           " on: " + plan_to_text(seq));
            return kExitDisagreement;
        }
    }
    std::cout << "checked " << sequences.size()
              << " sequences: oracle and automaton agree\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"controller synthesis for timeline-based games"};
    app.set_version_flag("--version", std::string("tbsynth ") + kVersion);
    app.require_subcommand(1);
    app.footer(
        "exit codes: 0 success (winner: Charlie), 1 Eve wins / synthesis "
        "impossible,\n2 malformed input, 3 verdict disagreement, 4 resource "
        "guard tripped.\nTBSYNTH_STATE_BUDGET overrides the exploration "
        "guard.");

    std::string spec_path;
    std::string plan_path;
    std::string out_path;
    std::string dot_path;
    std::string transcript_path = "play-transcript.json";
    std::size_t max_len = 3;
    std::int64_t max_delta = 1;
    std::size_t guard = 2000000;
    std::size_t max_rounds = 0;

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "parse and validate a document");
    validate_cmd->add_option("spec", spec_path, "document path")->required();

    CLI::App* check_cmd = app.add_subcommand(
        "check-plan", "judge a plan with both the oracle and the automaton");
    check_cmd->add_option("spec", spec_path, "document path")->required();
    check_cmd->add_option("plan", plan_path, "plan path")->required();

    CLI::App* compile_cmd = app.add_subcommand(
        "compile", "explore the document's automaton and print statistics");
    compile_cmd->add_option("spec", spec_path, "document path")->required();
    compile_cmd->add_option("--dot", dot_path, "write the automaton in DOT form");

    CLI::App* winner_cmd =
        app.add_subcommand("winner", "solve the game and print the winner");
    winner_cmd->add_option("spec", spec_path, "document path")->required();

    CLI::App* synth_cmd =
        app.add_subcommand("synth", "synthesize a controller for Charlie");
    synth_cmd->add_option("spec", spec_path, "document path")->required();
    synth_cmd->add_option("-o,--output", out_path, "controller JSON output path")
        ->required();
    synth_cmd->add_option("--dot", dot_path, "write the controller in DOT form");

    CLI::App* play_cmd = app.add_subcommand(
        "play", "play the synthesized controller interactively (you are Eve)");
    play_cmd->add_option("spec", spec_path, "document path")->required();
    play_cmd->add_option("--transcript", transcript_path,
                         "transcript output path")
        ->capture_default_str();
    play_cmd->add_option("--max-rounds", max_rounds,
                         "round budget (0 = controller default)");

    CLI::App* diff_cmd = app.add_subcommand(
        "oracle-diff",
        "exhaustively compare oracle and automaton verdicts on short plans");
    diff_cmd->add_option("spec", spec_path, "document path")->required();
    diff_cmd->add_option("--max-len", max_len, "maximum plan length")
        ->required();
    diff_cmd->add_option("--max-delta", max_delta, "maximum event delta")
        ->required();
    diff_cmd->add_option("--guard", guard, "enumeration guard")
        ->capture_default_str();

    int rc = 0;
    validate_cmd->callback([&] { rc = cmd_validate(spec_path); });
    check_cmd->callback([&] { rc = cmd_check_plan(spec_path, plan_path); });
    compile_cmd->callback([&] { rc = cmd_compile(spec_path, dot_path); });
    winner_cmd->callback([&] { rc = cmd_winner(spec_path); });
    synth_cmd->callback([&] { rc = cmd_synth(spec_path, out_path, dot_path); });
    play_cmd->callback(
        [&] { rc = cmd_play(spec_path, transcript_path, max_rounds); });
    diff_cmd->callback(
        [&] { rc = cmd_oracle_diff(spec_path, max_len, max_delta, guard); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("usage", e.what());
        return kExitInput;
    } catch (const tbsynth::InputError& e) {
        emit_error("input", e.what());
        return kExitInput;
    } catch (const tbsynth::ResourceError& e) {
        emit_error("resource", std::string(e.what()) +
                                   " (count=" + std::to_string(e.count()) + ")");
        return kExitResource;
    } catch (const tbsynth::OverflowError& e) {
        emit_error("overflow", e.what());
        return kExitInput;
    } catch (const tbsynth::ProtocolError& e) {
        emit_error("protocol", e.what());
        return kExitEve;
    }
    return rc;
}
