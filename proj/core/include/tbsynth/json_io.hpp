#pragma once

#include <string>

#include "tbsynth/controller.hpp"
#include "tbsynth/events.hpp"
#include "tbsynth/model.hpp"

// JSON document formats: "tbsynth-spec/1" for problems and games,
// "tbsynth-plan/1" for event sequences, "tbsynth-controller/1" for
// synthesized controllers.  Infinity is encoded as null.  All parse
// failures (syntax, schema, bad references) throw InputError; structural
// validity beyond the schema is the caller's job via validate().
namespace tbsynth::json_io {

/// A parsed "tbsynth-spec/1" document.  Planning-only documents load as a
/// game with an empty environment side; `is_game` records whether the
/// document used any game feature (an environment-owned variable or a
/// domain rule), letting front ends pick the right pipeline.
struct SpecDocument {
    GameSpec game;
    bool is_game = false;

    /// The single-author view: every variable, system and domain rules
    /// together.
    PlanningProblem planning() const;
};

SpecDocument parse_spec(const std::string& text);
SpecDocument load_spec(const std::string& path);
std::string write_spec(const GameSpec& game);

EventSequence parse_plan(const std::string& text);
EventSequence load_plan(const std::string& path);
std::string write_plan(const EventSequence& seq);

std::string write_controller(const MooreController& controller);
MooreController parse_controller(const std::string& text);
MooreController load_controller(const std::string& path);

}  // namespace tbsynth::json_io
