#include "tbsynth/events.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "tbsynth/errors.hpp"

namespace tbsynth {

std::string action_to_string(const Action& action) {
    std::ostringstream out;
    out << (action.kind == ActionKind::Start ? "start(" : "end(") << action.variable << ","
        << action.value << ")";
    return out.str();
}

Event make_event(std::vector<Action> actions, std::int64_t delta) {
    if (delta < 1) {
        throw InputError("event delta must be >= 1, got " + std::to_string(delta));
    }
    std::sort(actions.begin(), actions.end());
    actions.erase(std::unique(actions.begin(), actions.end()), actions.end());
    std::map<Name, int> starts;
    std::map<Name, int> ends;
    for (const auto& action : actions) {
        auto& count = action.kind == ActionKind::Start ? starts[action.variable]
                                                       : ends[action.variable];
        if (++count > 1) {
            throw InputError("event has two " +
                             std::string(action.kind == ActionKind::Start ? "starts" : "ends") +
                             " for variable \"" + action.variable + "\"");
        }
    }
    return Event{std::move(actions), delta};
}

std::string event_to_string(const Event& event) {
    std::ostringstream out;
    out << "({";
    for (std::size_t i = 0; i < event.actions.size(); ++i) {
        if (i > 0) out << ", ";
        out << action_to_string(event.actions[i]);
    }
    out << "}, " << event.delta << ")";
    return out.str();
}

namespace {

// Per-variable parenthesization state while scanning a sequence.
struct VarScan {
    enum class Phase { Never, Open, ClosedAfterEnd } phase = Phase::Never;
    Name open_value;
};

const StateVariable& variable_or_throw(const std::vector<StateVariable>& variables,
                                       const Name& name) {
    for (const auto& var : variables) {
        if (var.name == name) return var;
    }
    throw InputError("undeclared variable \"" + name + "\"");
}

} // namespace

CheckResult check_event_sequence(const EventSequence& seq,
                                 const std::vector<StateVariable>& variables) {
    std::map<Name, VarScan> scan;
    for (const auto& var : variables) {
        scan[var.name];
    }
    const int n = static_cast<int>(seq.size());
    for (int i = 1; i <= n; ++i) {
        const Event& event = seq[static_cast<std::size_t>(i - 1)];
        std::vector<int> bad;
        auto flag = [&bad](int condition) {
            if (std::find(bad.begin(), bad.end(), condition) == bad.end()) {
                bad.push_back(condition);
            }
        };
        // Group the event's actions per variable (at most one start, one end).
        std::map<Name, std::pair<const Action*, const Action*>> per_var; // {end, start}
        for (const auto& action : event.actions) {
            const StateVariable& var = variable_or_throw(variables, action.variable);
            if (!var.has_value(action.value)) {
                throw InputError("undeclared value \"" + action.value + "\" of variable \"" +
                                 action.variable + "\"");
            }
            auto& slot = per_var[action.variable];
            (action.kind == ActionKind::End ? slot.first : slot.second) = &action;
        }
        for (auto& [name, slot] : per_var) {
            const Action* end_action = slot.first;
            const Action* start_action = slot.second;
            VarScan& st = scan[name];
            bool ended_here = false;
            if (end_action != nullptr) {
                switch (st.phase) {
                case VarScan::Phase::Open:
                    if (st.open_value != end_action->value) {
                        flag(2); // end does not close the open token
                    }
                    break;
                case VarScan::Phase::Never:
                    // Token open to the left; legal.
                    break;
                case VarScan::Phase::ClosedAfterEnd:
                    flag(2); // two ends with no interleaving start
                    break;
                }
                st.phase = VarScan::Phase::ClosedAfterEnd;
                ended_here = true;
                if (start_action == nullptr && i < n) {
                    flag(3); // bare end before the last event
                }
            }
            if (start_action != nullptr) {
                if (!ended_here) {
                    if (st.phase == VarScan::Phase::Open) {
                        flag(1); // second start while a token is open
                    }
                    if (i > 1) {
                        flag(4); // mid-sequence start without an end
                    }
                }
                st.phase = VarScan::Phase::Open;
                st.open_value = start_action->value;
            }
        }
        if (!bad.empty()) {
            std::sort(bad.begin(), bad.end());
            return CheckResult{false, i, std::move(bad)};
        }
    }
    return CheckResult{};
}

std::int64_t duration_between(const EventSequence& seq, int i, int j) {
    const int n = static_cast<int>(seq.size());
    if (i < 1 || j < i || j > n) {
        throw std::out_of_range("duration_between: bad positions " + std::to_string(i) + ", " +
                                std::to_string(j) + " for length " + std::to_string(n));
    }
    std::int64_t sum = 0;
    for (int k = i + 1; k <= j; ++k) {
        sum += seq[static_cast<std::size_t>(k - 1)].delta;
    }
    return sum;
}

std::vector<TokenView> tokens_of(const EventSequence& seq, const Name& variable) {
    std::vector<TokenView> out;
    std::optional<int> open_pos;
    Name open_value;
    bool open = false;
    for (int i = 1; i <= static_cast<int>(seq.size()); ++i) {
        const Event& event = seq[static_cast<std::size_t>(i - 1)];
        const Action* end_action = nullptr;
        const Action* start_action = nullptr;
        for (const auto& action : event.actions) {
            if (action.variable != variable) continue;
            (action.kind == ActionKind::End ? end_action : start_action) = &action;
        }
        if (end_action != nullptr) {
            if (open) {
                out.push_back(TokenView{variable, open_value, open_pos, i});
            } else {
                out.push_back(TokenView{variable, end_action->value, std::nullopt, i});
            }
            open = false;
            open_pos.reset();
        }
        if (start_action != nullptr) {
            open = true;
            open_pos = i;
            open_value = start_action->value;
        }
    }
    if (open) {
        out.push_back(TokenView{variable, open_value, open_pos, std::nullopt});
    }
    return out;
}

Openness openness(const EventSequence& seq, const Name& variable) {
    bool open_left = false;
    bool open_right = false;
    for (const auto& token : tokens_of(seq, variable)) {
        if (!token.start_index.has_value()) open_left = true;
        if (!token.end_index.has_value()) open_right = true;
    }
    if (open_left && open_right) return Openness::OpenBoth;
    if (open_left) return Openness::OpenLeft;
    if (open_right) return Openness::OpenRight;
    return Openness::Closed;
}

CanonicalizeResult canonicalize_first_delta(EventSequence seq) {
    CanonicalizeResult result;
    result.changed = !seq.empty() && seq.front().delta != 1;
    if (result.changed) {
        seq.front().delta = 1;
    }
    result.sequence = std::move(seq);
    return result;
}

} // namespace tbsynth
