#include "tbsynth/automaton.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "tbsynth/errors.hpp"

namespace tbsynth {

// ---------------------------------------------------------------------------
// Timeline-validity automaton
// ---------------------------------------------------------------------------

std::string TvState::key() const {
    if (bottom) {
        return "B";
    }
    std::ostringstream out;
    out << (fresh ? 'f' : '.') << (open_left ? 'l' : '.') << (terminal ? 't' : '.');
    for (int entry : entries) {
        out << '|' << entry;
    }
    return out.str();
}

namespace {

TvState tv_bottom() {
    TvState state;
    state.bottom = true;
    state.fresh = false;
    return state;
}

}  // namespace

TvAutomaton::TvAutomaton(std::vector<StateVariable> variables, bool check_transitions)
    : variables_(std::move(variables)), check_transitions_(check_transitions) {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        variable_index_.emplace(variables_[i].name, i);
    }
}

TvState TvAutomaton::initial() const {
    TvState state;
    state.entries.assign(variables_.size(), kTvNever);
    return state;
}

TvState TvAutomaton::successor(const TvState& state, const Event& event) const {
    if (state.bottom) {
        return tv_bottom();
    }
    if (state.terminal) {
        // The previous event left a token dangling; it had to be the last.
        return tv_bottom();
    }
    TvState next = state;
    next.fresh = false;
    bool any_bare_end = false;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        const StateVariable& var = variables_[i];
        const Action* end_action = nullptr;
        const Action* start_action = nullptr;
        for (const Action& action : event.actions) {
            if (action.variable != var.name) {
                continue;
            }
            if (!var.has_value(action.value)) {
                throw InputError("unknown value '" + action.value + "' for variable '" +
                                 var.name + "'");
            }
            if (action.kind == ActionKind::End) {
                end_action = &action;
            } else {
                start_action = &action;
            }
        }
        bool ended_here = false;
        if (end_action != nullptr) {
            int entry = state.entries[i];
            if (entry >= 0) {
                if (var.values[static_cast<std::size_t>(entry)] != end_action->value) {
                    return tv_bottom();  // end value disagrees with the open token
                }
            } else if (entry == kTvClosed) {
                return tv_bottom();  // second end with no interleaving start
            } else {
                next.open_left = true;  // token closes without ever starting
            }
            next.entries[i] = kTvClosed;
            ended_here = true;
        }
        if (start_action != nullptr) {
            if (ended_here) {
                if (check_transitions_) {
                    auto it = var.transitions.find(end_action->value);
                    const bool allowed =
                        it != var.transitions.end() &&
                        std::find(it->second.begin(), it->second.end(), start_action->value) !=
                            it->second.end();
                    if (!allowed) {
                        return tv_bottom();
                    }
                }
            } else {
                if (state.entries[i] >= 0) {
                    return tv_bottom();  // start while a token is still open
                }
                if (!state.fresh) {
                    return tv_bottom();  // mid-sequence start must follow an end
                }
            }
            auto pos = std::find(var.values.begin(), var.values.end(), start_action->value);
            next.entries[i] = static_cast<int>(pos - var.values.begin());
        } else if (ended_here) {
            any_bare_end = true;
        }
    }
    next.terminal = any_bare_end;
    return next;
}

bool TvAutomaton::is_final(const TvState& state) const {
    if (state.bottom || state.open_left) {
        return false;
    }
    for (int entry : state.entries) {
        if (entry >= 0) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Synchronization-rule automaton
// ---------------------------------------------------------------------------

std::string SyncState::key() const {
    if (bottom) {
        return "B";
    }
    std::ostringstream out;
    out << "U";
    for (const MatchingStructure& ms : upsilon) {
        out << ';' << ms.key();
    }
    out << "#D";
    for (const auto& bucket : delta) {
        out << '[';
        for (const MatchingStructure& ms : bucket) {
            out << ms.key() << ';';
        }
        out << ']';
    }
    out << "#P";
    for (const auto& partners : phi) {
        out << '[';
        for (std::size_t p : partners) {
            out << p << ',';
        }
        out << ']';
    }
    return out.str();
}

namespace {

SyncState sync_bottom() {
    SyncState state;
    state.bottom = true;
    return state;
}

bool contains_closed(const std::vector<MatchingStructure>& structures) {
    return std::any_of(structures.begin(), structures.end(),
                       [](const MatchingStructure& ms) { return ms.is_closed(); });
}

}  // namespace

SyncAutomaton::SyncAutomaton(std::shared_ptr<const PlanningProblem> problem, std::int64_t horizon)
    : problem_(std::move(problem)), horizon_(horizon) {
    statements_ = compile_statements(*problem_);
    rule_statements_.assign(problem_->rules.size(), {});
    for (std::size_t k = 0; k < statements_.size(); ++k) {
        rule_statements_[static_cast<std::size_t>(statements_[k].id.rule)].push_back(k);
    }
    window_ = tbsynth::window(*problem_);
    clock_cap_ = window_ + horizon_;
}

SyncState SyncAutomaton::initial() const {
    SyncState state;
    state.upsilon.reserve(statements_.size());
    for (const CompiledStatement& statement : statements_) {
        state.upsilon.push_back(initial_structure(statement));
    }
    std::sort(state.upsilon.begin(), state.upsilon.end(),
              [](const MatchingStructure& a, const MatchingStructure& b) {
                  return a.key() < b.key();
              });
    state.delta.assign(statements_.size(), {});
    state.phi.assign(statements_.size(), {});
    for (std::size_t k = 0; k < statements_.size(); ++k) {
        state.phi[k] = rule_statements_[static_cast<std::size_t>(statements_[k].id.rule)];
    }
    return state;
}

SyncState SyncAutomaton::successor(const SyncState& state, const Event& event) const {
    if (state.bottom) {
        return sync_bottom();
    }
    if (event.delta < 1 || event.delta > horizon_) {
        throw InputError("event delta " + std::to_string(event.delta) +
                         " outside [1, " + std::to_string(horizon_) + "]");
    }
    const std::int64_t delta = event.delta;
    const std::size_t nstat = statements_.size();

    // Partition the current structures: active ones group by (rule, clock),
    // the rest step as one pool.
    std::vector<MatchingStructure> pool;
    std::map<std::pair<int, std::int64_t>, std::vector<MatchingStructure>> groups;
    for (const MatchingStructure& ms : state.upsilon) {
        if (ms.is_active()) {
            groups[{ms.statement->id.rule, ms.clock}].push_back(ms);
        } else {
            pool.push_back(ms);
        }
    }

    struct GroupStep {
        int rule = 0;
        std::int64_t age = 0;
        bool crossing = false;
        bool closed = false;
        std::vector<MatchingStructure> stepped;
        std::set<std::size_t> present;  // statements with a nonempty projection
    };
    std::vector<GroupStep> gsteps;
    gsteps.reserve(groups.size());
    for (const auto& [slot, members] : groups) {
        GroupStep gs;
        gs.rule = slot.first;
        gs.age = slot.second;
        gs.stepped = step(members, event, clock_cap_);
        if (gs.stepped.empty()) {
            return sync_bottom();  // an aged trigger lost every way to be satisfied
        }
        gs.crossing = gs.age > window_ - delta;
        gs.closed = contains_closed(gs.stepped);
        for (const MatchingStructure& ms : gs.stepped) {
            gs.present.insert(static_cast<std::size_t>(ms.statement - statements_.data()));
        }
        gsteps.push_back(std::move(gs));
    }

    std::vector<MatchingStructure> pool_stepped = step(pool, event, clock_cap_);

    // Next structure set: the stepped pool plus every group that neither
    // crossed the window nor satisfied its rule by closing.
    std::vector<MatchingStructure> upsilon_next = pool_stepped;
    for (const GroupStep& gs : gsteps) {
        if (!gs.crossing && !gs.closed) {
            upsilon_next.insert(upsilon_next.end(), gs.stepped.begin(), gs.stepped.end());
        }
    }
    std::sort(upsilon_next.begin(), upsilon_next.end(),
              [](const MatchingStructure& a, const MatchingStructure& b) {
                  return a.key() < b.key();
              });
    upsilon_next.erase(std::unique(upsilon_next.begin(), upsilon_next.end(),
                                   [](const MatchingStructure& a, const MatchingStructure& b) {
                                       return a.key() == b.key();
                                   }),
                       upsilon_next.end());

    // Aged buckets: a statement whose group crossed the window this step gets
    // the youngest crossing projection; everything else steps its old bucket.
    std::vector<std::vector<MatchingStructure>> delta_next(nstat);
    std::vector<bool> promoted(nstat, false);
    std::vector<std::int64_t> promoted_age(nstat, -1);
    for (std::size_t k = 0; k < nstat; ++k) {
        const int rule = statements_[k].id.rule;
        const GroupStep* best = nullptr;
        for (const GroupStep& gs : gsteps) {
            if (gs.rule != rule || !gs.crossing || gs.present.count(k) == 0) {
                continue;
            }
            if (best == nullptr || gs.age < best->age) {
                best = &gs;
            }
        }
        if (best != nullptr) {
            for (const MatchingStructure& ms : best->stepped) {
                if (ms.statement == &statements_[k]) {
                    delta_next[k].push_back(ms);
                }
            }
            promoted[k] = true;
            promoted_age[k] = best->age;
        } else {
            delta_next[k] = step(state.delta[k], event, clock_cap_);
        }
    }

    // Partner sets: a discharge of statement k' also discharges everything in
    // phi(k').  The set resets to the whole rule when a bucket tracking the
    // same trigger closes, and it drops statements that were promoted at a
    // crossing this statement missed.
    std::vector<std::vector<std::size_t>> phi_next(nstat);
    for (std::size_t k = 0; k < nstat; ++k) {
        const int rule = statements_[k].id.rule;
        const std::vector<std::size_t>& partners =
            rule_statements_[static_cast<std::size_t>(rule)];
        bool reset = false;
        for (std::size_t other : partners) {
            if (!promoted[other] || !contains_closed(delta_next[other])) {
                continue;
            }
            for (const GroupStep& gs : gsteps) {
                if (gs.rule == rule && gs.crossing && gs.age == promoted_age[other] &&
                    gs.present.count(k) != 0) {
                    reset = true;
                    break;
                }
            }
            if (reset) {
                break;
            }
        }
        if (!reset) {
            for (std::size_t other : partners) {
                if (promoted[other] || !contains_closed(delta_next[other])) {
                    continue;
                }
                const std::vector<std::size_t>& old = state.phi[other];
                if (std::find(old.begin(), old.end(), k) != old.end()) {
                    reset = true;
                    break;
                }
            }
        }
        if (reset) {
            phi_next[k] = partners;
            continue;
        }
        for (std::size_t other : state.phi[k]) {
            bool drop = false;
            for (const GroupStep& gs : gsteps) {
                if (gs.rule == rule && gs.crossing && gs.present.count(other) != 0 &&
                    gs.present.count(k) == 0) {
                    drop = true;
                    break;
                }
            }
            if (!drop) {
                phi_next[k].push_back(other);
            }
        }
    }

    // Discharge: a closed bucket clears every statement in its partner set.
    std::vector<bool> discharged(nstat, false);
    for (std::size_t k = 0; k < nstat; ++k) {
        const std::vector<std::size_t>& partners =
            rule_statements_[static_cast<std::size_t>(statements_[k].id.rule)];
        for (std::size_t other : partners) {
            if (!contains_closed(delta_next[other])) {
                continue;
            }
            const std::vector<std::size_t>& set = phi_next[other];
            if (std::find(set.begin(), set.end(), k) != set.end()) {
                discharged[k] = true;
                break;
            }
        }
    }
    for (std::size_t k = 0; k < nstat; ++k) {
        if (discharged[k]) {
            delta_next[k].clear();
        }
    }

    // Trigger capture: every rule whose trigger starts in this event must be
    // represented by a fresh structure, else the word is already lost.
    for (std::size_t r = 0; r < problem_->rules.size(); ++r) {
        const Quantifier& trigger = *problem_->rules[r].trigger;
        const bool triggered =
            std::any_of(event.actions.begin(), event.actions.end(), [&](const Action& action) {
                return action.kind == ActionKind::Start && action.variable == trigger.variable &&
                       action.value == trigger.value;
            });
        if (!triggered) {
            continue;
        }
        bool captured = false;
        for (const MatchingStructure& ms : upsilon_next) {
            if (static_cast<std::size_t>(ms.statement->id.rule) == r && ms.clock == 0 &&
                ms.matched[ms.statement->trigger().start_term]) {
                captured = true;
                break;
            }
        }
        if (!captured) {
            return sync_bottom();
        }
    }

    // A structure that closes without its trigger ever aging has satisfied its
    // rule on the spot; it carries no further information.
    upsilon_next.erase(std::remove_if(upsilon_next.begin(), upsilon_next.end(),
                                      [](const MatchingStructure& ms) { return ms.is_closed(); }),
                       upsilon_next.end());

    SyncState next;
    next.upsilon = std::move(upsilon_next);
    next.delta = std::move(delta_next);
    next.phi = std::move(phi_next);
    return next;
}

bool SyncAutomaton::is_final(const SyncState& state) const {
    if (state.bottom) {
        return false;
    }
    for (const MatchingStructure& ms : state.upsilon) {
        if (ms.is_active()) {
            return false;
        }
    }
    for (const auto& bucket : state.delta) {
        if (!bucket.empty()) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Lazy automata
// ---------------------------------------------------------------------------

const TvState* tv_payload(const DfaState& state) {
    const auto* payload = dynamic_cast<const TvPayload*>(state.payload.get());
    return payload != nullptr ? &payload->state : nullptr;
}

const SyncState* sync_payload(const DfaState& state) {
    const auto* payload = dynamic_cast<const SyncPayload*>(state.payload.get());
    return payload != nullptr ? &payload->state : nullptr;
}

const ProductPayload* product_payload(const DfaState& state) {
    return dynamic_cast<const ProductPayload*>(state.payload.get());
}

LazyDfa::LazyDfa(DfaState initial, SuccessorFn successor, FinalFn is_final, DescribeFn describe)
    : initial_(std::move(initial)),
      successor_(std::move(successor)),
      is_final_(std::move(is_final)),
      describe_(std::move(describe)) {}

std::string LazyDfa::describe(const DfaState& state) const {
    return describe_ ? describe_(state) : state.key;
}

namespace {

DfaState make_tv_state(TvState state) {
    auto payload = std::make_shared<TvPayload>();
    payload->state = std::move(state);
    DfaState out;
    out.key = "T:" + payload->state.key();
    out.payload = std::move(payload);
    return out;
}

DfaState make_sync_state(SyncState state) {
    auto payload = std::make_shared<SyncPayload>();
    payload->state = std::move(state);
    DfaState out;
    out.key = "S:" + payload->state.key();
    out.payload = std::move(payload);
    return out;
}

std::string describe_tv_state(const TvState& state, const std::vector<StateVariable>& variables) {
    if (state.bottom) {
        return "bottom";
    }
    std::ostringstream out;
    for (std::size_t i = 0; i < variables.size(); ++i) {
        if (i > 0) {
            out << ' ';
        }
        out << variables[i].name << '=';
        int entry = state.entries[i];
        if (entry == kTvNever) {
            out << '-';
        } else if (entry == kTvClosed) {
            out << '#';
        } else {
            out << variables[i].values[static_cast<std::size_t>(entry)];
        }
    }
    if (state.open_left) {
        out << " openleft";
    }
    if (state.terminal) {
        out << " last";
    }
    return out.str();
}

std::string describe_sync_state(const SyncState& state) {
    if (state.bottom) {
        return "bottom";
    }
    std::size_t active = 0;
    for (const MatchingStructure& ms : state.upsilon) {
        if (ms.is_active()) {
            ++active;
        }
    }
    std::ostringstream out;
    out << "Y=" << state.upsilon.size() << " act=" << active << " D=[";
    for (std::size_t k = 0; k < state.delta.size(); ++k) {
        if (k > 0) {
            out << ',';
        }
        out << state.delta[k].size();
    }
    out << ']';
    return out.str();
}

DfaState make_product_state(DfaState left, DfaState right) {
    auto payload = std::make_shared<ProductPayload>();
    payload->left = std::move(left);
    payload->right = std::move(right);
    DfaState out;
    out.key = std::to_string(payload->left.key.size()) + ":" + payload->left.key + "*" +
              payload->right.key;
    out.payload = std::move(payload);
    return out;
}

LazyDfa make_product(const LazyDfa& a, const LazyDfa& b,
                     std::function<bool(bool, bool)> combine) {
    DfaState initial = make_product_state(a.initial(), b.initial());
    auto successor = [a, b](const DfaState& state, const Event& event) {
        const ProductPayload* pp = product_payload(state);
        assert(pp != nullptr);
        return make_product_state(a.successor(pp->left, event), b.successor(pp->right, event));
    };
    auto is_final = [a, b, combine](const DfaState& state) {
        const ProductPayload* pp = product_payload(state);
        assert(pp != nullptr);
        return combine(a.is_final(pp->left), b.is_final(pp->right));
    };
    auto describe = [a, b](const DfaState& state) {
        const ProductPayload* pp = product_payload(state);
        assert(pp != nullptr);
        return a.describe(pp->left) + " / " + b.describe(pp->right);
    };
    return LazyDfa(std::move(initial), std::move(successor), std::move(is_final),
                   std::move(describe));
}

}  // namespace

LazyDfa make_tv_dfa(std::shared_ptr<const TvAutomaton> tv) {
    DfaState initial = make_tv_state(tv->initial());
    auto successor = [tv](const DfaState& state, const Event& event) {
        const TvState* s = tv_payload(state);
        assert(s != nullptr);
        return make_tv_state(tv->successor(*s, event));
    };
    auto is_final = [tv](const DfaState& state) {
        const TvState* s = tv_payload(state);
        assert(s != nullptr);
        return tv->is_final(*s);
    };
    auto describe = [tv](const DfaState& state) {
        const TvState* s = tv_payload(state);
        assert(s != nullptr);
        return describe_tv_state(*s, tv->variables());
    };
    return LazyDfa(std::move(initial), std::move(successor), std::move(is_final),
                   std::move(describe));
}

LazyDfa make_sync_dfa(std::shared_ptr<const SyncAutomaton> sync) {
    DfaState initial = make_sync_state(sync->initial());
    auto successor = [sync](const DfaState& state, const Event& event) {
        const SyncState* s = sync_payload(state);
        assert(s != nullptr);
        return make_sync_state(sync->successor(*s, event));
    };
    auto is_final = [sync](const DfaState& state) {
        const SyncState* s = sync_payload(state);
        assert(s != nullptr);
        return sync->is_final(*s);
    };
    auto describe = [](const DfaState& state) {
        const SyncState* s = sync_payload(state);
        assert(s != nullptr);
        return describe_sync_state(*s);
    };
    return LazyDfa(std::move(initial), std::move(successor), std::move(is_final),
                   std::move(describe));
}

LazyDfa intersect(const LazyDfa& a, const LazyDfa& b) {
    return make_product(a, b, [](bool x, bool y) { return x && y; });
}

LazyDfa unite(const LazyDfa& a, const LazyDfa& b) {
    return make_product(a, b, [](bool x, bool y) { return x || y; });
}

LazyDfa complement(const LazyDfa& a) {
    auto successor = [a](const DfaState& state, const Event& event) {
        return a.successor(state, event);
    };
    auto is_final = [a](const DfaState& state) { return !a.is_final(state); };
    auto describe = [a](const DfaState& state) { return a.describe(state); };
    return LazyDfa(a.initial(), std::move(successor), std::move(is_final), std::move(describe));
}

// ---------------------------------------------------------------------------
// Exploration
// ---------------------------------------------------------------------------

int ExploredDfa::find(const std::string& key) const {
    auto it = index.find(key);
    return it != index.end() ? it->second : -1;
}

std::size_t default_state_budget() {
    const char* raw = std::getenv("TBSYNTH_STATE_BUDGET");
    if (raw == nullptr) {
        return 250000;
    }
    char* end = nullptr;
    unsigned long long value = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0' || value == 0) {
        return 250000;
    }
    return static_cast<std::size_t>(value);
}

ExploredDfa explore(const LazyDfa& dfa,
                    const std::function<std::vector<Event>(const DfaState&)>& symbols,
                    std::size_t state_budget) {
    ExploredDfa out;
    auto intern = [&](DfaState state) -> int {
        auto it = out.index.find(state.key);
        if (it != out.index.end()) {
            return it->second;
        }
        if (out.states.size() >= state_budget) {
            throw ResourceError("state budget exceeded while exploring (budget " +
                                    std::to_string(state_budget) + " states)",
                                out.states.size() + 1);
        }
        int id = static_cast<int>(out.states.size());
        out.index.emplace(state.key, id);
        out.final.push_back(dfa.is_final(state));
        out.labels.push_back(dfa.describe(state));
        out.states.push_back(std::move(state));
        out.edges.emplace_back();
        return id;
    };
    std::deque<int> work;
    work.push_back(intern(dfa.initial()));
    while (!work.empty()) {
        int id = work.front();
        work.pop_front();
        std::vector<Event> alphabet = symbols(out.states[static_cast<std::size_t>(id)]);
        for (const Event& symbol : alphabet) {
            DfaState succ = dfa.successor(out.states[static_cast<std::size_t>(id)], symbol);
            bool fresh = out.index.find(succ.key) == out.index.end();
            int target = intern(std::move(succ));
            if (fresh) {
                work.push_back(target);
            }
            out.edges[static_cast<std::size_t>(id)].emplace_back(symbol, target);
        }
    }
    return out;
}

namespace {

std::string dot_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        if (ch == '"' || ch == '\\') {
            out.push_back('\\');
        }
        if (ch == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(ch);
    }
    return out;
}

}  // namespace

std::string to_dot(const ExploredDfa& explored, const std::string& graph_name) {
    std::ostringstream out;
    out << "digraph \"" << dot_escape(graph_name) << "\" {\n";
    out << "  rankdir=LR;\n";
    out << "  __init [shape=point, label=\"\"];\n";
    for (std::size_t i = 0; i < explored.states.size(); ++i) {
        out << "  s" << i << " [shape=" << (explored.final[i] ? "doublecircle" : "circle")
            << ", label=\"" << dot_escape(explored.labels[i]) << "\"];\n";
    }
    out << "  __init -> s0;\n";
    for (std::size_t i = 0; i < explored.edges.size(); ++i) {
        for (const auto& [symbol, target] : explored.edges[i]) {
            out << "  s" << i << " -> s" << target << " [label=\""
                << dot_escape(event_to_string(symbol)) << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

EventSequence normalize_deltas(const EventSequence& seq, std::int64_t horizon) {
    EventSequence out;
    out.reserve(seq.size());
    for (const Event& event : seq) {
        // The first event's delta is conventional: padding in front of it
        // would demote the opening starts to a non-first event, so it is
        // canonicalized instead of split.
        if (out.empty()) {
            Event first = event;
            if (first.delta > horizon) first.delta = 1;
            out.push_back(std::move(first));
            continue;
        }
        std::int64_t remaining = event.delta;
        while (remaining > horizon) {
            out.push_back(Event{{}, horizon});
            remaining -= horizon;
        }
        Event trimmed = event;
        trimmed.delta = remaining;
        out.push_back(std::move(trimmed));
    }
    return out;
}

bool accepts(const LazyDfa& dfa, const EventSequence& seq, std::int64_t horizon) {
    DfaState state = dfa.initial();
    for (const Event& event : normalize_deltas(seq, horizon)) {
        state = dfa.successor(state, event);
    }
    return dfa.is_final(state);
}

// ---------------------------------------------------------------------------
// Shape-guided event enumeration
// ---------------------------------------------------------------------------

std::vector<Event> enumerate_events(const TvState& shape,
                                    const std::vector<StateVariable>& variables,
                                    std::int64_t horizon) {
    if (shape.bottom || shape.terminal) {
        // No well-formed continuation; one empty event exhibits absorption.
        return {Event{{}, 1}};
    }
    // Per-variable action choices, in declaration order.
    std::vector<std::vector<std::vector<Action>>> choices(variables.size());
    for (std::size_t i = 0; i < variables.size(); ++i) {
        const StateVariable& var = variables[i];
        auto& slot = choices[i];
        slot.push_back({});  // leave the variable untouched
        const int entry = shape.entries[i];
        if (entry >= 0) {
            const Name& open_value = var.values[static_cast<std::size_t>(entry)];
            Action end{ActionKind::End, var.name, open_value};
            slot.push_back({end});
            for (const Name& value : var.values) {
                slot.push_back({end, Action{ActionKind::Start, var.name, value}});
            }
        } else if (shape.fresh) {
            for (const Name& value : var.values) {
                slot.push_back({Action{ActionKind::Start, var.name, value}});
            }
        }
    }
    std::vector<std::vector<Action>> action_sets;
    std::vector<Action> current;
    std::function<void(std::size_t)> build = [&](std::size_t i) {
        if (i == choices.size()) {
            action_sets.push_back(current);
            return;
        }
        for (const auto& option : choices[i]) {
            current.insert(current.end(), option.begin(), option.end());
            build(i + 1);
            current.resize(current.size() - option.size());
        }
    };
    build(0);
    std::vector<Event> out;
    out.reserve(action_sets.size() * static_cast<std::size_t>(horizon));
    for (auto& actions : action_sets) {
        std::sort(actions.begin(), actions.end());
        for (std::int64_t delta = 1; delta <= horizon; ++delta) {
            out.push_back(Event{actions, delta});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Planning automaton
// ---------------------------------------------------------------------------

std::function<std::vector<Event>(const DfaState&)> PlanningAutomata::symbols() const {
    auto owner = problem;
    auto h = horizon;
    return [owner, h](const DfaState& state) -> std::vector<Event> {
        const ProductPayload* pp = product_payload(state);
        const TvState* tv = pp != nullptr ? tv_payload(pp->right) : nullptr;
        if (tv == nullptr) {
            return {Event{{}, 1}};
        }
        return enumerate_events(*tv, owner->variables, h);
    };
}

PlanningAutomata build_planning_automata(const PlanningProblem& problem) {
    std::vector<Diagnostic> diagnostics = validate(problem);
    if (!diagnostics.empty()) {
        std::ostringstream out;
        out << "invalid problem:";
        for (const Diagnostic& d : diagnostics) {
            out << "\n  " << (d.context.empty() ? "" : d.context + ": ") << d.message;
        }
        throw InputError(out.str());
    }
    PlanningAutomata result;
    result.problem = std::make_shared<const PlanningProblem>(desugar_durations(problem));
    result.horizon = horizon_d(*result.problem);
    result.sync = std::make_shared<const SyncAutomaton>(result.problem, result.horizon);
    result.tv = std::make_shared<const TvAutomaton>(result.problem->variables, true);
    result.shape = std::make_shared<const TvAutomaton>(result.problem->variables, false);
    result.dfa = intersect(make_sync_dfa(result.sync), make_tv_dfa(result.tv));
    return result;
}

}  // namespace tbsynth
