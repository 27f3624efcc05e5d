#include "tbsynth/matching.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>

#include "tbsynth/errors.hpp"

namespace tbsynth {

std::string statement_id_to_string(const StatementId& id) {
    return "r" + std::to_string(id.rule) + "s" + std::to_string(id.statement);
}

std::vector<CompiledStatement> compile_statements(const PlanningProblem& problem) {
    std::vector<CompiledStatement> out;
    for (int r = 0; r < static_cast<int>(problem.rules.size()); ++r) {
        const SyncRule& rule = problem.rules[static_cast<std::size_t>(r)];
        if (!rule.trigger.has_value()) {
            throw InputError("unsupported: triggerless rule");
        }
        for (int s = 0; s < static_cast<int>(rule.statements.size()); ++s) {
            const ExistentialStatement& stmt = rule.statements[static_cast<std::size_t>(s)];
            CompiledStatement compiled;
            compiled.id = StatementId{r, s};
            std::vector<Quantifier> tokens;
            tokens.push_back(*rule.trigger);
            tokens.insert(tokens.end(), stmt.quantifiers.begin(), stmt.quantifiers.end());
            for (const auto& quant : tokens) {
                CompiledToken token;
                token.token = quant.token;
                token.variable = quant.variable;
                token.value = quant.value;
                token.start_term = compiled.terms.size();
                compiled.terms.push_back(Term{Endpoint::Start, quant.token});
                token.end_term = compiled.terms.size();
                compiled.terms.push_back(Term{Endpoint::End, quant.token});
                compiled.tokens.push_back(std::move(token));
            }
            compiled.initial_dbm = Dbm::from_constraints(
                compiled.terms, clause_to_constraints(stmt, *rule.trigger, problem.variables));
            out.push_back(std::move(compiled));
        }
    }
    return out;
}

bool MatchingStructure::is_closed() const {
    return std::find(matched.begin(), matched.end(), false) == matched.end();
}

bool MatchingStructure::is_initial() const {
    return std::find(matched.begin(), matched.end(), true) == matched.end();
}

bool MatchingStructure::is_active() const {
    return matched[statement->trigger().start_term] && !is_closed();
}

bool MatchingStructure::is_residual() const {
    if (!is_active()) return false;
    for (std::size_t i = 0; i < matched.size(); ++i) {
        if (!matched[i]) continue;
        for (std::size_t j = 0; j < matched.size(); ++j) {
            if (matched[j]) continue;
            if (dbm.at(j, i) != kInfinity) return false;
        }
    }
    return true;
}

bool MatchingStructure::operator==(const MatchingStructure& other) const {
    return statement->id == other.statement->id && matched == other.matched &&
           clock == other.clock && dbm == other.dbm;
}

std::string MatchingStructure::key() const {
    std::ostringstream out;
    out << statement_id_to_string(statement->id) << "|";
    for (bool bit : matched) out << (bit ? '1' : '0');
    out << "|" << clock << "|" << dbm.key();
    return out.str();
}

std::string MatchingStructure::to_string() const {
    std::ostringstream out;
    out << statement_id_to_string(statement->id) << " t=" << clock << " M={";
    bool first = true;
    for (std::size_t i = 0; i < matched.size(); ++i) {
        if (!matched[i]) continue;
        if (!first) out << ",";
        out << term_to_string(statement->terms[i]);
        first = false;
    }
    out << "}";
    return out.str();
}

MatchingStructure initial_structure(const CompiledStatement& statement) {
    MatchingStructure ms;
    ms.statement = &statement;
    ms.dbm = statement.initial_dbm;
    ms.matched.assign(statement.terms.size(), false);
    ms.clock = 0;
    return ms;
}

bool admissible(const MatchingStructure& ms, const Event& event) {
    for (std::size_t i = 0; i < ms.matched.size(); ++i) {
        if (!ms.matched[i]) continue;
        for (std::size_t j = 0; j < ms.matched.size(); ++j) {
            if (ms.matched[j]) continue;
            if (event.delta > ms.dbm.at(j, i)) return false;
        }
    }
    return true;
}

namespace {

bool event_has(const Event& event, ActionKind kind, const Name& variable, const Name& value) {
    for (const auto& action : event.actions) {
        if (action.kind == kind && action.variable == variable && action.value == value) {
            return true;
        }
    }
    return false;
}

// Conditions on the candidate set I beyond its composition: every predecessor
// of a matched term is already accounted for, lower bounds from matched terms
// are met by the elapsed delta, and terms matched together are either at
// distance exactly zero or unrelated.
bool relations_hold(const MatchingStructure& ms, const Event& event,
                    const std::vector<std::size_t>& candidate) {
    const Dbm& dbm = ms.dbm;
    std::vector<bool> in_candidate(ms.matched.size(), false);
    for (std::size_t t : candidate) in_candidate[t] = true;
    for (std::size_t t : candidate) {
        for (std::size_t other = 0; other < ms.matched.size(); ++other) {
            if (other == t) continue;
            if (dbm.at(other, t) <= 0 && !ms.matched[other] && !in_candidate[other]) {
                return false; // a term bound to precede t is still unmatched
            }
            if (ms.matched[other]) {
                if (dbm.at(other, t) != kInfinity && event.delta < -dbm.at(other, t)) {
                    return false; // lower bound from a matched term not yet reached
                }
            } else if (in_candidate[other]) {
                if (dbm.at(other, t) != 0 && dbm.at(t, other) != 0 &&
                    !(dbm.at(other, t) == kInfinity && dbm.at(t, other) == kInfinity)) {
                    return false; // simultaneous match needs zero distance or no bound
                }
            }
        }
    }
    return true;
}

} // namespace

std::vector<std::size_t> forced_ends(const MatchingStructure& ms, const Event& event) {
    std::vector<std::size_t> out;
    for (const auto& token : ms.statement->tokens) {
        if (ms.matched[token.end_term] || !ms.matched[token.start_term]) continue;
        if (event_has(event, ActionKind::End, token.variable, token.value)) {
            out.push_back(token.end_term);
        }
    }
    return out;
}

std::vector<std::vector<std::size_t>> i_match_candidates(const MatchingStructure& ms,
                                                         const Event& event) {
    std::vector<std::vector<std::size_t>> out;
    if (!admissible(ms, event)) return out;
    const std::vector<std::size_t> forced = forced_ends(ms, event);
    std::vector<std::size_t> optional_starts;
    for (const auto& token : ms.statement->tokens) {
        if (ms.matched[token.start_term]) continue;
        if (event_has(event, ActionKind::Start, token.variable, token.value)) {
            optional_starts.push_back(token.start_term);
        }
    }
    for (std::size_t mask = 0; mask < (std::size_t{1} << optional_starts.size()); ++mask) {
        std::vector<std::size_t> candidate = forced;
        for (std::size_t k = 0; k < optional_starts.size(); ++k) {
            if (mask & (std::size_t{1} << k)) candidate.push_back(optional_starts[k]);
        }
        std::sort(candidate.begin(), candidate.end());
        if (relations_hold(ms, event, candidate)) {
            out.push_back(std::move(candidate));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

MatchingStructure apply(const MatchingStructure& ms, const Event& event,
                        const std::vector<std::size_t>& chosen, std::int64_t clock_cap) {
    MatchingStructure next;
    next.statement = ms.statement;
    next.dbm = ms.dbm.shifted(event.delta, ms.matched);
    next.clock = ms.clock;
    if (ms.is_active()) {
        next.clock = ms.clock >= clock_cap - event.delta ? clock_cap : ms.clock + event.delta;
    }
    next.matched = ms.matched;
    for (std::size_t t : chosen) {
        assert(!next.matched[t]);
        next.matched[t] = true;
    }
    return next;
}

std::vector<MatchingStructure> step(const std::vector<MatchingStructure>& structures,
                                    const Event& event, std::int64_t clock_cap) {
    std::map<std::string, MatchingStructure> dedup;
    for (const auto& ms : structures) {
        for (const auto& candidate : i_match_candidates(ms, event)) {
            MatchingStructure next = apply(ms, event, candidate, clock_cap);
            dedup.emplace(next.key(), std::move(next));
        }
    }
    std::vector<MatchingStructure> out;
    out.reserve(dedup.size());
    for (auto& [key, ms] : dedup) {
        out.push_back(std::move(ms));
    }
    return out;
}

} // namespace tbsynth
