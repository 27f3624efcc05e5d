#include "tbsynth/dbm.hpp"

#include <sstream>

#include "tbsynth/errors.hpp"

namespace tbsynth {

Dbm::Dbm(std::vector<Term> terms) : terms_(std::move(terms)) {
    entries_.assign(terms_.size() * terms_.size(), kInfinity);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        entries_[i * terms_.size() + i] = 0;
    }
}

Dbm Dbm::from_constraints(std::vector<Term> terms,
                          const std::vector<DifferenceConstraint>& constraints) {
    Dbm dbm(std::move(terms));
    for (const auto& constraint : constraints) {
        auto i = dbm.index_of(constraint.lhs);
        auto j = dbm.index_of(constraint.rhs);
        if (!i || !j) {
            throw InputError("difference constraint over unknown term " +
                             term_to_string(!i ? constraint.lhs : constraint.rhs));
        }
        dbm.tighten(*i, *j, constraint.bound);
    }
    return dbm;
}

std::optional<std::size_t> Dbm::index_of(const Term& term) const {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i] == term) return i;
    }
    return std::nullopt;
}

std::int64_t Dbm::at(const Term& lhs, const Term& rhs) const {
    auto i = index_of(lhs);
    auto j = index_of(rhs);
    if (!i || !j) {
        throw InputError("dbm lookup of unknown term " + term_to_string(!i ? lhs : rhs));
    }
    return at(*i, *j);
}

void Dbm::set(std::size_t i, std::size_t j, std::int64_t bound) {
    entries_[i * terms_.size() + j] = bound;
}

void Dbm::tighten(std::size_t i, std::size_t j, std::int64_t bound) {
    auto& entry = entries_[i * terms_.size() + j];
    if (bound < entry) entry = bound;
}

Dbm Dbm::shifted(std::int64_t delta, const std::vector<bool>& matched) const {
    if (delta < 0) {
        throw InputError("dbm shift by negative delta " + std::to_string(delta));
    }
    if (matched.size() != terms_.size()) {
        throw InputError("dbm shift with matched-set size " + std::to_string(matched.size()) +
                         " over " + std::to_string(terms_.size()) + " terms");
    }
    Dbm out = *this;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        for (std::size_t j = 0; j < terms_.size(); ++j) {
            if (matched[i] == matched[j]) continue;
            auto& entry = out.entries_[i * terms_.size() + j];
            if (entry == kInfinity) continue;
            if (matched[i]) {
                if (entry > kInfinity - 1 - delta) {
                    throw OverflowError("dbm entry overflow while shifting by " +
                                        std::to_string(delta));
                }
                entry += delta;
            } else {
                if (entry < std::numeric_limits<std::int64_t>::min() + delta) {
                    throw OverflowError("dbm entry underflow while shifting by " +
                                        std::to_string(delta));
                }
                entry -= delta;
            }
        }
    }
    return out;
}

std::string Dbm::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        out << term_to_string(terms_[i]) << ":";
        for (std::size_t j = 0; j < terms_.size(); ++j) {
            out << " " << bound_to_string(at(i, j));
        }
        out << "\n";
    }
    return out.str();
}

std::string Dbm::key() const {
    std::ostringstream out;
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        if (k > 0) out << ",";
        if (entries_[k] == kInfinity) {
            out << "inf";
        } else {
            out << entries_[k];
        }
    }
    return out.str();
}

} // namespace tbsynth
