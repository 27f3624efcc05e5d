#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tbsynth/model.hpp"

namespace tbsynth {

/// Difference-bound matrix over a fixed list of terms.
///
/// Entry (i, j) is an upper bound on the value of terms()[i] minus the value
/// of terms()[j]; kInfinity means "unconstrained".  The matrix is kept exactly
/// as constructed and shifted — entries are never tightened by closure, so two
/// matrices compare equal only when they were built through the same
/// constraint and shift history.
class Dbm {
public:
    Dbm() = default;

    /// Matrix with zero diagonal and every off-diagonal entry at kInfinity.
    explicit Dbm(std::vector<Term> terms);

    /// Builds the unshifted matrix for a set of difference constraints,
    /// min-merging bounds that address the same entry.  Constraints over terms
    /// that are not in `terms` are rejected.
    static Dbm from_constraints(std::vector<Term> terms,
                                const std::vector<DifferenceConstraint>& constraints);

    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    std::optional<std::size_t> index_of(const Term& term) const;

    /// Upper bound on terms()[i] - terms()[j].
    std::int64_t at(std::size_t i, std::size_t j) const { return entries_[i * terms_.size() + j]; }

    /// Upper bound on lhs - rhs; both terms must be present.
    std::int64_t at(const Term& lhs, const Term& rhs) const;

    /// Overwrites one entry.
    void set(std::size_t i, std::size_t j, std::int64_t bound);

    /// Min-merges a bound into one entry.
    void tighten(std::size_t i, std::size_t j, std::int64_t bound);

    /// Time shift by delta >= 0 with respect to a matched-term set: an entry
    /// bounding (matched - unmatched) grows by delta, an entry bounding
    /// (unmatched - matched) shrinks by delta, and every other entry — both
    /// terms matched or both unmatched — is unchanged.  kInfinity absorbs the
    /// shift.  Finite arithmetic that would overflow raises OverflowError.
    Dbm shifted(std::int64_t delta, const std::vector<bool>& matched) const;

    bool operator==(const Dbm&) const = default;

    /// Multi-line rendering, one row per term, for diagnostics and tests.
    std::string to_string() const;

    /// Compact single-line encoding of the entries, for state interning.
    std::string key() const;

private:
    std::vector<Term> terms_;
    std::vector<std::int64_t> entries_;
};

} // namespace tbsynth
