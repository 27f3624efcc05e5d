#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tbsynth/arena.hpp"

namespace tbsynth {

/// Least-index attractor membership for Charlie's reachability objective.
struct AttractorResult {
    /// rank[q] = least i with q in the i-th attractor stage; -1 when q is
    /// not attracted at all.  Rank 0 exactly on the final states.
    std::vector<std::int64_t> rank;
    std::vector<bool> winning_c;
    std::vector<bool> winning_e;  ///< complement of winning_c (determinacy)
    std::int64_t stabilization_index = 0;  ///< largest finite rank
};

/// Backward worklist induction with per-edge predecessor counting: a Charlie
/// state joins one stage after its earliest-attracted successor, an Eve
/// state one stage after its last.  Dead ends: Eve's are vacuously attracted
/// (stage 1 unless final), Charlie's are never attracted unless final.
AttractorResult attractor(const Arena& arena);

/// Charlie wins iff the initial state is attracted.
Player winner(const Arena& arena, const AttractorResult& attractor);
Player winner(const Arena& arena);

/// Positional moves for Charlie-turn states of the winning region.  States
/// of positive rank map to the least move (canonical move order) that
/// strictly decreases rank; rank-0 states map to the least move staying in
/// the winning region, or are absent when no edge stays there.
struct StrategyTable {
    std::unordered_map<int, Move> moves;
};

StrategyTable extract_strategy(const Arena& arena,
                               const AttractorResult& attractor);

/// One-line report: region sizes, stabilization index, winner.
std::string region_summary(const Arena& arena, const AttractorResult& attractor);

}  // namespace tbsynth
