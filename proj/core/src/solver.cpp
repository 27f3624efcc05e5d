#include "tbsynth/solver.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace tbsynth {

AttractorResult attractor(const Arena& arena) {
    const std::size_t n = arena.states.size();
    AttractorResult out;
    out.rank.assign(n, -1);
    out.winning_c.assign(n, false);
    out.winning_e.assign(n, false);

    // Reverse adjacency, one entry per edge so Eve's counters reach zero
    // exactly when every outgoing edge leads into the attracted set.
    std::vector<std::vector<int>> predecessors(n);
    std::vector<std::size_t> pending(n);
    for (std::size_t q = 0; q < n; ++q) {
        pending[q] = arena.edges[q].size();
        for (const Arena::Edge& edge : arena.edges[q]) {
            predecessors[edge.target].push_back(static_cast<int>(q));
        }
    }

    // FIFO processing keeps queue ranks nondecreasing, so a Charlie
    // predecessor is attracted by its minimum-rank successor and an Eve
    // predecessor by its maximum-rank one — the exact least stage indices.
    std::deque<int> queue;
    for (std::size_t q = 0; q < n; ++q) {
        if (arena.final_state[q]) {
            out.rank[q] = 0;
            queue.push_back(static_cast<int>(q));
        }
    }
    for (std::size_t q = 0; q < n; ++q) {
        if (out.rank[q] == -1 && pending[q] == 0 &&
            arena.turn[q] == Player::Eve) {
            out.rank[q] = 1;  // vacuous universal over no successors
            queue.push_back(static_cast<int>(q));
        }
    }

    while (!queue.empty()) {
        const int t = queue.front();
        queue.pop_front();
        for (const int p : predecessors[t]) {
            if (arena.turn[p] == Player::Eve) {
                if (pending[p] > 0) --pending[p];
                if (out.rank[p] != -1 || pending[p] > 0) continue;
            } else if (out.rank[p] != -1) {
                continue;
            }
            out.rank[p] = out.rank[t] + 1;
            queue.push_back(p);
        }
    }

    for (std::size_t q = 0; q < n; ++q) {
        if (out.rank[q] >= 0) {
            out.winning_c[q] = true;
            out.stabilization_index =
                std::max(out.stabilization_index, out.rank[q]);
        } else {
            out.winning_e[q] = true;
        }
    }
    return out;
}

Player winner(const Arena& arena, const AttractorResult& attractor) {
    return attractor.winning_c[arena.initial] ? Player::Charlie : Player::Eve;
}

Player winner(const Arena& arena) {
    return winner(arena, attractor(arena));
}

StrategyTable extract_strategy(const Arena& arena,
                               const AttractorResult& attractor) {
    StrategyTable table;
    for (std::size_t q = 0; q < arena.states.size(); ++q) {
        if (arena.turn[q] != Player::Charlie || !attractor.winning_c[q]) {
            continue;
        }
        const std::int64_t rank = attractor.rank[q];
        const Arena::Edge* best = nullptr;
        for (const Arena::Edge& edge : arena.edges[q]) {
            const std::int64_t target_rank = attractor.rank[edge.target];
            if (target_rank < 0) continue;
            if (rank > 0 && target_rank >= rank) continue;
            if (best == nullptr || move_less(edge.move, best->move)) {
                best = &edge;
            }
        }
        if (rank > 0 && best == nullptr) {
            throw std::logic_error(
                "attracted Charlie state lacks a rank-decreasing move");
        }
        if (best != nullptr) {
            table.moves.emplace(static_cast<int>(q), best->move);
        }
    }
    return table;
}

std::string region_summary(const Arena& arena,
                           const AttractorResult& attractor) {
    std::size_t wc = 0;
    for (const bool b : attractor.winning_c) wc += b ? 1 : 0;
    const std::size_t we = arena.states.size() - wc;
    std::string out = "|W_C| = " + std::to_string(wc);
    out += ", |W_E| = " + std::to_string(we);
    out += ", stabilized at " + std::to_string(attractor.stabilization_index);
    out += ", winner: " + player_to_string(winner(arena, attractor));
    return out;
}

}  // namespace tbsynth
