#pragma once

// Brute-force reference for the dynamic transport rules (4, 5 and 6).
// Every atom is stepped one cell per tick along its path and rests on its
// destination afterwards. Collisions are read off the tick-by-tick positions;
// order breaks are read off dense row/column ranks before and after.

#include <algorithm>
#include <set>
#include <tuple>
#include <vector>

#include "rearrange/lattice.hpp"

namespace oracle {

using Finding = std::tuple<int, std::size_t, std::size_t>;  // rule, i < j

inline std::vector<rearrange::Coord> walk(const rearrange::Move& m) {
    std::vector<rearrange::Coord> cells{m.source()};
    for (const auto& s : m.segments()) {
        rearrange::Coord c = s.from;
        const int dr = (s.to.row > c.row) - (s.to.row < c.row);
        const int dc = (s.to.col > c.col) - (s.to.col < c.col);
        while (c != s.to) {
            c = {c.row + dr, c.col + dc};
            cells.push_back(c);
        }
    }
    return cells;
}

inline std::vector<int> dense_rank(const std::vector<int>& values) {
    std::vector<int> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> rank(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        rank[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
    return rank;
}

inline int cmp(int a, int b) { return (a > b) - (a < b); }

inline std::set<Finding> simulate(const std::vector<rearrange::Move>& moves) {
    std::set<Finding> found;
    const std::size_t n = moves.size();
    std::vector<std::vector<rearrange::Coord>> paths;
    std::size_t ticks = 0;
    for (const auto& m : moves) {
        paths.push_back(walk(m));
        ticks = std::max(ticks, paths.back().size());
    }
    auto at = [&](std::size_t i, std::size_t t) {
        return paths[i][std::min(t, paths[i].size() - 1)];
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t t = 0; t < ticks; ++t) {
                const bool meet = at(i, t) == at(j, t);
                const bool swap = t + 1 < ticks && at(i, t) == at(j, t + 1) && at(i, t + 1) == at(j, t);
                if (meet || swap) {
                    found.insert({4, i, j});
                    break;
                }
            }

    std::vector<int> r0, c0, r1, c1;
    for (const auto& m : moves) {
        r0.push_back(m.source().row);
        c0.push_back(m.source().col);
        r1.push_back(m.dest().row);
        c1.push_back(m.dest().col);
    }
    const auto R0 = dense_rank(r0), C0 = dense_rank(c0), R1 = dense_rank(r1), C1 = dense_rank(c1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool row_flip = cmp(R0[i], R0[j]) != cmp(R1[i], R1[j]);
            const bool col_flip = cmp(C0[i], C0[j]) != cmp(C1[i], C1[j]);
            bool within = false, across = false;
            if (R0[i] == R0[j]) {
                within = col_flip;
                across = row_flip;
            } else if (C0[i] == C0[j]) {
                within = row_flip;
                across = col_flip;
            } else {
                across = row_flip || col_flip;
            }
            if (within) found.insert({5, i, j});
            if (across) found.insert({6, i, j});
        }
    return found;
}

}  // namespace oracle
