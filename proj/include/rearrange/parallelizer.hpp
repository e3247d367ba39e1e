#pragma once

#include <span>
#include <string>
#include <vector>

#include "rearrange/lattice.hpp"
#include "rearrange/plan.hpp"

namespace rearrange {

/// Transport rules for a batch of simultaneous moves, numbered as the
/// crossed-AOD restrictions are usually listed:
///   1. a move may not pass over (or land on) a static atom;
///   2. a move may not sweep past a static atom sitting on a source
///      row/column of another move in the batch (ending aligned with it is
///      fine);
///   3. sources are distinct and occupied, destinations are distinct and
///      every cell of every path lies on the lattice;
///   4. no two atoms meet in a cell or swap cells while moving;
///   5. moves sharing a row (column) keep their column (row) order;
///   6. moves on different lines keep their relative order, and moves that
///      share a line leave it together.
///
/// Rule 4 is judged on a unit-speed timeline: every atom advances one site
/// per tick along its own path and rests on its destination once there.
struct RuleViolation {
    int rule = 0;
    std::vector<std::size_t> moves;  // indices into the batch
    std::string detail;
};

std::string describe(const RuleViolation& violation);

/// Checks a batch against the state immediately before it runs. Returns an
/// empty list iff every rule holds.
std::vector<RuleViolation> validate_batch(const MoveBatch& batch, const Lattice& before);

/// Rule 4 for a single pair.
bool paths_collide(const Move& a, const Move& b);

/// Rules 5 and 6 for a single pair: returns the rule numbers broken (each at
/// most once, ascending).
std::vector<int> order_violations(const Move& a, const Move& b);

/// Greedy batch merging. Each move is pulled into the earliest batch that
/// can absorb it while every batch stays valid and the lossless end state is
/// unchanged; passes repeat until nothing moves. Throws PlanConsistencyError
/// if the result does not replay to the same lattice as the input.
Plan compress(const Plan& plan, const Lattice& initial);

}  // namespace rearrange
