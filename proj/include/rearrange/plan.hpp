#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "rearrange/lattice.hpp"

namespace rearrange {

/// Planner subroutine that emitted a batch.
enum class Phase { CenteringRow, CenteringCol, Spread, Squeeze, Corner, Repair };

std::string_view to_string(Phase phase);
std::optional<Phase> parse_phase(std::string_view text);

/// Ordered batches computed on a lossless copy of the lattice.
struct Plan {
    TargetZone zone;
    std::vector<MoveBatch> batches;
    std::vector<Phase> phases;  // parallel to `batches`
    /// Defects the repair step could not reach. Empty for a complete plan.
    std::vector<Coord> unrepairable;

    void append(Phase phase, MoveBatch batch) {
        batches.push_back(std::move(batch));
        phases.push_back(phase);
    }
    std::size_t batch_count() const { return batches.size(); }
    std::size_t move_count() const;
};

/// Applies every batch losslessly (with validation) and returns the result.
Lattice replay_lossless(const Plan& plan, const Lattice& start);

}  // namespace rearrange
