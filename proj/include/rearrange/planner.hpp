#pragma once

#include <stdexcept>
#include <vector>

#include "rearrange/lattice.hpp"
#include "rearrange/plan.hpp"

namespace rearrange {

/// Raised when the loss-aware sizing leaves no room for even a 1 x 1 target.
class InfeasibleTarget : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters of the loss-aware target sizing.
struct SizingParams {
    double reference_width = 30.0;  // W0
    double base_moves = 2.0;        // m0, expected moves per atom at W0
    double safety = 0.95;           // s

    void check() const;
};

/// Largest centered square the atom budget can be expected to fill after
/// transport loss: m = m0 sqrt(W / W0), I_eff = I (1 - p_loss)^m s,
/// L = floor(sqrt(I_eff)).
TargetZone size_target(int atoms, int width, double p_loss, const SizingParams& params = {});

// The planning subroutines below all work on a virtual (lossless) lattice,
// update it in place, and return the batches they emitted in order. Batches
// with no moves are never returned.

/// Per target row, compacts atoms toward the row's center: defects in the
/// left half take the nearest atom to their left, the right half the nearest
/// to their right. One batch per row.
std::vector<MoveBatch> center_rows(Lattice& lattice, const TargetZone& zone);

/// Column analogue of center_rows, columns taken left to right.
std::vector<MoveBatch> center_columns(Lattice& lattice, const TargetZone& zone);

/// Per row outside the target band: atoms within the band's column span are
/// packed toward the nearer span edge (one batch per row); then a column
/// centering pass draws them in. Stops after `max_cycles` or after a cycle
/// that moved nothing.
struct PhaseBatches {
    Phase phase;
    MoveBatch batch;
};
std::vector<PhaseBatches> spread_and_squeeze(Lattice& lattice, const TargetZone& zone, int max_cycles = 4);

/// Shifts the delta x delta corner blocks diagonally into the zone, as rigid
/// blocks. All four together first, then pairs (upper, lower, left, right),
/// then single corners. A group moves only if every destination is free and
/// the batch is valid. A column centering pass follows.
std::vector<PhaseBatches> corner_moves(Lattice& lattice, const TargetZone& zone);

struct RepairResult {
    std::vector<MoveBatch> batches;
    std::vector<Coord> unrepairable;
};

/// Fills the remaining defects one at a time, deepest first (distance from
/// the zone boundary, ties row-major). Each defect takes the nearest atom
/// outside the zone that can reach it over empty sites, in a single-move
/// batch; the route is a straight line, else an L, else the shortest grid
/// path with fewest turns.
///
/// A defect walled in by atoms is filled instead by shifting the atoms of
/// one straight ray a place inward, the outermost being an atom outside the
/// zone (one batch). If no ray carries such an atom, one is first routed
/// onto the ray just past the zone edge.
RepairResult repair_defects(Lattice& lattice, const TargetZone& zone);

/// Row centering, column centering, spread-and-squeeze (up to four cycles),
/// corner shifts, a second spread-and-squeeze (up to three cycles) and defect
/// repair, run on a copy of `lattice`.
Plan plan(const Lattice& lattice, const TargetZone& zone);

/// Shortest 4-connected route over empty sites from `source` (an atom) to
/// `dest`, preferring fewer turns among equally short routes. Empty when
/// `dest` is unreachable.
std::vector<Coord> find_route(const Lattice& lattice, Coord source, Coord dest);

}  // namespace rearrange
