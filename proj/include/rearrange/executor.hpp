#pragma once

#include <cstdint>
#include <vector>

#include "rearrange/kinematics.hpp"
#include "rearrange/lattice.hpp"
#include "rearrange/plan.hpp"
#include "rearrange/planner.hpp"
#include "rearrange/rng.hpp"

namespace rearrange {

enum class MoveOutcome : std::uint8_t { Succeeded, Lost, Filtered };

struct BatchRecord {
    Phase phase = Phase::CenteringRow;
    bool executed = false;       // false when every source was already gone
    int longest = 0;             // sites, over the moves that ran
    double physical_time = 0.0;  // s
    std::vector<MoveOutcome> outcomes;  // parallel to the planned moves
};

struct ExecutionReport {
    std::size_t batches_executed = 0;
    std::size_t moves_attempted = 0;  // every planned move, filtered ones included
    std::size_t moves_succeeded = 0;
    std::size_t moves_lost = 0;
    std::size_t moves_filtered = 0;
    double physical_time = 0.0;
    std::vector<BatchRecord> batches;
};

/// Replays `plan` on the real lattice. Per batch: moves whose source atom is
/// gone are dropped; the batch takes move_time() of its longest surviving
/// path; each surviving move then draws one loss trial per segment, in
/// (batch, move, segment) order, and stops drawing at its first loss. A lost
/// atom vacates its source and never reaches its destination.
ExecutionReport execute_plan(const Plan& plan, Lattice& lattice, double p_loss, RngStream& rng,
                             const PhysicsParams& params = {});

struct SimConfig {
    int width = 50;
    double p_occ = 0.7;
    double p_loss = 0.0;
    std::uint64_t seed = 0;
    int iteration_cap = 6;
    bool compress = false;
    PhysicsParams physics;
    SizingParams sizing;

    void check() const;
};

struct RunReport {
    int width = 0;
    TargetZone zone;
    int initial_atoms = 0;   // I
    int final_atoms = 0;     // whole lattice
    int zone_atoms = 0;      // F
    double fill_rate = 0.0;  // F / N
    double retention = 0.0;  // F / I
    int iterations = 0;
    std::size_t total_moves = 0;    // moves that actually ran
    std::size_t total_batches = 0;  // batches that actually ran
    std::size_t atoms_lost = 0;
    std::size_t unrepairable = 0;   // defects the last plan could not reach
    double physical_time = 0.0;     // s
    double computation_time = 0.0;  // s, planning and compression wall time
    std::vector<double> fill_trace;  // fill rate after each iteration
};

/// Loads a lattice from the config seed, sizes the target once, then plans
/// (and optionally compresses) and executes until the zone is full or the
/// iteration cap is reached. The zone stays fixed across iterations.
RunReport run_until_filled(const SimConfig& config);

/// Same as above but starting from a given lattice; `rng` supplies the loss
/// trials. `first_plan`, when non-null, receives the iteration-1 plan.
RunReport run_until_filled(const SimConfig& config, Lattice& lattice, RngStream& rng,
                           Plan* first_plan = nullptr);

}  // namespace rearrange
