#pragma once

namespace rearrange {

/// Transport limits of the mobile tweezers. SI units throughout.
struct PhysicsParams {
    double a_max = 2750.0;       // m/s^2
    double v_max = 0.13;         // m/s
    double t_transfer = 60e-6;   // s, one pick-up or one drop-off
    double d_site = 5e-6;        // m, trap pitch

    /// Throws std::invalid_argument unless every field is strictly positive.
    void check() const;
};

struct MoveTime {
    double kinematic = 0.0;  // s
    double total = 0.0;      // s, kinematic + 2 * t_transfer
};

/// Travel time for `sites` lattice pitches under a trapezoidal velocity
/// profile that starts and ends at rest. Short hops never reach v_max and
/// degenerate to a triangular profile.
double kinematic_time(int sites, const PhysicsParams& params = {});

/// Kinematic time plus the pick-up and drop-off transfers.
MoveTime move_time(int sites, const PhysicsParams& params = {});

}  // namespace rearrange
