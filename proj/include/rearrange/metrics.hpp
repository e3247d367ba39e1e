#pragma once

#include "rearrange/lattice.hpp"

namespace rearrange {

/// Occupied fraction of the target zone, F / N.
double fill_rate(const Lattice& lattice, const TargetZone& zone);

/// Zone atoms at termination over atoms initially loaded, F / I.
double retention_rate(int final_zone_atoms, int initial_atoms);

}  // namespace rearrange
