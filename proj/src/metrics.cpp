#include "rearrange/metrics.hpp"

#include <stdexcept>

namespace rearrange {

double fill_rate(const Lattice& lattice, const TargetZone& zone) {
    if (!zone.fits(lattice)) throw std::invalid_argument("target zone does not fit the lattice");
    return static_cast<double>(zone_atom_count(lattice, zone)) / zone.site_count();
}

double retention_rate(int final_zone_atoms, int initial_atoms) {
    if (initial_atoms < 1) throw std::invalid_argument("retention needs at least one initial atom");
    if (final_zone_atoms < 0) throw std::invalid_argument("final atom count must be non-negative");
    return static_cast<double>(final_zone_atoms) / initial_atoms;
}

}  // namespace rearrange
