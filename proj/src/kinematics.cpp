#include "rearrange/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rearrange {

void PhysicsParams::check() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(name) + " must be strictly positive");
    };
    positive(a_max, "a_max");
    positive(v_max, "v_max");
    positive(t_transfer, "t_transfer");
    positive(d_site, "d_site");
}

double kinematic_time(int sites, const PhysicsParams& params) {
    params.check();
    if (sites < 0) throw std::invalid_argument("move distance must be non-negative");
    const double distance = sites * params.d_site;
    const double ramp = params.v_max * params.v_max / (2.0 * params.a_max);
    if (2.0 * ramp <= distance)
        return 2.0 * params.v_max / params.a_max + (distance - 2.0 * ramp) / params.v_max;
    return 2.0 * std::sqrt(distance / params.a_max);
}

MoveTime move_time(int sites, const PhysicsParams& params) {
    const double kin = kinematic_time(sites, params);
    return {kin, kin + 2.0 * params.t_transfer};
}

}  // namespace rearrange
