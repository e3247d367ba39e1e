#include "rearrange/plan.hpp"

#include <array>
#include <utility>

namespace rearrange {

namespace {

constexpr std::array<std::pair<Phase, std::string_view>, 6> kPhaseNames{{
    {Phase::CenteringRow, "centering-row"},
    {Phase::CenteringCol, "centering-col"},
    {Phase::Spread, "spread"},
    {Phase::Squeeze, "squeeze"},
    {Phase::Corner, "corner"},
    {Phase::Repair, "repair"},
}};

}  // namespace

std::string_view to_string(Phase phase) {
    for (const auto& [p, name] : kPhaseNames)
        if (p == phase) return name;
    return "unknown";
}

std::optional<Phase> parse_phase(std::string_view text) {
    for (const auto& [p, name] : kPhaseNames)
        if (name == text) return p;
    return std::nullopt;
}

std::size_t Plan::move_count() const {
    std::size_t total = 0;
    for (const auto& b : batches) total += b.size();
    return total;
}

Lattice replay_lossless(const Plan& plan, const Lattice& start) {
    Lattice state = start;
    for (const auto& batch : plan.batches) state = apply_batch_lossless(state, batch);
    return state;
}

}  // namespace rearrange
