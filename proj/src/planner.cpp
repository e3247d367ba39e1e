#include "rearrange/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <tuple>

#include "rearrange/parallelizer.hpp"

namespace rearrange {

void SizingParams::check() const {
    if (!(reference_width >= 1.0)) throw std::invalid_argument("reference width W0 must be at least 1");
    if (!(base_moves > 0.0)) throw std::invalid_argument("base move count m0 must be positive");
    if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("safety margin must lie in (0, 1]");
}

TargetZone size_target(int atoms, int width, double p_loss, const SizingParams& params) {
    params.check();
    if (width < 1) throw std::invalid_argument("lattice width must be at least 1");
    if (atoms < 0) throw std::invalid_argument("atom count must be non-negative");
    if (!(p_loss >= 0.0 && p_loss < 1.0)) throw std::invalid_argument("loss probability must lie in [0, 1)");

    const double moves = params.base_moves * std::sqrt(width / params.reference_width);
    const double effective = atoms * std::pow(1.0 - p_loss, moves) * params.safety;
    auto side = static_cast<long long>(std::floor(std::sqrt(effective)));
    while (side > 0 && static_cast<double>(side * side) > effective) --side;
    while (static_cast<double>((side + 1) * (side + 1)) <= effective) ++side;
    if (side < 1)
        throw InfeasibleTarget("effective atom budget " + std::to_string(effective) +
                               " cannot fill even a 1x1 target");
    side = std::min<long long>(side, width);
    return TargetZone::centered(width, static_cast<int>(side));
}

namespace {

struct Line {
    bool is_row;
    int index;
    Coord at(int x) const { return is_row ? Coord{index, x} : Coord{x, index}; }
};

// Walks positions start, start+step, ..., stop. Each empty position takes the
// nearest atom found further along the walk direction, no further than
// `limit`. Moves are taken from the state at entry, so every atom moves at
// most once and the result is a single parallel batch.
void pack_line(const Lattice& lattice, Line line, int start, int stop, int step, int limit,
               std::vector<std::uint8_t>& taken, std::vector<Move>& out) {
    if ((stop - start) * step < 0) return;
    int cursor = start;
    for (int x = start;; x += step) {
        const Coord here = line.at(x);
        const bool filled = (lattice.occupied(here) && !taken[static_cast<std::size_t>(x)]);
        if (!filled) {
            int y = std::max((x + step) * step, (cursor + step) * step) * step;
            bool found = false;
            for (; (limit - y) * step >= 0; y += step) {
                if (lattice.occupied(line.at(y)) && !taken[static_cast<std::size_t>(y)]) {
                    found = true;
                    break;
                }
            }
            if (!found) return;
            taken[static_cast<std::size_t>(y)] = 1;
            out.push_back(Move::straight(line.at(y), here));
            cursor = y;
        }
        if (x == stop) return;
    }
}

bool zone_full(const Lattice& lattice, const TargetZone& zone) {
    return zone_atom_count(lattice, zone) == zone.site_count();
}

MoveBatch center_line(Lattice& lattice, const TargetZone& zone, Line line) {
    const int width = lattice.width();
    std::vector<std::uint8_t> taken(static_cast<std::size_t>(width), 0);
    MoveBatch batch;
    const int split = zone.offset() + zone.near_half();
    pack_line(lattice, line, split - 1, zone.offset(), -1, 0, taken, batch.moves);
    pack_line(lattice, line, split, zone.end() - 1, +1, width - 1, taken, batch.moves);
    apply_moves_unchecked(lattice, batch.moves);
    return batch;
}

MoveBatch spread_line(Lattice& lattice, const TargetZone& zone, int row) {
    std::vector<std::uint8_t> taken(static_cast<std::size_t>(lattice.width()), 0);
    MoveBatch batch;
    const Line line{true, row};
    const int split = zone.offset() + zone.near_half();
    pack_line(lattice, line, zone.offset(), split - 1, +1, split - 1, taken, batch.moves);
    pack_line(lattice, line, zone.end() - 1, split, -1, split, taken, batch.moves);
    apply_moves_unchecked(lattice, batch.moves);
    return batch;
}

}  // namespace

std::vector<MoveBatch> center_rows(Lattice& lattice, const TargetZone& zone) {
    if (!zone.fits(lattice)) throw std::invalid_argument("target zone does not fit the lattice");
    std::vector<MoveBatch> out;
    for (int r = zone.offset(); r < zone.end(); ++r) {
        auto batch = center_line(lattice, zone, {true, r});
        if (!batch.empty()) out.push_back(std::move(batch));
    }
    return out;
}

std::vector<MoveBatch> center_columns(Lattice& lattice, const TargetZone& zone) {
    if (!zone.fits(lattice)) throw std::invalid_argument("target zone does not fit the lattice");
    std::vector<MoveBatch> out;
    for (int c = zone.offset(); c < zone.end(); ++c) {
        auto batch = center_line(lattice, zone, {false, c});
        if (!batch.empty()) out.push_back(std::move(batch));
    }
    return out;
}

std::vector<PhaseBatches> spread_and_squeeze(Lattice& lattice, const TargetZone& zone, int max_cycles) {
    if (max_cycles < 1) throw std::invalid_argument("spread-and-squeeze needs at least one cycle");
    if (!zone.fits(lattice)) throw std::invalid_argument("target zone does not fit the lattice");
    std::vector<PhaseBatches> out;
    for (int cycle = 0; cycle < max_cycles; ++cycle) {
        if (zone_full(lattice, zone)) break;
        std::size_t moved = 0;
        for (int r = 0; r < lattice.width(); ++r) {
            if (r >= zone.offset() && r < zone.end()) continue;
            auto batch = spread_line(lattice, zone, r);
            moved += batch.size();
            if (!batch.empty()) out.push_back({Phase::Spread, std::move(batch)});
        }
        for (auto& batch : center_columns(lattice, zone)) {
            moved += batch.size();
            out.push_back({Phase::Squeeze, std::move(batch)});
        }
        if (moved == 0) break;
    }
    return out;
}

std::vector<PhaseBatches> corner_moves(Lattice& lattice, const TargetZone& zone) {
    std::vector<PhaseBatches> out;
    const int delta = zone.offset();
    if (delta < 1 || !zone.fits(lattice) || zone.end() + delta > lattice.width()) return out;
    if (zone_full(lattice, zone)) return out;

    struct Block {
        int row0, col0, drow, dcol;
    };
    // top-left, top-right, bottom-left, bottom-right
    const Block blocks[4] = {
        {0, 0, delta, delta},
        {0, zone.end(), delta, -delta},
        {zone.end(), 0, -delta, delta},
        {zone.end(), zone.end(), -delta, -delta},
    };
    const std::vector<std::vector<int>> groups = {
        {0, 1, 2, 3}, {0, 1}, {2, 3}, {0, 2}, {1, 3}, {0}, {1}, {2}, {3},
    };
    bool done[4] = {false, false, false, false};

    for (const auto& group : groups) {
        if (std::any_of(group.begin(), group.end(), [&](int b) { return done[b]; })) continue;
        MoveBatch batch;
        bool blocked = false;
        for (int b : group) {
            const auto& blk = blocks[b];
            for (int r = blk.row0; r < blk.row0 + delta && !blocked; ++r) {
                for (int c = blk.col0; c < blk.col0 + delta; ++c) {
                    if (!lattice.occupied({r, c})) continue;
                    const Coord dest{r + blk.drow, c + blk.dcol};
                    if (lattice.occupied(dest)) {
                        blocked = true;
                        break;
                    }
                    batch.moves.push_back(Move::row_then_column({r, c}, dest));
                }
            }
        }
        if (blocked || batch.empty()) continue;
        if (!validate_batch(batch, lattice).empty()) continue;
        apply_moves_unchecked(lattice, batch.moves);
        for (int b : group) done[b] = true;
        out.push_back({Phase::Corner, std::move(batch)});
    }
    for (auto& batch : center_columns(lattice, zone)) out.push_back({Phase::Squeeze, std::move(batch)});
    return out;
}

std::vector<Coord> find_route(const Lattice& lattice, Coord source, Coord dest) {
    if (!lattice.contains(source) || !lattice.contains(dest) || source == dest) return {};
    if (lattice.occupied(dest)) return {};
    const int width = lattice.width();
    const auto sites = static_cast<std::size_t>(width) * static_cast<std::size_t>(width);
    // Cost = length * scale + turns; turns never exceed length < scale.
    const std::int64_t scale = static_cast<std::int64_t>(sites) + 1;
    constexpr int kDirs = 4;
    constexpr int dr[kDirs] = {-1, 0, 1, 0};
    constexpr int dc[kDirs] = {0, 1, 0, -1};
    constexpr std::int64_t kUnseen = INT64_MAX;

    // State = cell * 5 + arrival direction (4 = start, no direction yet).
    std::vector<std::int64_t> cost(sites * 5, kUnseen);
    std::vector<std::int64_t> parent(sites * 5, -1);
    using Entry = std::tuple<std::int64_t, std::int64_t, std::int64_t>;  // f, g, state
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

    auto heuristic = [&](Coord c) { return static_cast<std::int64_t>(manhattan(c, dest)) * scale; };
    const auto start = static_cast<std::int64_t>(lattice.index(source)) * 5 + 4;
    cost[static_cast<std::size_t>(start)] = 0;
    open.emplace(heuristic(source), 0, start);

    std::int64_t goal = -1;
    while (!open.empty()) {
        auto [f, g, state] = open.top();
        open.pop();
        if (g != cost[static_cast<std::size_t>(state)]) continue;
        const Coord here = lattice.coord(static_cast<std::size_t>(state / 5));
        const int arrived = static_cast<int>(state % 5);
        if (here == dest) {
            goal = state;
            break;
        }
        for (int d = 0; d < kDirs; ++d) {
            const Coord next{here.row + dr[d], here.col + dc[d]};
            if (!lattice.contains(next) || lattice.occupied(next)) continue;
            const std::int64_t step = scale + ((arrived != 4 && arrived != d) ? 1 : 0);
            const std::int64_t ng = g + step;
            const auto ns = static_cast<std::int64_t>(lattice.index(next)) * 5 + d;
            if (ng < cost[static_cast<std::size_t>(ns)]) {
                cost[static_cast<std::size_t>(ns)] = ng;
                parent[static_cast<std::size_t>(ns)] = state;
                open.emplace(ng + heuristic(next), ng, ns);
            }
        }
    }
    if (goal < 0) return {};
    std::vector<Coord> route;
    for (std::int64_t s = goal; s >= 0; s = parent[static_cast<std::size_t>(s)])
        route.push_back(lattice.coord(static_cast<std::size_t>(s / 5)));
    std::reverse(route.begin(), route.end());
    return route;
}

namespace {

bool clear_after_source(const Lattice& lattice, const Move& move) {
    const auto cells = move.cells();
    return std::none_of(cells.begin() + 1, cells.end(), [&](Coord c) { return lattice.occupied(c); });
}

// Outside-zone atoms that can step onto the empty region connected to `defect`.
std::vector<Coord> reachable_sources(const Lattice& lattice, const TargetZone& zone, Coord defect) {
    const int width = lattice.width();
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(width) * static_cast<std::size_t>(width), 0);
    std::vector<Coord> sources;
    std::deque<Coord> frontier{defect};
    seen[lattice.index(defect)] = 1;
    constexpr int dr[4] = {-1, 0, 1, 0};
    constexpr int dc[4] = {0, 1, 0, -1};
    while (!frontier.empty()) {
        const Coord here = frontier.front();
        frontier.pop_front();
        for (int d = 0; d < 4; ++d) {
            const Coord next{here.row + dr[d], here.col + dc[d]};
            if (!lattice.contains(next)) continue;
            auto& mark = seen[lattice.index(next)];
            if (mark) continue;
            mark = 1;
            if (lattice.occupied(next)) {
                if (!zone.contains(next)) sources.push_back(next);
            } else {
                frontier.push_back(next);
            }
        }
    }
    return sources;
}

Move route_move(const Lattice& lattice, Coord source, Coord dest) {
    if (source.row == dest.row || source.col == dest.col) {
        auto direct = Move::straight(source, dest);
        if (clear_after_source(lattice, direct)) return direct;
    } else {
        auto row_first = Move::row_then_column(source, dest);
        if (clear_after_source(lattice, row_first)) return row_first;
        auto col_first = Move::column_then_row(source, dest);
        if (clear_after_source(lattice, col_first)) return col_first;
    }
    const auto cells = find_route(lattice, source, dest);
    if (cells.empty())
        throw PlanConsistencyError("no route from " + to_string(source) + " to " + to_string(dest));
    return Move::from_cell_path(cells);
}

// Defect enclosed by atoms: pick the shortest straight ray from the defect
// that ends on an outside-zone atom and shift every atom on it one place
// along, into the defect. One batch; zone occupancy grows by exactly one.
std::optional<MoveBatch> shift_chain(const Lattice& lattice, const TargetZone& zone, Coord defect) {
    constexpr int dr[4] = {-1, 0, 1, 0};
    constexpr int dc[4] = {0, 1, 0, -1};
    std::optional<std::vector<Coord>> best;
    for (int d = 0; d < 4; ++d) {
        std::vector<Coord> atoms;
        for (Coord c{defect.row + dr[d], defect.col + dc[d]}; lattice.contains(c);
             c = {c.row + dr[d], c.col + dc[d]}) {
            if (!lattice.occupied(c)) continue;
            atoms.push_back(c);
            if (!zone.contains(c)) break;
        }
        if (atoms.empty() || zone.contains(atoms.back())) continue;
        if (!best || manhattan(atoms.back(), defect) < manhattan(best->back(), defect)) best = std::move(atoms);
    }
    if (!best) return std::nullopt;
    MoveBatch batch;
    Coord into = defect;
    for (const Coord atom : *best) {
        batch.moves.push_back(Move::straight(atom, into));
        into = atom;
    }
    return batch;
}

// No ray holds an outside atom: route one onto the first cell past the zone
// edge on the cheapest ray, so that shift_chain can finish the repair.
std::optional<Move> feed_ray(const Lattice& lattice, const TargetZone& zone, Coord defect) {
    constexpr int dr[4] = {-1, 0, 1, 0};
    constexpr int dc[4] = {0, 1, 0, -1};
    std::optional<std::pair<Coord, Coord>> best;  // source, landing cell
    int best_cost = 0;
    for (int d = 0; d < 4; ++d) {
        Coord landing = defect;
        while (zone.contains(landing)) landing = {landing.row + dr[d], landing.col + dc[d]};
        if (!lattice.contains(landing) || lattice.occupied(landing)) continue;
        const auto sources = reachable_sources(lattice, zone, landing);
        for (const Coord src : sources) {
            const int cost = manhattan(src, landing) + manhattan(landing, defect);
            if (!best || cost < best_cost || (cost == best_cost && std::pair(src, landing) < *best)) {
                best = std::pair(src, landing);
                best_cost = cost;
            }
        }
    }
    if (!best) return std::nullopt;
    return route_move(lattice, best->first, best->second);
}

}  // namespace

RepairResult repair_defects(Lattice& lattice, const TargetZone& zone) {
    if (!zone.fits(lattice)) throw std::invalid_argument("target zone does not fit the lattice");
    std::vector<Coord> defects;
    for (int r = zone.offset(); r < zone.end(); ++r)
        for (int c = zone.offset(); c < zone.end(); ++c)
            if (!lattice.occupied({r, c})) defects.push_back({r, c});

    auto depth = [&](Coord c) {
        return std::min({c.row - zone.offset(), zone.end() - 1 - c.row, c.col - zone.offset(),
                         zone.end() - 1 - c.col});
    };
    std::stable_sort(defects.begin(), defects.end(),
                     [&](Coord a, Coord b) { return depth(a) > depth(b); });

    RepairResult result;
    for (const Coord defect : defects) {
        auto sources = reachable_sources(lattice, zone, defect);
        if (sources.empty()) {
            auto chain = shift_chain(lattice, zone, defect);
            if (!chain) {
                if (auto feed = feed_ray(lattice, zone, defect)) {
                    MoveBatch batch;
                    batch.moves.push_back(std::move(*feed));
                    apply_moves_unchecked(lattice, batch.moves);
                    result.batches.push_back(std::move(batch));
                    chain = shift_chain(lattice, zone, defect);
                }
            }
            if (!chain) {
                result.unrepairable.push_back(defect);
                continue;
            }
            apply_moves_unchecked(lattice, chain->moves);
            result.batches.push_back(std::move(*chain));
            continue;
        }
        const Coord source = *std::min_element(sources.begin(), sources.end(), [&](Coord a, Coord b) {
            const int da = manhattan(a, defect);
            const int db = manhattan(b, defect);
            return da != db ? da < db : a < b;
        });
        MoveBatch batch;
        batch.moves.push_back(route_move(lattice, source, defect));
        apply_moves_unchecked(lattice, batch.moves);
        result.batches.push_back(std::move(batch));
    }
    return result;
}

Plan plan(const Lattice& lattice, const TargetZone& zone) {
    if (!zone.fits(lattice)) throw std::invalid_argument("target zone does not fit the lattice");
    Lattice virt = lattice;
    Plan out;
    out.zone = zone;
    auto done = [&] { return zone_full(virt, zone); };
    auto take = [&](Phase phase, std::vector<MoveBatch> batches) {
        for (auto& b : batches) out.append(phase, std::move(b));
    };
    auto take_tagged = [&](std::vector<PhaseBatches> batches) {
        for (auto& b : batches) out.append(b.phase, std::move(b.batch));
    };

    if (!done()) take(Phase::CenteringRow, center_rows(virt, zone));
    if (!done()) take(Phase::CenteringCol, center_columns(virt, zone));
    if (!done()) take_tagged(spread_and_squeeze(virt, zone, 4));
    if (!done()) take_tagged(corner_moves(virt, zone));
    if (!done()) take_tagged(spread_and_squeeze(virt, zone, 3));
    if (!done()) {
        auto repair = repair_defects(virt, zone);
        take(Phase::Repair, std::move(repair.batches));
        out.unrepairable = std::move(repair.unrepairable);
    }
    return out;
}

}  // namespace rearrange
