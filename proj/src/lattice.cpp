#include "rearrange/lattice.hpp"

#include <algorithm>
#include <cstdlib>

#include "rearrange/parallelizer.hpp"

namespace rearrange {

int manhattan(Coord a, Coord b) { return std::abs(a.row - b.row) + std::abs(a.col - b.col); }

std::string to_string(Coord c) {
    return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

Lattice::Lattice(int width) : width_(width) {
    if (width < 1) throw std::invalid_argument("lattice width must be at least 1");
    cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(width), 0);
}

Lattice Lattice::from_rows(const std::vector<std::string>& rows) {
    Lattice lattice(static_cast<int>(rows.size()));
    for (int r = 0; r < lattice.width(); ++r) {
        const auto& line = rows[static_cast<std::size_t>(r)];
        if (static_cast<int>(line.size()) != lattice.width())
            throw std::invalid_argument("row " + std::to_string(r) + " has " +
                                        std::to_string(line.size()) + " sites, expected " +
                                        std::to_string(lattice.width()));
        for (int c = 0; c < lattice.width(); ++c) {
            const char ch = line[static_cast<std::size_t>(c)];
            if (ch != '0' && ch != '1')
                throw std::invalid_argument(std::string("unexpected site character '") + ch + "'");
            lattice.set({r, c}, ch == '1');
        }
    }
    return lattice;
}

void Lattice::set(Coord c, bool value) {
    auto& cell = cells_[index(c)];
    count_ += static_cast<int>(value) - static_cast<int>(cell);
    cell = value ? 1 : 0;
}

TargetZone::TargetZone(int offset, int side) : offset_(offset), side_(side) {
    if (side < 1) throw std::invalid_argument("target side must be at least 1");
    if (offset < 0) throw std::invalid_argument("target offset must be non-negative");
}

TargetZone TargetZone::centered(int width, int side) {
    if (side < 1 || side > width)
        throw std::invalid_argument("target side " + std::to_string(side) +
                                    " does not fit a lattice of width " + std::to_string(width));
    return TargetZone((width - side) / 2, side);
}

int zone_atom_count(const Lattice& lattice, const TargetZone& zone) {
    int count = 0;
    for (int r = zone.offset(); r < zone.end(); ++r)
        for (int c = zone.offset(); c < zone.end(); ++c) count += lattice.occupied({r, c});
    return count;
}

Move::Move(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw std::invalid_argument("a move needs at least one segment");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (s.from.row != s.to.row && s.from.col != s.to.col)
            throw std::invalid_argument("segment " + to_string(s.from) + "->" + to_string(s.to) +
                                        " is not axis-aligned");
        if (s.from == s.to) throw std::invalid_argument("zero-length segment at " + to_string(s.from));
        if (i > 0 && segments_[i - 1].to != s.from)
            throw std::invalid_argument("segments are not contiguous");
    }
}

Move Move::through(std::span<const Coord> waypoints) {
    if (waypoints.size() < 2) throw std::invalid_argument("a move needs a source and a destination");
    std::vector<Segment> segments;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        if (waypoints[i] == waypoints[i - 1]) continue;
        segments.push_back({waypoints[i - 1], waypoints[i]});
    }
    return Move(std::move(segments));
}

Move Move::straight(Coord source, Coord dest) { return Move({Segment{source, dest}}); }

Move Move::row_then_column(Coord source, Coord dest) {
    const Coord corner{source.row, dest.col};
    const Coord points[] = {source, corner, dest};
    return through(points);
}

Move Move::column_then_row(Coord source, Coord dest) {
    const Coord corner{dest.row, source.col};
    const Coord points[] = {source, corner, dest};
    return through(points);
}

Move Move::from_cell_path(std::span<const Coord> cells) {
    if (cells.size() < 2) throw std::invalid_argument("a cell path needs at least two cells");
    std::vector<Coord> corners{cells.front()};
    for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
        const bool before = cells[i - 1].row == cells[i].row;
        const bool after = cells[i].row == cells[i + 1].row;
        if (before != after) corners.push_back(cells[i]);
    }
    corners.push_back(cells.back());
    for (std::size_t i = 1; i < cells.size(); ++i)
        if (manhattan(cells[i - 1], cells[i]) != 1)
            throw std::invalid_argument("cell path is not 4-connected at " + to_string(cells[i]));
    return through(corners);
}

int Move::length() const {
    int total = 0;
    for (const auto& s : segments_) total += s.length();
    return total;
}

std::vector<Coord> Move::cells() const {
    std::vector<Coord> out{source()};
    out.reserve(static_cast<std::size_t>(length()) + 1);
    for (const auto& s : segments_) {
        const int dr = (s.to.row > s.from.row) - (s.to.row < s.from.row);
        const int dc = (s.to.col > s.from.col) - (s.to.col < s.from.col);
        Coord at = s.from;
        while (at != s.to) {
            at.row += dr;
            at.col += dc;
            out.push_back(at);
        }
    }
    return out;
}

int MoveBatch::max_length() const {
    int best = 0;
    for (const auto& m : moves) best = std::max(best, m.length());
    return best;
}

Lattice load_random(int width, double p_occ, RngStream& rng) {
    if (!(p_occ >= 0.0 && p_occ <= 1.0))
        throw std::invalid_argument("occupation probability must lie in [0, 1]");
    Lattice lattice(width);
    for (int r = 0; r < width; ++r)
        for (int c = 0; c < width; ++c)
            if (rng.bernoulli(p_occ)) lattice.set({r, c}, true);
    return lattice;
}

void apply_moves_unchecked(Lattice& lattice, std::span<const Move> moves) {
    for (const auto& m : moves) {
        if (!lattice.contains(m.source()) || !lattice.contains(m.dest()))
            throw PlanConsistencyError("move " + to_string(m.source()) + "->" + to_string(m.dest()) +
                                       " leaves the lattice");
        if (!lattice.occupied(m.source()))
            throw PlanConsistencyError("source " + to_string(m.source()) + " is empty");
    }
    for (const auto& m : moves) lattice.set(m.source(), false);
    for (const auto& m : moves) {
        if (lattice.occupied(m.dest()))
            throw PlanConsistencyError("destination " + to_string(m.dest()) + " is occupied");
        lattice.set(m.dest(), true);
    }
}

Lattice apply_batch_lossless(const Lattice& lattice, const MoveBatch& batch) {
    const auto violations = validate_batch(batch, lattice);
    if (!violations.empty()) throw PlanConsistencyError(describe(violations.front()));
    Lattice next = lattice;
    apply_moves_unchecked(next, batch.moves);
    return next;
}

}  // namespace rearrange
