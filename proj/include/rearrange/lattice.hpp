#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rearrange/rng.hpp"

namespace rearrange {

/// Raised when a plan cannot be replayed as written (an occupied destination,
/// an empty source, or a batch that breaks the transport rules). Always a bug
/// in whatever produced the plan.
class PlanConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct Coord {
    int row = 0;
    int col = 0;

    friend bool operator==(const Coord&, const Coord&) = default;
    friend auto operator<=>(const Coord&, const Coord&) = default;
};

int manhattan(Coord a, Coord b);
std::string to_string(Coord c);

/// Square occupancy grid. `true` marks a trapped atom.
class Lattice {
public:
    Lattice() = default;
    explicit Lattice(int width);

    static Lattice from_rows(const std::vector<std::string>& rows);

    int width() const { return width_; }
    int atom_count() const { return count_; }

    bool contains(Coord c) const {
        return c.row >= 0 && c.col >= 0 && c.row < width_ && c.col < width_;
    }
    bool occupied(Coord c) const { return cells_[index(c)] != 0; }
    void set(Coord c, bool value);

    std::size_t index(Coord c) const {
        return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(c.col);
    }
    Coord coord(std::size_t index) const {
        return {static_cast<int>(index / static_cast<std::size_t>(width_)),
                static_cast<int>(index % static_cast<std::size_t>(width_))};
    }

    std::span<const std::uint8_t> cells() const { return cells_; }

    friend bool operator==(const Lattice& a, const Lattice& b) {
        return a.width_ == b.width_ && a.cells_ == b.cells_;
    }

private:
    int width_ = 0;
    int count_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// Centered L x L block that must end up defect-free.
class TargetZone {
public:
    TargetZone() = default;
    TargetZone(int offset, int side);

    /// Centers a block of the given side in a width x width field.
    static TargetZone centered(int width, int side);

    int offset() const { return offset_; }
    int side() const { return side_; }
    int site_count() const { return side_ * side_; }
    int end() const { return offset_ + side_; }

    bool contains(Coord c) const {
        return c.row >= offset_ && c.row < end() && c.col >= offset_ && c.col < end();
    }
    bool fits(const Lattice& lattice) const { return end() <= lattice.width(); }

    /// Number of zone rows (or columns) in the upper (left) half; the middle
    /// line of an odd side belongs to this half.
    int near_half() const { return (side_ + 1) / 2; }

    friend bool operator==(const TargetZone&, const TargetZone&) = default;

private:
    int offset_ = 0;
    int side_ = 0;
};

/// Atoms inside the zone.
int zone_atom_count(const Lattice& lattice, const TargetZone& zone);

/// Axis-aligned leg of a transport. `from` and `to` share a row or a column.
struct Segment {
    Coord from;
    Coord to;

    int length() const { return manhattan(from, to); }
    bool horizontal() const { return from.row == to.row; }

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// One atom transport along a chain of axis-aligned segments.
class Move {
public:
    /// Builds a move through the given corner points. Consecutive points must
    /// share a row or column; at least two points are required.
    static Move through(std::span<const Coord> waypoints);
    static Move straight(Coord source, Coord dest);
    /// Horizontal leg first, then vertical.
    static Move row_then_column(Coord source, Coord dest);
    static Move column_then_row(Coord source, Coord dest);
    /// Collapses a 4-connected cell path into maximal straight segments.
    static Move from_cell_path(std::span<const Coord> cells);

    Coord source() const { return segments_.front().from; }
    Coord dest() const { return segments_.back().to; }
    const std::vector<Segment>& segments() const { return segments_; }
    int segment_count() const { return static_cast<int>(segments_.size()); }
    int length() const;

    /// Every cell the atom visits, source first and destination last.
    std::vector<Coord> cells() const;

    friend bool operator==(const Move&, const Move&) = default;

private:
    explicit Move(std::vector<Segment> segments);
    std::vector<Segment> segments_;
};

struct MoveBatch {
    std::vector<Move> moves;

    bool empty() const { return moves.empty(); }
    std::size_t size() const { return moves.size(); }
    int max_length() const;

    friend bool operator==(const MoveBatch&, const MoveBatch&) = default;
};

/// Fills each site independently with probability `p_occ`, drawing one
/// uniform variate per site in row-major order.
Lattice load_random(int width, double p_occ, RngStream& rng);

/// Moves every atom of the batch without loss. Throws PlanConsistencyError if
/// a source is empty, a destination is taken, or the batch breaks a transport
/// rule.
Lattice apply_batch_lossless(const Lattice& lattice, const MoveBatch& batch);

/// Same as apply_batch_lossless but in place and without running the rule
/// validator; endpoints are still checked.
void apply_moves_unchecked(Lattice& lattice, std::span<const Move> moves);

}  // namespace rearrange
