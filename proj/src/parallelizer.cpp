#include "rearrange/parallelizer.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace rearrange {

namespace {

int sign(int v) { return (v > 0) - (v < 0); }

std::uint64_t key(Coord c) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.row)) << 32) |
           static_cast<std::uint32_t>(c.col);
}

struct Box {
    int r0, r1, c0, c1;
    bool overlaps(const Box& o) const {
        return r0 <= o.r1 && o.r0 <= r1 && c0 <= o.c1 && o.c0 <= c1;
    }
};

Box bounds(const Move& m) {
    Box b{m.source().row, m.source().row, m.source().col, m.source().col};
    for (const auto& s : m.segments()) {
        b.r0 = std::min(b.r0, s.to.row);
        b.r1 = std::max(b.r1, s.to.row);
        b.c0 = std::min(b.c0, s.to.col);
        b.c1 = std::max(b.c1, s.to.col);
    }
    return b;
}

// Atom positions by tick: cells[t] for t < n, the destination afterwards.
// Co-occupancy is an overlap of the tick intervals during which both atoms
// hold the same cell; a swap is an exchange of cells across one tick.
bool collide_cells(const std::vector<Coord>& a, const std::vector<Coord>& b) {
    const std::size_t na = a.size() - 1;
    const std::size_t nb = b.size() - 1;
    std::unordered_multimap<std::uint64_t, std::size_t> ticks_a;
    ticks_a.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) ticks_a.emplace(key(a[i]), i);

    constexpr std::size_t kForever = static_cast<std::size_t>(-1);
    for (std::size_t j = 0; j < b.size(); ++j) {
        const std::size_t b_from = j;
        const std::size_t b_to = j == nb ? kForever : j;
        auto [lo, hi] = ticks_a.equal_range(key(b[j]));
        for (auto it = lo; it != hi; ++it) {
            const std::size_t a_from = it->second;
            const std::size_t a_to = a_from == na ? kForever : a_from;
            if (a_from <= b_to && b_from <= a_to) return true;
        }
    }
    const std::size_t steps = std::min(na, nb);
    for (std::size_t t = 0; t < steps; ++t)
        if (a[t] == b[t + 1] && a[t + 1] == b[t]) return true;
    return false;
}

// Per-batch bookkeeping shared by the validator and the compressor.
struct LineUse {
    std::vector<int> rows;
    std::vector<int> cols;

    explicit LineUse(int width) : rows(static_cast<std::size_t>(width), 0), cols(rows) {}
    void add(const Move& m, int delta) {
        rows[static_cast<std::size_t>(m.source().row)] += delta;
        cols[static_cast<std::size_t>(m.source().col)] += delta;
    }
    bool row(int r) const { return rows[static_cast<std::size_t>(r)] > 0; }
    bool col(int c) const { return cols[static_cast<std::size_t>(c)] > 0; }
    // Active because of some move other than `self`.
    bool row_besides(int r, const Move& self) const {
        return rows[static_cast<std::size_t>(r)] - (self.source().row == r ? 1 : 0) > 0;
    }
    bool col_besides(int c, const Move& self) const {
        return cols[static_cast<std::size_t>(c)] - (self.source().col == c ? 1 : 0) > 0;
    }
};

// First static cell a segment of `self` sweeps past on a line activated by
// another move, if any.
template <typename IsStatic>
std::optional<Coord> sweep_conflict(const Move& self, const Segment& s, const LineUse& lines, int width,
                                    IsStatic&& is_static) {
    if (s.horizontal()) {
        const int lo = std::min(s.from.col, s.to.col) + 1;
        const int hi = std::max(s.from.col, s.to.col) - 1;
        if (lo > hi) return std::nullopt;
        for (int r = 0; r < width; ++r) {
            if (r == s.from.row || !lines.row_besides(r, self)) continue;
            for (int c = lo; c <= hi; ++c)
                if (is_static(Coord{r, c})) return Coord{r, c};
        }
    } else {
        const int lo = std::min(s.from.row, s.to.row) + 1;
        const int hi = std::max(s.from.row, s.to.row) - 1;
        if (lo > hi) return std::nullopt;
        for (int c = 0; c < width; ++c) {
            if (c == s.from.col || !lines.col_besides(c, self)) continue;
            for (int r = lo; r <= hi; ++r)
                if (is_static(Coord{r, c})) return Coord{r, c};
        }
    }
    return std::nullopt;
}

// Would a static atom at `cell` be swept past by any segment of `moves`
// (rule 2, with `cell` on an active line)?
bool exposes_static(std::span<const Move> moves, const LineUse& lines, Coord cell) {
    if (!lines.row(cell.row) && !lines.col(cell.col)) return false;
    for (const auto& m : moves) {
        const bool row_active = lines.row_besides(cell.row, m);
        const bool col_active = lines.col_besides(cell.col, m);
        for (const auto& s : m.segments()) {
            if (s.horizontal()) {
                if (!row_active || s.from.row == cell.row) continue;
                if (cell.col > std::min(s.from.col, s.to.col) && cell.col < std::max(s.from.col, s.to.col))
                    return true;
            } else {
                if (!col_active || s.from.col == cell.col) continue;
                if (cell.row > std::min(s.from.row, s.to.row) && cell.row < std::max(s.from.row, s.to.row))
                    return true;
            }
        }
    }
    return false;
}

}  // namespace

std::string describe(const RuleViolation& violation) {
    std::string text = "rule " + std::to_string(violation.rule) + ": moves [";
    for (std::size_t i = 0; i < violation.moves.size(); ++i) {
        if (i) text += ",";
        text += std::to_string(violation.moves[i]);
    }
    return text + "]: " + violation.detail;
}

bool paths_collide(const Move& a, const Move& b) {
    if (!bounds(a).overlaps(bounds(b))) return false;
    return collide_cells(a.cells(), b.cells());
}

std::vector<int> order_violations(const Move& a, const Move& b) {
    const bool col_kept = sign(a.source().col - b.source().col) == sign(a.dest().col - b.dest().col);
    const bool row_kept = sign(a.source().row - b.source().row) == sign(a.dest().row - b.dest().row);
    bool within = false;
    bool across = false;
    if (a.source().row == b.source().row) {
        within = !col_kept;
        across = !row_kept;
    } else if (a.source().col == b.source().col) {
        within = !row_kept;
        across = !col_kept;
    } else {
        across = !col_kept || !row_kept;
    }
    std::vector<int> rules;
    if (within) rules.push_back(5);
    if (across) rules.push_back(6);
    return rules;
}

std::vector<RuleViolation> validate_batch(const MoveBatch& batch, const Lattice& before) {
    std::vector<RuleViolation> out;
    const auto& moves = batch.moves;
    const std::size_t n = moves.size();
    if (n == 0) return out;

    std::vector<std::vector<Coord>> cells(n);
    for (std::size_t i = 0; i < n; ++i) {
        cells[i] = moves[i].cells();
        for (const auto& c : cells[i]) {
            if (!before.contains(c)) {
                out.push_back({3, {i}, "path leaves the lattice at " + to_string(c)});
                break;
            }
        }
    }
    if (!out.empty()) return out;

    std::unordered_map<std::size_t, std::size_t> source_of;
    std::unordered_map<std::size_t, std::size_t> dest_of;
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = before.index(moves[i].source());
        if (!before.occupied(moves[i].source()))
            out.push_back({3, {i}, "source " + to_string(moves[i].source()) + " is empty"});
        if (auto [it, fresh] = source_of.emplace(src, i); !fresh)
            out.push_back({3, {it->second, i}, "shared source " + to_string(moves[i].source())});
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto dst = before.index(moves[i].dest());
        if (auto [it, fresh] = dest_of.emplace(dst, i); !fresh)
            out.push_back({3, {it->second, i}, "shared destination " + to_string(moves[i].dest())});
    }

    auto is_static = [&](Coord c) {
        return before.occupied(c) && !source_of.contains(before.index(c));
    };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 1; k < cells[i].size(); ++k) {
            if (is_static(cells[i][k])) {
                out.push_back({1, {i}, "path meets static atom at " + to_string(cells[i][k])});
                break;
            }
        }
    }

    LineUse lines(before.width());
    for (const auto& m : moves) lines.add(m, 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& s : moves[i].segments()) {
            if (auto hit = sweep_conflict(moves[i], s, lines, before.width(), is_static)) {
                out.push_back({2, {i}, "sweeps past static atom at " + to_string(*hit) +
                                           " on an active line"});
                break;
            }
        }
    }

    std::vector<Box> boxes(n);
    for (std::size_t i = 0; i < n; ++i) boxes[i] = bounds(moves[i]);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (boxes[i].overlaps(boxes[j]) && collide_cells(cells[i], cells[j]))
                out.push_back({4, {i, j}, "paths intersect"});
            for (int rule : order_violations(moves[i], moves[j]))
                out.push_back({rule, {i, j},
                               rule == 5 ? "order within a shared line flips"
                                         : "relative order across lines is not preserved"});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RuleViolation& a, const RuleViolation& b) { return a.rule < b.rule; });
    return out;
}

namespace {

struct BatchSlot {
    MoveBatch batch;
    Phase phase;
    LineUse lines;
    std::unordered_set<std::size_t> sources;
    bool alive = true;
};

class Compressor {
public:
    Compressor(const Plan& plan, const Lattice& initial) : initial_(initial), width_(initial.width()) {
        for (std::size_t i = 0; i < plan.batches.size(); ++i) {
            BatchSlot slot{plan.batches[i], plan.phases[i], LineUse(width_), {}, true};
            for (const auto& m : slot.batch.moves) {
                slot.lines.add(m, 1);
                slot.sources.insert(initial_.index(m.source()));
            }
            slots_.push_back(std::move(slot));
        }
    }

    /// One greedy pass in plan order. Returns the number of merged moves.
    std::size_t pass() {
        rebuild();
        std::size_t merged = 0;
        for (std::size_t j = 1; j < slots_.size(); ++j) {
            std::size_t k = 0;
            while (k < slots_[j].batch.moves.size()) {
                if (try_pull(j, k)) {
                    ++merged;
                } else {
                    ++k;
                }
            }
        }
        std::erase_if(slots_, [](const BatchSlot& s) { return s.batch.empty(); });
        return merged;
    }

    Plan result(const TargetZone& zone, std::vector<Coord> unrepairable) const {
        Plan out;
        out.zone = zone;
        out.unrepairable = std::move(unrepairable);
        for (const auto& s : slots_) out.append(s.phase, s.batch);
        return out;
    }

private:
    void rebuild() {
        states_.clear();
        states_.reserve(slots_.size());
        Lattice state = initial_;
        touch_.assign(static_cast<std::size_t>(width_) * static_cast<std::size_t>(width_), {});
        for (std::size_t b = 0; b < slots_.size(); ++b) {
            states_.push_back(state);
            for (const auto& m : slots_[b].batch.moves)
                for (const auto& c : m.cells()) touch_[state.index(c)].push_back(static_cast<int>(b));
            apply_moves_unchecked(state, slots_[b].batch.moves);
        }
    }

    int last_touch_before(Coord cell, std::size_t j) const {
        int best = -1;
        for (int b : touch_[initial_.index(cell)])
            if (b < static_cast<int>(j)) best = std::max(best, b);
        return best;
    }

    bool touched_by_other(Coord cell, std::size_t j, std::size_t own) const {
        std::size_t hits = 0;
        for (int b : touch_[initial_.index(cell)])
            if (b == static_cast<int>(j)) ++hits;
        return hits > own;
    }

    bool can_join(const BatchSlot& slot, const Move& m, const Lattice& before) const {
        const auto src = before.index(m.source());
        const auto dst = before.index(m.dest());
        if (!before.occupied(m.source()) || before.occupied(m.dest())) return false;
        if (slot.sources.contains(dst) || slot.sources.contains(src)) return false;
        for (const auto& other : slot.batch.moves)
            if (other.dest() == m.dest() || other.dest() == m.source()) return false;

        for (const auto& other : slot.batch.moves)
            if (!order_violations(m, other).empty()) return false;

        const auto mine = m.cells();
        const Box box = bounds(m);
        for (const auto& other : slot.batch.moves)
            if (box.overlaps(bounds(other)) && collide_cells(mine, other.cells())) return false;

        auto is_static = [&](Coord c) {
            return before.occupied(c) && c != m.source() && !slot.sources.contains(before.index(c));
        };
        for (std::size_t k = 1; k < mine.size(); ++k)
            if (is_static(mine[k])) return false;

        LineUse lines = slot.lines;
        lines.add(m, 1);
        for (const auto& s : m.segments())
            if (sweep_conflict(m, s, lines, width_, is_static)) return false;

        // Lines of m that become newly active for the moves already present.
        for (const auto& other : slot.batch.moves) {
            const bool new_row = !slot.lines.row_besides(m.source().row, other);
            const bool new_col = !slot.lines.col_besides(m.source().col, other);
            if (!new_row && !new_col) continue;
            {
                for (const auto& s : other.segments()) {
                    if (s.horizontal() && new_row && s.from.row != m.source().row) {
                        const int lo = std::min(s.from.col, s.to.col) + 1;
                        const int hi = std::max(s.from.col, s.to.col) - 1;
                        for (int c = lo; c <= hi; ++c)
                            if (is_static({m.source().row, c})) return false;
                    }
                    if (!s.horizontal() && new_col && s.from.col != m.source().col) {
                        const int lo = std::min(s.from.row, s.to.row) + 1;
                        const int hi = std::max(s.from.row, s.to.row) - 1;
                        for (int r = lo; r <= hi; ++r)
                            if (is_static({r, m.source().col})) return false;
                    }
                }
            }
        }
        return true;
    }

    bool try_pull(std::size_t j, std::size_t k) {
        const Move m = slots_[j].batch.moves[k];
        const Coord src = m.source();
        const Coord dst = m.dest();

        // The rest of batch j must tolerate an atom already resting on dst.
        if (touched_by_other(dst, j, 1)) return false;
        {
            std::vector<Move> rest;
            rest.reserve(slots_[j].batch.size() - 1);
            for (std::size_t q = 0; q < slots_[j].batch.size(); ++q)
                if (q != k) rest.push_back(slots_[j].batch.moves[q]);
            LineUse lines = slots_[j].lines;
            lines.add(m, -1);
            if (exposes_static(rest, lines, dst)) return false;
        }

        // Earliest batch the move may join: no batch strictly between it and j
        // may touch either endpoint or sweep past the relocated atom.
        int lowest = std::max(last_touch_before(src, j), last_touch_before(dst, j));
        for (int x = static_cast<int>(j) - 1; x > lowest; --x) {
            if (exposes_static(slots_[static_cast<std::size_t>(x)].batch.moves,
                               slots_[static_cast<std::size_t>(x)].lines, dst)) {
                lowest = x;
                break;
            }
        }
        const std::size_t first = static_cast<std::size_t>(std::max(lowest, 0));
        for (std::size_t i = first; i < j; ++i) {
            if (!can_join(slots_[i], m, states_[i])) continue;
            move_between(j, k, i);
            return true;
        }
        return false;
    }

    void move_between(std::size_t j, std::size_t k, std::size_t i) {
        const Move m = slots_[j].batch.moves[k];
        auto& from = slots_[j];
        auto& to = slots_[i];
        from.batch.moves.erase(from.batch.moves.begin() + static_cast<std::ptrdiff_t>(k));
        from.lines.add(m, -1);
        from.sources.erase(initial_.index(m.source()));
        to.batch.moves.push_back(m);
        to.lines.add(m, 1);
        to.sources.insert(initial_.index(m.source()));
        for (std::size_t s = i + 1; s <= j; ++s) {
            states_[s].set(m.source(), false);
            states_[s].set(m.dest(), true);
        }
        for (const auto& c : m.cells()) {
            auto& list = touch_[initial_.index(c)];
            auto it = std::find(list.begin(), list.end(), static_cast<int>(j));
            if (it != list.end()) *it = static_cast<int>(i);
        }
    }

    Lattice initial_;
    int width_;
    std::vector<BatchSlot> slots_;
    std::vector<Lattice> states_;
    std::vector<std::vector<int>> touch_;
};

}  // namespace

Plan compress(const Plan& plan, const Lattice& initial) {
    if (plan.batches.size() != plan.phases.size())
        throw PlanConsistencyError("plan has mismatched batch and phase lists");
    const Lattice expected = replay_lossless(plan, initial);
    Compressor compressor(plan, initial);
    while (compressor.pass() > 0) {
    }
    Plan out = compressor.result(plan.zone, plan.unrepairable);
    if (replay_lossless(out, initial) != expected)
        throw PlanConsistencyError("compressed plan does not reproduce the original end state");
    return out;
}

}  // namespace rearrange
