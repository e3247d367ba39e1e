#include <doctest.h>

#include <deque>
#include <vector>

#include "rearrange/parallelizer.hpp"
#include "rearrange/planner.hpp"

using namespace rearrange;

namespace {

// Lattice with a single populated row `bits` at row `row`.
Lattice with_row(int width, int row, const std::string& bits) {
    Lattice lattice(width);
    for (int c = 0; c < width; ++c) lattice.set({row, c}, bits[static_cast<std::size_t>(c)] == '1');
    return lattice;
}

Lattice transpose(const Lattice& in) {
    Lattice out(in.width());
    for (int r = 0; r < in.width(); ++r)
        for (int c = 0; c < in.width(); ++c) out.set({c, r}, in.occupied({r, c}));
    return out;
}

void check_every_batch_valid(const Plan& p, Lattice state) {
    for (std::size_t b = 0; b < p.batches.size(); ++b) {
        const auto violations = validate_batch(p.batches[b], state);
        INFO("batch ", b, " phase ", to_string(p.phases[b]));
        REQUIRE(violations.empty());
        const int before = zone_atom_count(state, p.zone);
        apply_moves_unchecked(state, p.batches[b].moves);
        CHECK(zone_atom_count(state, p.zone) >= before);
    }
}

// Plain breadth-first shortest path length over empty sites.
int bfs_distance(const Lattice& lattice, Coord from, Coord to) {
    std::vector<int> dist(static_cast<std::size_t>(lattice.width() * lattice.width()), -1);
    std::deque<Coord> queue{from};
    dist[lattice.index(from)] = 0;
    while (!queue.empty()) {
        const Coord c = queue.front();
        queue.pop_front();
        if (c == to) return dist[lattice.index(c)];
        for (Coord n : {Coord{c.row - 1, c.col}, Coord{c.row + 1, c.col}, Coord{c.row, c.col - 1},
                        Coord{c.row, c.col + 1}}) {
            if (!lattice.contains(n) || lattice.occupied(n) || dist[lattice.index(n)] >= 0) continue;
            dist[lattice.index(n)] = dist[lattice.index(c)] + 1;
            queue.push_back(n);
        }
    }
    return -1;
}

}  // namespace

TEST_CASE("size_target arithmetic") {
    auto z = size_target(450, 30, 0.0);
    CHECK(z.side() == 20);
    CHECK(z.offset() == 5);
    z = size_target(450, 30, 0.05);
    CHECK(z.side() == 19);
    CHECK(z.offset() == 5);
    CHECK_THROWS_AS(size_target(1, 10, 0.0), InfeasibleTarget);
    CHECK_THROWS_AS(size_target(0, 10, 0.0), InfeasibleTarget);
    CHECK_THROWS_AS(size_target(100, 10, 1.0), std::invalid_argument);
    SizingParams bad;
    bad.safety = 1.5;
    CHECK_THROWS_AS(size_target(100, 10, 0.0, bad), std::invalid_argument);
}

TEST_CASE("center_rows on a five-site row") {
    const TargetZone zone(1, 3);
    Lattice lattice = with_row(5, 1, "10101");
    const auto batches = center_rows(lattice, zone);
    REQUIRE(batches.size() == 1);
    REQUIRE(batches[0].size() == 2);
    CHECK(batches[0].moves[0] == Move::straight({1, 0}, {1, 1}));
    CHECK(batches[0].moves[1] == Move::straight({1, 4}, {1, 3}));
    CHECK(lattice == with_row(5, 1, "01110"));

    Lattice full = with_row(5, 1, "01110");
    CHECK(center_rows(full, zone).empty());

    Lattice lonely = with_row(5, 1, "00100");
    CHECK(center_rows(lonely, zone).empty());
    CHECK(lonely == with_row(5, 1, "00100"));
}

TEST_CASE("center_columns is the transpose of center_rows") {
    const TargetZone zone(1, 3);
    for (const char* bits : {"10101", "01110", "00100", "11001", "00011"}) {
        Lattice rows = with_row(5, 2, bits);
        Lattice cols = transpose(rows);
        const auto rb = center_rows(rows, zone);
        const auto cb = center_columns(cols, zone);
        CHECK(transpose(rows) == cols);
        REQUIRE(rb.size() == cb.size());
        for (std::size_t b = 0; b < rb.size(); ++b) {
            REQUIRE(rb[b].size() == cb[b].size());
            for (std::size_t m = 0; m < rb[b].size(); ++m) {
                const auto& r = rb[b].moves[m];
                const auto& c = cb[b].moves[m];
                CHECK(c.source() == Coord{r.source().col, r.source().row});
                CHECK(c.dest() == Coord{r.dest().col, r.dest().row});
            }
        }
    }
}

TEST_CASE("center split puts the middle line in the left half") {
    const TargetZone zone(1, 3);
    // Only a right-side source: the middle defect must not take it.
    Lattice lattice = with_row(5, 1, "00001");
    const auto batches = center_rows(lattice, zone);
    REQUIRE(batches.size() == 1);
    REQUIRE(batches[0].size() == 1);
    CHECK(batches[0].moves[0].dest() == Coord{1, 3});
}

TEST_CASE("spread_and_squeeze") {
    SUBCASE("nothing outside the band") {
        Lattice lattice(5);
        lattice.set({2, 2}, true);
        CHECK(spread_and_squeeze(lattice, TargetZone(1, 3)).empty());
    }
    SUBCASE("an atom above the band is slid and squeezed in") {
        // L = 3, delta = 1; atom at (0, 2) in the left half of the span and
        // a defect at the top of column 1.
        Lattice lattice = Lattice::from_rows({"00100", "00110", "01110", "01110", "00000"});
        const TargetZone zone(1, 3);
        const auto out = spread_and_squeeze(lattice, zone, 4);
        REQUIRE(out.size() >= 2);
        CHECK(out[0].phase == Phase::Spread);
        CHECK(out[0].batch.moves[0] == Move::straight({0, 2}, {0, 1}));
        CHECK(out[1].phase == Phase::Squeeze);
        CHECK(zone_atom_count(lattice, zone) == 9);
    }
    SUBCASE("stops after a cycle without moves") {
        // Hole at the zone's lower-right corner; every column already packed.
        Lattice lattice = Lattice::from_rows({"00000", "01110", "01110", "01100", "00000"});
        CHECK(spread_and_squeeze(lattice, TargetZone(1, 3), 4).empty());
    }
    CHECK_THROWS_AS(
        [] {
            Lattice l(5);
            spread_and_squeeze(l, TargetZone(1, 3), 0);
        }(),
        std::invalid_argument);
}

TEST_CASE("corner_moves") {
    SUBCASE("empty corners") {
        Lattice lattice(8);
        lattice.set({3, 3}, true);
        CHECK(corner_moves(lattice, TargetZone(2, 4)).empty());
    }
    SUBCASE("single atom in the top-left block") {
        Lattice lattice(8);
        lattice.set({0, 0}, true);
        const auto out = corner_moves(lattice, TargetZone(2, 4));
        REQUIRE_FALSE(out.empty());
        CHECK(out[0].phase == Phase::Corner);
        REQUIRE(out[0].batch.size() == 1);
        const auto& m = out[0].batch.moves[0];
        CHECK(m.source() == Coord{0, 0});
        CHECK(m.dest() == Coord{2, 2});
        CHECK(m.segment_count() == 2);
        CHECK(m.segments()[0].horizontal());
    }
    SUBCASE("a blocked destination falls back to smaller groups") {
        // Top-left atom's landing site (2,2) is taken; bottom-right can still go.
        Lattice lattice(8);
        lattice.set({0, 0}, true);
        lattice.set({2, 2}, true);
        lattice.set({7, 7}, true);
        const auto out = corner_moves(lattice, TargetZone(2, 4));
        REQUIRE_FALSE(out.empty());
        CHECK(out[0].phase == Phase::Corner);
        REQUIRE(out[0].batch.size() == 1);
        CHECK(out[0].batch.moves[0].source() == Coord{7, 7});
        CHECK(out[0].batch.moves[0].dest() == Coord{5, 5});
        CHECK(lattice.occupied({0, 0}));
    }
}

TEST_CASE("repair_defects") {
    SUBCASE("no defects") {
        Lattice lattice = Lattice::from_rows({"000", "010", "000"});
        const auto out = repair_defects(lattice, TargetZone(1, 1));
        CHECK(out.batches.empty());
        CHECK(out.unrepairable.empty());
    }
    SUBCASE("corner defect filled straight from two sites left") {
        Lattice lattice = Lattice::from_rows({"000000", "000000", "100111", "001111", "001111", "001111"});
        const TargetZone zone(2, 4);
        const auto out = repair_defects(lattice, zone);
        REQUIRE(out.batches.size() == 1);
        CHECK(out.batches[0].moves[0] == Move::straight({2, 0}, {2, 2}));
        CHECK(zone_atom_count(lattice, zone) == 16);
    }
    SUBCASE("detour when the straight route is blocked") {
        // The only outside atom sits right of the zone, level with the
        // defect, behind zone atoms; the route climbs around them.
        Lattice lattice = Lattice::from_rows({
            "00000000",
            "00000000",
            "00101100",
            "00101101",
            "00111100",
            "00111100",
            "00000000",
            "00000000",
        });
        const TargetZone zone(2, 4);
        const Lattice before = lattice;
        const auto out = repair_defects(lattice, zone);
        REQUIRE(out.batches.size() == 1);
        const auto& m = out.batches[0].moves[0];
        CHECK(m.source() == Coord{3, 7});
        CHECK(m.dest() == Coord{3, 3});
        CHECK(m.segment_count() == 3);
        CHECK(m.length() == bfs_distance(before, m.source(), m.dest()));
        const auto cells = m.cells();
        for (std::size_t i = 1; i < cells.size(); ++i) CHECK_FALSE(before.occupied(cells[i]));
        // Nothing is left to fill the shallower defect.
        CHECK(out.unrepairable == std::vector<Coord>{{2, 3}});
    }
    SUBCASE("enclosed defect is filled by a line shift") {
        Lattice lattice = Lattice::from_rows({"00000", "01110", "01011", "01110", "00000"});
        const TargetZone zone(1, 3);
        const auto out = repair_defects(lattice, zone);
        CHECK(out.unrepairable.empty());
        REQUIRE(out.batches.size() == 1);
        CHECK(out.batches[0].size() == 2);
        CHECK(zone_atom_count(lattice, zone) == 9);
    }
    SUBCASE("no atom outside the zone") {
        Lattice lattice = Lattice::from_rows({"000", "000", "000"});
        const auto out = repair_defects(lattice, TargetZone(1, 1));
        CHECK(out.unrepairable == std::vector<Coord>{{1, 1}});
    }
}

TEST_CASE("find_route agrees with breadth-first search") {
    RngStream rng(9);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        Lattice lattice = load_random(8, 0.35, rng);
        const Coord src{static_cast<int>(rng.next() % 8), static_cast<int>(rng.next() % 8)};
        const Coord dst{static_cast<int>(rng.next() % 8), static_cast<int>(rng.next() % 8)};
        if (src == dst) continue;
        lattice.set(src, true);
        lattice.set(dst, false);
        const auto route = find_route(lattice, src, dst);
        const int expected = bfs_distance(lattice, src, dst);
        if (expected < 0) {
            CHECK(route.empty());
            continue;
        }
        REQUIRE_FALSE(route.empty());
        CHECK(static_cast<int>(route.size()) - 1 == expected);
        CHECK(route.front() == src);
        CHECK(route.back() == dst);
        for (std::size_t i = 1; i < route.size(); ++i) {
            CHECK(manhattan(route[i - 1], route[i]) == 1);
            CHECK_FALSE(lattice.occupied(route[i]));
        }
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("plan on an already perfect lattice is empty") {
    Lattice lattice = Lattice::from_rows({"0000", "0110", "0110", "0000"});
    const auto p = plan(lattice, TargetZone(1, 2));
    CHECK(p.batches.empty());
}

TEST_CASE("lossless replay fills the zone") {
    for (int width : {10, 20, 30}) {
        for (double p_occ : {0.5, 0.6, 0.7, 0.9}) {
            for (std::uint64_t seed = 0; seed < 100; ++seed) {
                RngStream rng(seed);
                const Lattice lattice = load_random(width, p_occ, rng);
                const auto zone = size_target(lattice.atom_count(), width, 0.0);
                const auto p = plan(lattice, zone);
                INFO("W=", width, " p_occ=", p_occ, " seed=", seed);
                CHECK(p.unrepairable.empty());
                const Lattice after = replay_lossless(p, lattice);
                CHECK(zone_atom_count(after, zone) == zone.site_count());
                CHECK(after.atom_count() == lattice.atom_count());
                if (seed < 10) check_every_batch_valid(p, lattice);
            }
        }
    }
}

TEST_CASE("plan is deterministic") {
    RngStream a(4), b(4);
    const Lattice la = load_random(30, 0.6, a);
    const Lattice lb = load_random(30, 0.6, b);
    const auto zone = size_target(la.atom_count(), 30, 0.0);
    const auto pa = plan(la, zone);
    const auto pb = plan(lb, zone);
    CHECK(pa.batches == pb.batches);
    CHECK(pa.phases == pb.phases);
}
