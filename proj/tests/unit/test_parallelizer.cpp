#include <doctest.h>

#include <set>

#include "rearrange/parallelizer.hpp"
#include "rearrange/planner.hpp"
#include "transport_oracle.hpp"

using namespace rearrange;

namespace {

std::set<int> rules_of(const std::vector<RuleViolation>& violations) {
    std::set<int> out;
    for (const auto& v : violations) out.insert(v.rule);
    return out;
}

Lattice row_lattice(const std::string& row0, int width = 6) {
    Lattice lattice(width);
    for (int c = 0; c < width; ++c) lattice.set({0, c}, row0[static_cast<std::size_t>(c)] == '1');
    return lattice;
}

std::set<oracle::Finding> dynamic_findings(const std::vector<Move>& moves, const Lattice& before) {
    std::set<oracle::Finding> out;
    for (const auto& v : validate_batch({moves}, before)) {
        if (v.rule < 4) continue;
        out.insert({v.rule, v.moves.at(0), v.moves.at(1)});
    }
    return out;
}

}  // namespace

TEST_CASE("validator examples") {
    SUBCASE("converging neighbours are fine") {
        const auto lattice = row_lattice("100100");
        CHECK(validate_batch({{Move::straight({0, 0}, {0, 1}), Move::straight({0, 3}, {0, 2})}}, lattice)
                  .empty());
    }
    SUBCASE("shared destination") {
        const auto lattice = row_lattice("100010");
        const auto v = validate_batch({{Move::straight({0, 0}, {0, 2}), Move::straight({0, 4}, {0, 2})}}, lattice);
        CHECK(rules_of(v).count(3) == 1);
    }
    SUBCASE("crossing moves on one row") {
        const auto lattice = row_lattice("101000");
        const auto v = validate_batch({{Move::straight({0, 0}, {0, 3}), Move::straight({0, 2}, {0, 1})}}, lattice);
        CHECK(rules_of(v).count(4) == 1);
        CHECK(rules_of(v).count(5) == 1);
    }
}

TEST_CASE("rule 1: static atom in the way") {
    const auto lattice = row_lattice("110000");
    const auto v = validate_batch({{Move::straight({0, 0}, {0, 3})}}, lattice);
    CHECK(rules_of(v) == std::set<int>{1});
    // Landing on a static atom is also blocked.
    const auto w = validate_batch({{Move::straight({0, 0}, {0, 1})}}, lattice);
    CHECK(rules_of(w) == std::set<int>{1});
}

TEST_CASE("rule 2: sweeping past a static atom on another active row") {
    Lattice lattice(6);
    lattice.set({0, 0}, true);
    lattice.set({2, 0}, true);
    lattice.set({2, 2}, true);  // static, on row 2 which is active
    const MoveBatch sweep{{Move::straight({0, 0}, {0, 4}), Move::straight({2, 0}, {2, 1})}};
    CHECK(rules_of(validate_batch(sweep, lattice)).count(2) == 1);
    // Ending aligned with it is allowed.
    const MoveBatch aligned{{Move::straight({0, 0}, {0, 2}), Move::straight({2, 0}, {2, 1})}};
    CHECK(rules_of(validate_batch(aligned, lattice)).count(2) == 0);
    // A lone move has no other active line.
    const MoveBatch lone{{Move::straight({0, 0}, {0, 4})}};
    CHECK(validate_batch(lone, lattice).empty());
}

TEST_CASE("rule 3: endpoints") {
    const auto lattice = row_lattice("100000");
    CHECK(rules_of(validate_batch({{Move::straight({0, 1}, {0, 2})}}, lattice)) == std::set<int>{3});
    const MoveBatch twice{{Move::straight({0, 0}, {0, 2}), Move::straight({0, 0}, {0, 3})}};
    CHECK(rules_of(validate_batch(twice, lattice)).count(3) == 1);
    const MoveBatch outside{{Move::straight({0, 0}, {0, 9})}};
    CHECK(rules_of(validate_batch(outside, lattice)) == std::set<int>{3});
}

TEST_CASE("shifting a line by one site is a legal batch") {
    const auto lattice = row_lattice("011100");
    const MoveBatch shift{{Move::straight({0, 1}, {0, 0}), Move::straight({0, 2}, {0, 1}),
                           Move::straight({0, 3}, {0, 2})}};
    CHECK(validate_batch(shift, lattice).empty());
    const MoveBatch swap{{Move::straight({0, 1}, {0, 2}), Move::straight({0, 2}, {0, 1})}};
    CHECK(rules_of(validate_batch(swap, lattice)).count(4) == 1);
}

TEST_CASE("rule 6: order across rows") {
    Lattice lattice(6);
    lattice.set({0, 0}, true);
    lattice.set({2, 3}, true);
    const MoveBatch flip{{Move::straight({0, 0}, {0, 5}), Move::straight({2, 3}, {2, 1})}};
    CHECK(rules_of(validate_batch(flip, lattice)) == std::set<int>{6});
    CHECK(order_violations(flip.moves[0], flip.moves[1]) == std::vector<int>{6});
}

TEST_CASE("rules 4 to 6 agree with the step simulator on sampled triples") {
    // The exhaustive enumeration lives in the acceptance suite; this is a quick sample.
    Lattice full(6);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) full.set({r, c}, true);
    RngStream rng(2);
    auto random_move = [&] {
        for (;;) {
            const Coord a{static_cast<int>(rng.next() % 6), static_cast<int>(rng.next() % 6)};
            const Coord b{static_cast<int>(rng.next() % 6), static_cast<int>(rng.next() % 6)};
            if (a == b) continue;
            if (a.row == b.row || a.col == b.col) return Move::straight(a, b);
            return rng.next() % 2 ? Move::row_then_column(a, b) : Move::column_then_row(a, b);
        }
    };
    for (int trial = 0; trial < 20000; ++trial) {
        std::vector<Move> moves{random_move(), random_move(), random_move()};
        CHECK(dynamic_findings(moves, full) == oracle::simulate(moves));
    }
}

TEST_CASE("compress examples") {
    SUBCASE("one batch stays as is") {
        const auto lattice = row_lattice("100000");
        Plan p;
        p.zone = TargetZone(0, 1);
        p.append(Phase::Repair, {{Move::straight({0, 0}, {0, 2})}});
        const auto out = compress(p, lattice);
        CHECK(out.batches == p.batches);
    }
    SUBCASE("two independent rows merge") {
        Lattice lattice(6);
        lattice.set({0, 0}, true);
        lattice.set({3, 0}, true);
        Plan p;
        p.zone = TargetZone(0, 1);
        p.append(Phase::Repair, {{Move::straight({0, 0}, {0, 2})}});
        p.append(Phase::Repair, {{Move::straight({3, 0}, {3, 2})}});
        const auto out = compress(p, lattice);
        REQUIRE(out.batch_count() == 1);
        CHECK(out.batches[0].size() == 2);
        CHECK(validate_batch(out.batches[0], lattice).empty());
        CHECK(replay_lossless(out, lattice) == replay_lossless(p, lattice));
    }
    SUBCASE("a move that starts where the previous one ended stays behind") {
        const auto lattice = row_lattice("100000");
        Plan p;
        p.zone = TargetZone(0, 1);
        p.append(Phase::Repair, {{Move::straight({0, 0}, {0, 2})}});
        p.append(Phase::Repair, {{Move::straight({0, 2}, {0, 4})}});
        CHECK(compress(p, lattice).batch_count() == 2);
    }
}

TEST_CASE("compressed planner output replays identically") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        RngStream rng(seed);
        const int width = 10 + static_cast<int>(seed % 3) * 10;
        const Lattice lattice = load_random(width, 0.5 + 0.1 * static_cast<double>(seed % 4), rng);
        const auto zone = size_target(lattice.atom_count(), width, 0.0);
        const auto original = plan(lattice, zone);
        const auto merged = compress(original, lattice);
        INFO("seed ", seed);
        CHECK(merged.batch_count() <= original.batch_count());
        CHECK(merged.move_count() == original.move_count());
        CHECK(merged.batches.size() == merged.phases.size());
        Lattice state = lattice;
        for (const auto& batch : merged.batches) {
            REQUIRE(validate_batch(batch, state).empty());
            apply_moves_unchecked(state, batch.moves);
        }
        CHECK(state == replay_lossless(original, lattice));
    }
}

TEST_CASE("compress rejects malformed plans") {
    const auto lattice = row_lattice("100000");
    Plan p;
    p.zone = TargetZone(0, 1);
    p.batches.push_back({{Move::straight({0, 0}, {0, 2})}});
    CHECK_THROWS_AS(compress(p, lattice), PlanConsistencyError);
}
