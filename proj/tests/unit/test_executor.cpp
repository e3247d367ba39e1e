#include <doctest.h>

#include <cmath>

#include "rearrange/executor.hpp"
#include "rearrange/metrics.hpp"

using namespace rearrange;

namespace {

Plan planned(const Lattice& lattice) {
    return plan(lattice, size_target(lattice.atom_count(), lattice.width(), 0.0));
}

}  // namespace

TEST_CASE("no loss reproduces the lossless replay") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RngStream load(seed);
        Lattice lattice = load_random(20, 0.7, load);
        const auto p = planned(lattice);
        const Lattice expected = replay_lossless(p, lattice);
        RngStream rng(seed);
        const auto report = execute_plan(p, lattice, 0.0, rng);
        CHECK(lattice == expected);
        CHECK(report.moves_lost == 0);
        CHECK(report.moves_filtered == 0);
        CHECK(report.moves_succeeded == p.move_count());
    }
}

TEST_CASE("certain loss empties every source") {
    RngStream load(1);
    Lattice lattice = load_random(20, 0.7, load);
    const auto p = planned(lattice);
    const int before_zone = zone_atom_count(lattice, p.zone);
    const int before = lattice.atom_count();
    RngStream rng(1);
    const auto report = execute_plan(p, lattice, 1.0, rng);
    CHECK(report.moves_succeeded == 0);
    CHECK(report.moves_attempted == report.moves_lost + report.moves_filtered);
    CHECK(zone_atom_count(lattice, p.zone) <= before_zone);
    CHECK(lattice.atom_count() == before - static_cast<int>(report.moves_lost));
}

TEST_CASE("two-segment survival matches (1 - p)^2") {
    Lattice lattice(4);
    lattice.set({0, 0}, true);
    Plan p;
    p.zone = TargetZone(0, 1);
    p.append(Phase::Corner, {{Move::row_then_column({0, 0}, {2, 2})}});
    RngStream rng(123);
    const int trials = 200000;
    int survived = 0;
    for (int t = 0; t < trials; ++t) {
        Lattice copy = lattice;
        execute_plan(p, copy, 0.05, rng);
        survived += copy.occupied({2, 2});
    }
    const double rate = static_cast<double>(survived) / trials;
    const double sigma = std::sqrt(0.9025 * 0.0975 / trials);
    CHECK(std::abs(rate - 0.9025) < 4 * sigma);
}

TEST_CASE("loss draws stop at the first failed segment") {
    Lattice lattice(4);
    lattice.set({0, 0}, true);
    Plan p;
    p.zone = TargetZone(0, 1);
    p.append(Phase::Corner, {{Move::row_then_column({0, 0}, {2, 2})}});
    RngStream rng(0);
    Lattice copy = lattice;
    execute_plan(p, copy, 0.999999, rng);
    CHECK(rng.draws() == 1);
    RngStream sure(0);
    copy = lattice;
    execute_plan(p, copy, 0.0, sure);
    CHECK(sure.draws() == 2);
}

TEST_CASE("batch time follows the longest surviving move") {
    Lattice lattice(8);
    lattice.set({0, 0}, true);
    lattice.set({3, 0}, true);
    Plan p;
    p.zone = TargetZone(0, 1);
    p.append(Phase::Repair, {{Move::straight({0, 0}, {0, 2}), Move::straight({3, 0}, {3, 7})}});
    p.append(Phase::Repair, {{Move::straight({5, 5}, {5, 6})}});  // source never loaded
    RngStream rng(0);
    const auto report = execute_plan(p, lattice, 0.0, rng);
    CHECK(report.batches_executed == 1);
    CHECK(report.moves_filtered == 1);
    CHECK(report.physical_time == move_time(7).total);
    CHECK(report.batches[0].longest == 7);
    CHECK_FALSE(report.batches[1].executed);
    CHECK(report.batches[1].outcomes[0] == MoveOutcome::Filtered);

    // Move order inside a batch does not change the time.
    Lattice again(8);
    again.set({0, 0}, true);
    again.set({3, 0}, true);
    Plan q;
    q.zone = p.zone;
    q.append(Phase::Repair, {{Move::straight({3, 0}, {3, 7}), Move::straight({0, 0}, {0, 2})}});
    RngStream r2(0);
    CHECK(execute_plan(q, again, 0.0, r2).physical_time == report.physical_time);
}

TEST_CASE("occupied destination is an inconsistency") {
    Lattice lattice(4);
    lattice.set({0, 0}, true);
    lattice.set({0, 2}, true);
    Plan p;
    p.zone = TargetZone(0, 1);
    p.append(Phase::Repair, {{Move::straight({0, 0}, {0, 2})}});
    RngStream rng(0);
    CHECK_THROWS_AS(execute_plan(p, lattice, 0.0, rng), PlanConsistencyError);
}

TEST_CASE("run_until_filled without loss takes one iteration") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SimConfig config;
        config.width = 50;
        config.seed = seed;
        const auto report = run_until_filled(config);
        CHECK(report.fill_rate == 1.0);
        CHECK(report.iterations == 1);
        CHECK(report.atoms_lost == 0);
        CHECK(report.fill_trace == std::vector<double>{1.0});
    }
}

TEST_CASE("run_until_filled under loss") {
    SimConfig config;
    config.width = 30;
    config.p_loss = 0.05;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        config.seed = seed;
        const auto report = run_until_filled(config);
        CHECK(report.iterations >= 1);
        CHECK(report.iterations <= config.iteration_cap);
        CHECK(report.final_atoms == report.initial_atoms - static_cast<int>(report.atoms_lost));
        CHECK(report.fill_rate >= 0.0);
        CHECK(report.fill_rate <= 1.0);
        CHECK(report.retention <= 1.0);
        CHECK(report.fill_trace.size() == static_cast<std::size_t>(report.iterations));
        CHECK(report.retention == doctest::Approx(static_cast<double>(report.zone_atoms) / report.initial_atoms));
        if (report.fill_rate < 1.0) CHECK(report.iterations == config.iteration_cap);
    }
}

TEST_CASE("identical runs give identical reports") {
    SimConfig config;
    config.width = 40;
    config.p_loss = 0.01;
    config.seed = 17;
    config.compress = true;
    auto a = run_until_filled(config);
    auto b = run_until_filled(config);
    a.computation_time = b.computation_time = 0.0;
    CHECK(a.fill_trace == b.fill_trace);
    CHECK(a.total_moves == b.total_moves);
    CHECK(a.total_batches == b.total_batches);
    CHECK(a.physical_time == b.physical_time);
    CHECK(a.zone_atoms == b.zone_atoms);
}

TEST_CASE("config checks") {
    SimConfig c;
    c.width = 1;
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
    c = {};
    c.p_loss = 1.0;
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
    c = {};
    c.iteration_cap = 0;
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
    c = {};
    c.p_occ = 0.0;
    CHECK_THROWS_AS(run_until_filled(c), InfeasibleTarget);
}

TEST_CASE("metrics") {
    Lattice lattice(10);
    const TargetZone zone(0, 10);
    CHECK(fill_rate(lattice, zone) == 0.0);
    for (int i = 0; i < 99; ++i) lattice.set(lattice.coord(static_cast<std::size_t>(i)), true);
    CHECK(fill_rate(lattice, zone) == doctest::Approx(0.99));
    lattice.set({9, 9}, true);
    CHECK(fill_rate(lattice, zone) == 1.0);
    CHECK(retention_rate(300, 300) == 1.0);
    CHECK(retention_rate(225, 300) == doctest::Approx(0.75));
    CHECK(retention_rate(267, 300) == doctest::Approx(0.89));
    CHECK_THROWS_AS(retention_rate(1, 0), std::invalid_argument);
}
