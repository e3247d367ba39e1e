#include "rearrange/executor.hpp"

#include <algorithm>
#include <chrono>

#include "rearrange/metrics.hpp"
#include "rearrange/parallelizer.hpp"

namespace rearrange {

ExecutionReport execute_plan(const Plan& plan, Lattice& lattice, double p_loss, RngStream& rng,
                             const PhysicsParams& params) {
    if (!(p_loss >= 0.0 && p_loss <= 1.0)) throw std::invalid_argument("loss probability must lie in [0, 1]");
    ExecutionReport report;
    report.batches.reserve(plan.batches.size());

    for (std::size_t b = 0; b < plan.batches.size(); ++b) {
        const auto& moves = plan.batches[b].moves;
        BatchRecord record;
        record.phase = b < plan.phases.size() ? plan.phases[b] : Phase::Repair;
        record.outcomes.assign(moves.size(), MoveOutcome::Filtered);
        report.moves_attempted += moves.size();

        std::vector<std::size_t> live;
        for (std::size_t i = 0; i < moves.size(); ++i) {
            if (!lattice.contains(moves[i].source()) || !lattice.contains(moves[i].dest()))
                throw PlanConsistencyError("move leaves the lattice");
            if (lattice.occupied(moves[i].source())) {
                live.push_back(i);
                record.longest = std::max(record.longest, moves[i].length());
            } else {
                ++report.moves_filtered;
            }
        }
        if (!live.empty()) {
            record.executed = true;
            record.physical_time = move_time(record.longest, params).total;
            report.physical_time += record.physical_time;
            ++report.batches_executed;
        }

        for (std::size_t i : live) {
            bool survived = true;
            for (int s = 0; s < moves[i].segment_count() && survived; ++s)
                if (rng.bernoulli(p_loss)) survived = false;
            record.outcomes[i] = survived ? MoveOutcome::Succeeded : MoveOutcome::Lost;
        }
        for (std::size_t i : live) lattice.set(moves[i].source(), false);
        for (std::size_t i : live) {
            if (record.outcomes[i] == MoveOutcome::Lost) {
                ++report.moves_lost;
                continue;
            }
            if (lattice.occupied(moves[i].dest()))
                throw PlanConsistencyError("destination " + to_string(moves[i].dest()) +
                                           " occupied at execution time");
            lattice.set(moves[i].dest(), true);
            ++report.moves_succeeded;
        }
        report.batches.push_back(std::move(record));
    }
    return report;
}

void SimConfig::check() const {
    if (width < 2) throw std::invalid_argument("lattice width must be at least 2");
    if (!(p_occ >= 0.0 && p_occ <= 1.0)) throw std::invalid_argument("p_occ must lie in [0, 1]");
    if (!(p_loss >= 0.0 && p_loss < 1.0)) throw std::invalid_argument("p_loss must lie in [0, 1)");
    if (iteration_cap < 1) throw std::invalid_argument("iteration cap must be at least 1");
    physics.check();
    sizing.check();
}

RunReport run_until_filled(const SimConfig& config) {
    config.check();
    RngStream rng(config.seed);
    Lattice lattice = load_random(config.width, config.p_occ, rng);
    return run_until_filled(config, lattice, rng);
}

RunReport run_until_filled(const SimConfig& config, Lattice& lattice, RngStream& rng, Plan* first_plan) {
    config.check();
    using Clock = std::chrono::steady_clock;
    RunReport report;
    report.width = lattice.width();
    report.initial_atoms = lattice.atom_count();
    report.zone = size_target(report.initial_atoms, lattice.width(), config.p_loss, config.sizing);

    for (int iteration = 1; iteration <= config.iteration_cap; ++iteration) {
        const auto started = Clock::now();
        Plan current = plan(lattice, report.zone);
        if (config.compress) current = compress(current, lattice);
        report.computation_time += std::chrono::duration<double>(Clock::now() - started).count();
        if (iteration == 1 && first_plan) *first_plan = current;

        const auto exec = execute_plan(current, lattice, config.p_loss, rng, config.physics);
        report.total_moves += exec.moves_attempted - exec.moves_filtered;
        report.total_batches += exec.batches_executed;
        report.atoms_lost += exec.moves_lost;
        report.physical_time += exec.physical_time;
        report.unrepairable = current.unrepairable.size();
        report.iterations = iteration;

        const double fill = fill_rate(lattice, report.zone);
        report.fill_trace.push_back(fill);
        if (fill == 1.0) break;
    }

    report.final_atoms = lattice.atom_count();
    report.zone_atoms = zone_atom_count(lattice, report.zone);
    report.fill_rate = fill_rate(lattice, report.zone);
    report.retention = retention_rate(report.zone_atoms, report.initial_atoms);
    return report;
}

}  // namespace rearrange
