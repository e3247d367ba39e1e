#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rearrange/executor.hpp"

namespace rearrange {

/// One (config, seed) work item and its outcome. Failed runs keep the error
/// text and no report.
struct RunRow {
    SimConfig config;
    std::optional<RunReport> report;
    std::string error;
};

struct Stat {
    double mean = 0.0;
    double std = 0.0;  // population convention (divide by n)
};

/// Aggregates for one grid point over all its seeds.
struct SweepSummary {
    int width = 0;
    double p_occ = 0.0;
    double p_loss = 0.0;
    bool compressed = false;
    std::size_t samples = 0;   // seeds run
    std::size_t failures = 0;  // seeds whose run raised an error
    Stat fill_rate, retention, iterations, moves, batches, side, physical_time, computation_time;
};

struct SweepResult {
    std::vector<RunRow> rows;  // grid-major, then seed
    std::vector<SweepSummary> summaries;
};

/// Widths {10, 20, 50, 75, 100} x p_occ {0.5, 0.7, 0.9} x p_loss {0, 0.01, 0.05}.
std::vector<SimConfig> paper_grid(const SimConfig& base = {});

/// Runs every (template, seed) pair with seeds first_seed..last_seed
/// inclusive, on up to `jobs` worker threads. A run's seed fully determines
/// its RNG stream, so the result does not depend on scheduling.
SweepResult sweep(std::span<const SimConfig> grid, std::uint64_t first_seed, std::uint64_t last_seed,
                  unsigned jobs = 1);

/// Summary over rows that share a grid point. Order of rows does not matter.
SweepSummary summarize(std::span<const RunRow> rows);

/// Versioned CSV: one comment line, a header, one row per run.
void write_csv(std::ostream& out, std::span<const RunRow> rows);
extern const std::vector<std::string> kCsvColumns;

/// Parsed CSV with '#' comment lines skipped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(const std::string& name) const;
};
CsvTable read_csv(std::istream& in);

struct ScalingFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double residual = 0.0;  // sum of squared residuals of log y
    std::size_t points = 0;
};

/// Least-squares fit of log y = exponent * log x + log prefactor. Needs
/// positive coordinates and at least two distinct x values.
ScalingFit fit_power_law(std::span<const std::pair<double, double>> points);

}  // namespace rearrange
