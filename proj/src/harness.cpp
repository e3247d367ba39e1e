#include "rearrange/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rearrange {

const std::vector<std::string> kCsvColumns = {
    "W",          "p_occ",   "p_loss",          "seed",           "L",          "delta",
    "fill_rate",  "retention", "iterations",    "moves",          "batches",    "physical_time_s",
    "compute_time_s", "compressed", "fill_trace", "status",
};

std::vector<SimConfig> paper_grid(const SimConfig& base) {
    std::vector<SimConfig> grid;
    for (int w : {10, 20, 50, 75, 100})
        for (double occ : {0.5, 0.7, 0.9})
            for (double loss : {0.0, 0.01, 0.05}) {
                SimConfig c = base;
                c.width = w;
                c.p_occ = occ;
                c.p_loss = loss;
                grid.push_back(c);
            }
    return grid;
}

SweepResult sweep(std::span<const SimConfig> grid, std::uint64_t first_seed, std::uint64_t last_seed,
                  unsigned jobs) {
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    if (last_seed < first_seed) throw std::invalid_argument("seed range is empty");
    const std::size_t seeds = static_cast<std::size_t>(last_seed - first_seed) + 1;

    SweepResult result;
    result.rows.resize(grid.size() * seeds);
    for (std::size_t g = 0; g < grid.size(); ++g)
        for (std::size_t s = 0; s < seeds; ++s) {
            auto& row = result.rows[g * seeds + s];
            row.config = grid[g];
            row.config.seed = first_seed + s;
        }

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < result.rows.size(); i = next++) {
            auto& row = result.rows[i];
            try {
                row.report = run_until_filled(row.config);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(result.rows.size())));
    if (jobs == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work);
    }

    for (std::size_t g = 0; g < grid.size(); ++g)
        result.summaries.push_back(
            summarize(std::span<const RunRow>(result.rows).subspan(g * seeds, seeds)));
    return result;
}

namespace {

Stat stat_of(std::vector<double> values) {
    if (values.empty()) return {};
    // Sorted summation makes the result independent of row order.
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    std::vector<double> dev;
    dev.reserve(values.size());
    for (double v : values) dev.push_back((v - mean) * (v - mean));
    std::sort(dev.begin(), dev.end());
    return {mean, std::sqrt(std::accumulate(dev.begin(), dev.end(), 0.0) / n)};
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string sanitize(std::string text) {
    for (auto& ch : text)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return text;
}

}  // namespace

SweepSummary summarize(std::span<const RunRow> rows) {
    SweepSummary s;
    if (rows.empty()) return s;
    const auto& c = rows.front().config;
    s.width = c.width;
    s.p_occ = c.p_occ;
    s.p_loss = c.p_loss;
    s.compressed = c.compress;
    s.samples = rows.size();
    std::vector<double> fill, ret, iters, moves, batches, side, phys, comp;
    for (const auto& row : rows) {
        if (!row.report) {
            ++s.failures;
            continue;
        }
        const auto& r = *row.report;
        fill.push_back(r.fill_rate);
        ret.push_back(r.retention);
        iters.push_back(r.iterations);
        moves.push_back(static_cast<double>(r.total_moves));
        batches.push_back(static_cast<double>(r.total_batches));
        side.push_back(r.zone.side());
        phys.push_back(r.physical_time);
        comp.push_back(r.computation_time);
    }
    s.fill_rate = stat_of(fill);
    s.retention = stat_of(ret);
    s.iterations = stat_of(iters);
    s.moves = stat_of(moves);
    s.batches = stat_of(batches);
    s.side = stat_of(side);
    s.physical_time = stat_of(phys);
    s.computation_time = stat_of(comp);
    return s;
}

void write_csv(std::ostream& out, std::span<const RunRow> rows) {
    out << "# rearrange sweep v1; times in seconds; fill_trace = fill rate after each iteration\n";
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
    out << '\n';
    for (const auto& row : rows) {
        const auto& c = row.config;
        out << c.width << ',' << number(c.p_occ) << ',' << number(c.p_loss) << ',' << c.seed << ',';
        if (row.report) {
            const auto& r = *row.report;
            std::string trace;
            for (std::size_t i = 0; i < r.fill_trace.size(); ++i)
                trace += (i ? ";" : "") + number(r.fill_trace[i]);
            out << r.zone.side() << ',' << r.zone.offset() << ',' << number(r.fill_rate) << ','
                << number(r.retention) << ',' << r.iterations << ',' << r.total_moves << ','
                << r.total_batches << ',' << number(r.physical_time) << ',' << number(r.computation_time)
                << ',' << (c.compress ? "true" : "false") << ',' << trace << ",ok\n";
        } else {
            out << ",,,,,,,,," << (c.compress ? "true" : "false") << ",," << "error: " << sanitize(row.error)
                << '\n';
        }
    }
}

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        return cells;
    };
    CsvTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (table.header.empty()) {
            table.header = split(line);
            continue;
        }
        auto cells = split(line);
        if (cells.size() != table.header.size())
            throw std::runtime_error("CSV row has " + std::to_string(cells.size()) + " fields, header has " +
                                     std::to_string(table.header.size()));
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) throw std::runtime_error("CSV has no header line");
    return table;
}

ScalingFit fit_power_law(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw std::invalid_argument("a power-law fit needs at least two points");
    std::vector<double> lx, ly;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
            throw std::invalid_argument("power-law fit needs positive finite coordinates");
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
    }
    const double n = static_cast<double>(points.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("power-law fit needs at least two distinct x values");
    ScalingFit fit;
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    fit.prefactor = std::exp(intercept);
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (fit.exponent * lx[i] + intercept);
        fit.residual += r * r;
    }
    fit.points = points.size();
    return fit;
}

}  // namespace rearrange
