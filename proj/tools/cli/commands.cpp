#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "rearrange/executor.hpp"
#include "rearrange/harness.hpp"
#include "rearrange/io.hpp"
#include "rearrange/parallelizer.hpp"
#include "rearrange/planner.hpp"

namespace rearrange::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr const char* kOutputEnv = "REARRANGE_OUT";
constexpr double kLargeLatticeSites = 2500.0;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flags shared by `run` and `sweep`. Unset optionals fall back to the config
// file, then to built-in defaults.
struct SimFlags {
    std::string config_path;
    std::optional<int> width;
    std::optional<double> p_occ, p_loss;
    std::optional<std::uint64_t> seed;
    std::optional<int> iteration_cap;
    bool compress = false;
    std::optional<double> a_max, v_max, t_transfer, d_site, w0, m0, safety;
    std::string out_dir;
    int verbosity = 0;

    void attach(CLI::App& app, bool with_point) {
        app.add_option("--config", config_path, "key = value config file; flags override its entries")
            ->check(CLI::ExistingFile);
        if (with_point) {
            app.add_option("--width", width, "lattice side W in sites");
            app.add_option("--p-occ", p_occ, "loading probability per site");
            app.add_option("--p-loss", p_loss, "loss probability per path segment");
            app.add_option("--seed", seed, "RNG seed for loading and loss");
        }
        app.add_option("--iteration-cap", iteration_cap, "maximum plan/execute iterations (default 6)");
        app.add_flag("--compress", compress, "merge batches greedily before execution");
        app.add_option("--a-max", a_max, "maximum acceleration, m/s^2 (default 2750)");
        app.add_option("--v-max", v_max, "maximum velocity, m/s (default 0.13)");
        app.add_option("--t-transfer", t_transfer, "single trap transfer time, s (default 60e-6)");
        app.add_option("--d-site", d_site, "trap pitch, m (default 5e-6)");
        app.add_option("--w0", w0, "sizing reference width W0 (default 30)");
        app.add_option("--m0", m0, "sizing base move count m0 (default 2)");
        app.add_option("--safety", safety, "sizing safety margin s (default 0.95)");
        app.add_option("--out", out_dir, std::string("output directory (default $") + kOutputEnv + " or .)");
        app.add_flag("-v,--verbose", verbosity, "more output; repeat for more");
    }
};

std::map<std::string, std::string> load_config_file(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    try {
        return io::read_key_values(in);
    } catch (const std::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
    std::istringstream ss(text);
    T value{};
    ss >> value;
    if (!ss || !(ss >> std::ws).eof()) throw UsageError("config key '" + key + "': cannot parse '" + text + "'");
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw UsageError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_value<T>(key, item));
    if (out.empty()) throw UsageError("config key '" + key + "' is empty");
    return out;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const auto s = std::stoull(text);
            return {s, s};
        }
        const auto a = std::stoull(text.substr(0, dots));
        const auto b = std::stoull(text.substr(dots + 2));
        if (b < a) throw UsageError("seed range " + text + " is empty");
        return {a, b};
    } catch (const std::logic_error&) {
        throw UsageError("seed range must look like A..B, got '" + text + "'");
    }
}

const std::vector<std::string> kPointKeys = {"width", "p_occ", "p_loss", "seed"};
const std::vector<std::string> kSharedKeys = {"iteration_cap", "compress", "a_max", "v_max", "t_transfer",
                                              "d_site",        "W0",       "m0",    "safety"};
const std::vector<std::string> kSweepKeys = {"widths", "p_occs", "p_losses", "seeds", "jobs", "paper_grid"};

void reject_unknown(const std::map<std::string, std::string>& file, bool sweep_keys) {
    for (const auto& [key, value] : file) {
        auto known = [&](const std::vector<std::string>& keys) {
            return std::find(keys.begin(), keys.end(), key) != keys.end();
        };
        if (known(kPointKeys) || known(kSharedKeys) || (sweep_keys && known(kSweepKeys))) continue;
        throw UsageError("unknown config key '" + key + "'");
    }
}

SimConfig build_config(const SimFlags& flags, const std::map<std::string, std::string>& file) {
    SimConfig c;
    auto pick = [&](const std::string& key, auto& target, const auto& flag) {
        using T = std::decay_t<decltype(target)>;
        if (flag) {
            target = static_cast<T>(*flag);
        } else if (auto it = file.find(key); it != file.end()) {
            target = parse_value<T>(key, it->second);
        }
    };
    pick("width", c.width, flags.width);
    pick("p_occ", c.p_occ, flags.p_occ);
    pick("p_loss", c.p_loss, flags.p_loss);
    pick("seed", c.seed, flags.seed);
    pick("iteration_cap", c.iteration_cap, flags.iteration_cap);
    pick("a_max", c.physics.a_max, flags.a_max);
    pick("v_max", c.physics.v_max, flags.v_max);
    pick("t_transfer", c.physics.t_transfer, flags.t_transfer);
    pick("d_site", c.physics.d_site, flags.d_site);
    pick("W0", c.sizing.reference_width, flags.w0);
    pick("m0", c.sizing.base_moves, flags.m0);
    pick("safety", c.sizing.safety, flags.safety);
    if (flags.compress) {
        c.compress = true;
    } else if (auto it = file.find("compress"); it != file.end()) {
        c.compress = parse_bool("compress", it->second);
    }
    return c;
}

fs::path output_dir(const std::string& flag) {
    fs::path dir = flag;
    if (dir.empty()) {
        const char* env = std::getenv(kOutputEnv);
        dir = (env && *env) ? fs::path(env) : fs::path(".");
    }
    fs::create_directories(dir);
    return dir;
}

Lattice read_lattice_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open lattice file " + path.string());
    const int first = (in >> std::ws).peek();
    try {
        if (first == '{') return io::lattice_from_json(json::parse(in));
        return io::lattice_from_grid_text(in);
    } catch (const std::exception& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------

int cmd_run(const SimFlags& flags, bool dump_plan, bool dump_lattices, std::ostream& out) {
    auto file = load_config_file(flags.config_path);
    reject_unknown(file, false);
    SimConfig config = build_config(flags, file);
    try {
        config.check();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const fs::path dir = output_dir(flags.out_dir);

    RngStream rng(config.seed);
    Lattice lattice = load_random(config.width, config.p_occ, rng);
    const Lattice initial = lattice;
    Plan first_plan;
    RunReport report;
    try {
        report = run_until_filled(config, lattice, rng, &first_plan);
    } catch (const InfeasibleTarget& e) {
        throw UsageError(std::string("infeasible target: ") + e.what());
    }

    json doc = {{"config", io::to_json(config)}, {"report", io::to_json(report)}};
    io::write_file_atomically(dir / "run_report.json", doc.dump(2) + "\n");
    if (dump_plan) {
        io::write_file_atomically(dir / "plan.json", io::to_json(first_plan).dump() + "\n");
        io::write_file_atomically(dir / "lattice.json", io::to_json(initial).dump() + "\n");
    }
    if (dump_lattices) {
        io::write_file_atomically(dir / "initial.txt", io::to_grid_text(initial));
        io::write_file_atomically(dir / "final.txt", io::to_grid_text(lattice));
    }

    out << "fill_rate " << report.fill_rate << "\n"
        << "retention " << report.retention << "\n"
        << "iterations " << report.iterations << "\n";
    if (flags.verbosity > 0) {
        out << "target " << report.zone.side() << "x" << report.zone.side() << " at offset "
            << report.zone.offset() << "\n"
            << "initial_atoms " << report.initial_atoms << "\n"
            << "moves " << report.total_moves << "\n"
            << "batches " << report.total_batches << "\n"
            << "physical_time_s " << report.physical_time << "\n"
            << "compute_time_s " << report.computation_time << "\n";
    }
    return kOk;
}

struct SweepFlags {
    bool paper_grid = false;
    std::vector<int> widths;
    std::vector<double> p_occs, p_losses;
    std::string seeds;
    unsigned jobs = 0;
};

int cmd_sweep(const SimFlags& flags, const SweepFlags& sf, std::ostream& out) {
    auto file = load_config_file(flags.config_path);
    reject_unknown(file, true);
    const SimConfig base = build_config(flags, file);

    bool paper = sf.paper_grid;
    if (!paper)
        if (auto it = file.find("paper_grid"); it != file.end()) paper = parse_bool("paper_grid", it->second);

    auto widths = sf.widths;
    auto occs = sf.p_occs;
    auto losses = sf.p_losses;
    if (widths.empty())
        if (auto it = file.find("widths"); it != file.end()) widths = parse_list<int>("widths", it->second);
    if (occs.empty())
        if (auto it = file.find("p_occs"); it != file.end()) occs = parse_list<double>("p_occs", it->second);
    if (losses.empty())
        if (auto it = file.find("p_losses"); it != file.end()) losses = parse_list<double>("p_losses", it->second);

    std::vector<SimConfig> grid;
    if (paper) {
        if (!widths.empty() || !occs.empty() || !losses.empty())
            throw UsageError("--paper-grid cannot be combined with --widths/--p-occs/--p-losses");
        grid = paper_grid(base);
    } else {
        if (widths.empty()) widths = {base.width};
        if (occs.empty()) occs = {base.p_occ};
        if (losses.empty()) losses = {base.p_loss};
        for (int w : widths)
            for (double o : occs)
                for (double l : losses) {
                    SimConfig c = base;
                    c.width = w;
                    c.p_occ = o;
                    c.p_loss = l;
                    grid.push_back(c);
                }
    }
    for (auto& c : grid) {
        try {
            c.check();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }

    std::string seeds = sf.seeds;
    if (seeds.empty())
        if (auto it = file.find("seeds"); it != file.end()) seeds = it->second;
    if (seeds.empty()) seeds = std::to_string(base.seed);
    const auto [first, last] = parse_seed_range(seeds);

    unsigned jobs = sf.jobs;
    if (jobs == 0)
        if (auto it = file.find("jobs"); it != file.end()) jobs = parse_value<unsigned>("jobs", it->second);
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());

    const fs::path dir = output_dir(flags.out_dir);
    const auto result = sweep(grid, first, last, jobs);

    std::ostringstream csv;
    write_csv(csv, result.rows);
    io::write_file_atomically(dir / "sweep.csv", csv.str());
    json summaries = json::array();
    for (const auto& s : result.summaries) summaries.push_back(io::to_json(s));
    io::write_file_atomically(dir / "summary.json", summaries.dump(2) + "\n");

    std::size_t failures = 0;
    for (const auto& s : result.summaries) {
        failures += s.failures;
        out << "W=" << s.width << " p_occ=" << s.p_occ << " p_loss=" << s.p_loss << " runs=" << s.samples
            << " fill=" << s.fill_rate.mean << " retention=" << s.retention.mean
            << " iterations=" << s.iterations.mean << " batches=" << s.batches.mean << "\n";
    }
    out << "wrote " << result.rows.size() << " rows to " << (dir / "sweep.csv").string() << "\n";
    if (failures > 0) out << failures << " runs failed; see the status column\n";
    return kOk;
}

int cmd_validate(const std::string& plan_path, const std::string& lattice_path, std::ostream& out) {
    Plan plan;
    try {
        plan = io::plan_from_json(io::read_json_file(plan_path));
    } catch (const std::exception& e) {
        throw UsageError(std::string("malformed plan: ") + e.what());
    }
    Lattice state = read_lattice_file(lattice_path);
    if (!plan.zone.fits(state)) throw UsageError("plan target zone does not fit the lattice");

    std::size_t total = 0;
    std::size_t bad_batches = 0;
    for (std::size_t b = 0; b < plan.batches.size(); ++b) {
        const auto violations = validate_batch(plan.batches[b], state);
        if (!violations.empty()) ++bad_batches;
        for (const auto& v : violations) {
            out << "batch " << b << " (" << to_string(plan.phases[b]) << "): " << describe(v) << "\n";
            ++total;
        }
        // Best-effort replay so later batches are judged against a sensible state.
        for (const auto& m : plan.batches[b].moves)
            if (state.contains(m.source())) state.set(m.source(), false);
        for (const auto& m : plan.batches[b].moves)
            if (state.contains(m.dest())) state.set(m.dest(), true);
    }
    const int filled = zone_atom_count(state, plan.zone);
    out << plan.batches.size() << " batches, " << plan.move_count() << " moves, " << total << " violations in "
        << bad_batches << " batches; target " << filled << "/" << plan.zone.site_count() << " filled\n";
    return total == 0 ? kOk : kViolations;
}

struct Filter {
    std::string column;
    std::string op;
    double value;
};

Filter parse_filter(const std::string& text) {
    static const char* const ops[] = {">=", "<=", "!=", "==", ">", "<", "="};
    for (const char* op : ops) {
        const auto at = text.find(op);
        if (at == std::string::npos || at == 0) continue;
        Filter f{text.substr(0, at), op, 0.0};
        try {
            f.value = std::stod(text.substr(at + std::string(op).size()));
        } catch (const std::exception&) {
            throw UsageError("filter '" + text + "' needs a numeric right-hand side");
        }
        if (f.op == "=") f.op = "==";
        return f;
    }
    throw UsageError("cannot parse filter '" + text + "'; use e.g. p_occ==0.7 or M>=2500");
}

bool passes(const Filter& f, double v) {
    if (f.op == ">=") return v >= f.value;
    if (f.op == "<=") return v <= f.value;
    if (f.op == ">") return v > f.value;
    if (f.op == "<") return v < f.value;
    if (f.op == "!=") return std::abs(v - f.value) > 1e-12 * std::max(1.0, std::abs(f.value));
    return std::abs(v - f.value) <= 1e-12 * std::max(1.0, std::abs(f.value));
}

int cmd_fit(const std::string& csv_path, const std::string& x_name, const std::string& y_name,
            const std::vector<std::string>& where, bool mean_per_x, const std::string& out_dir,
            std::ostream& out) {
    std::ifstream in(csv_path);
    if (!in) throw UsageError("cannot open CSV " + csv_path);
    CsvTable table;
    try {
        table = read_csv(in);
    } catch (const std::exception& e) {
        throw UsageError(csv_path + ": " + e.what());
    }
    std::vector<Filter> filters;
    for (const auto& w : where) filters.push_back(parse_filter(w));

    // M = W^2 and N = L^2 are derived on the fly.
    auto value = [&](const std::vector<std::string>& row, const std::string& name) -> std::optional<double> {
        auto numeric = [&](const std::string& col) -> std::optional<double> {
            auto idx = table.column(col);
            if (!idx) throw UsageError("CSV has no column '" + col + "'");
            const auto& cell = row[*idx];
            if (cell.empty()) return std::nullopt;
            try {
                return std::stod(cell);
            } catch (const std::exception&) {
                throw UsageError("column '" + col + "' holds non-numeric value '" + cell + "'");
            }
        };
        if (name == "M" && !table.column("M")) {
            auto w = numeric("W");
            return w ? std::optional(*w * *w) : std::nullopt;
        }
        if (name == "N" && !table.column("N")) {
            auto l = numeric("L");
            return l ? std::optional(*l * *l) : std::nullopt;
        }
        return numeric(name);
    };
    const auto status = table.column("status");

    std::map<double, std::vector<double>> by_x;
    std::vector<std::pair<double, double>> points;
    for (const auto& row : table.rows) {
        if (status && row[*status] != "ok" && !row[*status].empty()) continue;
        bool keep = true;
        for (const auto& f : filters) {
            auto v = value(row, f.column);
            if (!v || !passes(f, *v)) {
                keep = false;
                break;
            }
        }
        if (!keep) continue;
        auto x = value(row, x_name);
        auto y = value(row, y_name);
        if (!x || !y) continue;
        if (mean_per_x) {
            by_x[*x].push_back(*y);
        } else {
            points.emplace_back(*x, *y);
        }
    }
    for (const auto& [x, ys] : by_x) {
        double sum = 0.0;
        for (double y : ys) sum += y;
        points.emplace_back(x, sum / static_cast<double>(ys.size()));
    }
    if (points.empty()) throw UsageError("no rows match the selection");

    ScalingFit fit;
    try {
        fit = fit_power_law(points);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    out << "exponent " << fit.exponent << "\n"
        << "prefactor " << fit.prefactor << "\n"
        << "residual " << fit.residual << "\n"
        << "points " << fit.points << "\n";

    json doc = io::to_json(fit);
    // Small lattices dominate a full-range moves-vs-M fit; report the large-lattice fit beside it.
    if (x_name == "M") {
        std::vector<std::pair<double, double>> large;
        for (const auto& p : points)
            if (p.first >= kLargeLatticeSites) large.push_back(p);
        try {
            const auto tail = fit_power_law(large);
            out << "exponent_M_ge_2500 " << tail.exponent << "\n";
            doc["M_ge_2500"] = io::to_json(tail);
        } catch (const std::invalid_argument&) {
            doc["M_ge_2500"] = nullptr;
        }
    }
    doc["x"] = x_name;
    doc["y"] = y_name;
    doc["where"] = where;
    doc["mean_per_x"] = mean_per_x;
    doc["csv"] = csv_path;
    io::write_file_atomically(output_dir(out_dir) / "fit.json", doc.dump(2) + "\n");
    return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Plan, execute and analyse defect-free atom array assembly"};
    app.name("rearrange");
    app.require_subcommand(1);

    SimFlags run_flags;
    bool dump_plan = false;
    bool dump_lattices = false;
    auto* run = app.add_subcommand("run", "simulate one loaded lattice until the target is full");
    run_flags.attach(*run, true);
    run->add_flag("--dump-plan", dump_plan, "write the first plan (plan.json) and initial lattice (lattice.json)");
    run->add_flag("--dump-lattices", dump_lattices, "write initial.txt and final.txt grid dumps");

    SimFlags sweep_flags;
    SweepFlags sf;
    auto* sw = app.add_subcommand("sweep", "Monte Carlo sweep over widths, loading and loss");
    sweep_flags.attach(*sw, false);
    sw->add_flag("--paper-grid", sf.paper_grid, "W {10,20,50,75,100} x p_occ {0.5,0.7,0.9} x p_loss {0,0.01,0.05}");
    sw->add_option("--widths", sf.widths, "comma-separated lattice widths")->delimiter(',');
    sw->add_option("--p-occs", sf.p_occs, "comma-separated loading probabilities")->delimiter(',');
    sw->add_option("--p-losses", sf.p_losses, "comma-separated loss probabilities")->delimiter(',');
    sw->add_option("--seeds", sf.seeds, "inclusive seed range A..B (or a single seed)");
    sw->add_option("--jobs", sf.jobs, "worker threads (default: hardware concurrency)");

    std::string plan_path, lattice_path;
    auto* val = app.add_subcommand("validate", "check every batch of a plan against the transport rules");
    val->add_option("--plan", plan_path, "plan JSON")->required()->check(CLI::ExistingFile);
    val->add_option("--lattice", lattice_path, "initial lattice, JSON or grid text")->required()->check(CLI::ExistingFile);

    std::string csv_path, x_name = "M", y_name = "batches", fit_out;
    std::vector<std::string> where;
    bool mean_per_x = false;
    auto* fit = app.add_subcommand("fit", "least-squares power-law fit of two CSV columns");
    fit->add_option("--csv", csv_path, "sweep CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--x", x_name, "x column (M = W^2 and N = L^2 are derived)")->capture_default_str();
    fit->add_option("--y", y_name, "y column")->capture_default_str();
    fit->add_option("--where", where, "row filter such as p_occ==0.7 or M>=2500; repeatable");
    fit->add_flag("--mean", mean_per_x, "average y over rows sharing an x before fitting");
    fit->add_option("--out", fit_out, std::string("output directory (default $") + kOutputEnv + " or .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run) return cmd_run(run_flags, dump_plan, dump_lattices, out);
        if (*sw) return cmd_sweep(sweep_flags, sf, out);
        if (*val) return cmd_validate(plan_path, lattice_path, out);
        if (*fit) return cmd_fit(csv_path, x_name, y_name, where, mean_per_x, fit_out, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const PlanConsistencyError& e) {
        err << "internal consistency error: " << e.what() << "\n";
        return kInconsistent;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace rearrange::cli
