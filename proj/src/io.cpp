#include "rearrange/io.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace rearrange::io {

namespace {

json coord_json(Coord c) { return json::array({c.row, c.col}); }

Coord coord_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::runtime_error("coordinate must be a [row, col] pair");
    return {j.at(0).get<int>(), j.at(1).get<int>()};
}

json stat_json(const Stat& s) { return {{"mean", s.mean}, {"std", s.std}}; }

std::string_view outcome_name(MoveOutcome o) {
    switch (o) {
        case MoveOutcome::Succeeded: return "succeeded";
        case MoveOutcome::Lost: return "lost";
        case MoveOutcome::Filtered: return "filtered";
    }
    return "unknown";
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::string to_grid_text(const Lattice& lattice) {
    std::string text;
    text.reserve(static_cast<std::size_t>(lattice.width() + 1) * static_cast<std::size_t>(lattice.width()));
    for (int r = 0; r < lattice.width(); ++r) {
        for (int c = 0; c < lattice.width(); ++c) text += lattice.occupied({r, c}) ? '1' : '0';
        text += '\n';
    }
    return text;
}

Lattice lattice_from_grid_text(std::istream& in) {
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (!line.empty()) rows.push_back(line);
    }
    if (rows.empty()) throw std::runtime_error("grid text holds no rows");
    return Lattice::from_rows(rows);
}

json to_json(const Lattice& lattice) {
    json bits = json::array();
    for (auto b : lattice.cells()) bits.push_back(static_cast<int>(b));
    return {{"width", lattice.width()}, {"bits", std::move(bits)}};
}

Lattice lattice_from_json(const json& j) {
    const int width = j.at("width").get<int>();
    const auto& bits = j.at("bits");
    if (!bits.is_array() || bits.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(width))
        throw std::runtime_error("lattice bit list does not match width " + std::to_string(width));
    Lattice lattice(width);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const int bit = bits[i].get<int>();
        if (bit != 0 && bit != 1) throw std::runtime_error("lattice bits must be 0 or 1");
        lattice.set(lattice.coord(i), bit == 1);
    }
    return lattice;
}

json to_json(const Plan& plan) {
    json batches = json::array();
    for (std::size_t b = 0; b < plan.batches.size(); ++b) {
        json moves = json::array();
        for (const auto& m : plan.batches[b].moves) {
            json segments = json::array();
            for (const auto& s : m.segments()) segments.push_back({coord_json(s.from), coord_json(s.to)});
            moves.push_back({{"source", coord_json(m.source())},
                             {"dest", coord_json(m.dest())},
                             {"segments", std::move(segments)}});
        }
        batches.push_back({{"phase", std::string(to_string(plan.phases[b]))}, {"moves", std::move(moves)}});
    }
    json unrepairable = json::array();
    for (auto c : plan.unrepairable) unrepairable.push_back(coord_json(c));
    return {{"zone", {{"offset", plan.zone.offset()}, {"side", plan.zone.side()}}},
            {"unrepairable", std::move(unrepairable)},
            {"batches", std::move(batches)}};
}

Plan plan_from_json(const json& j) {
    Plan plan;
    const auto& zone = j.at("zone");
    plan.zone = TargetZone(zone.at("offset").get<int>(), zone.at("side").get<int>());
    if (j.contains("unrepairable"))
        for (const auto& c : j.at("unrepairable")) plan.unrepairable.push_back(coord_from(c));
    for (const auto& b : j.at("batches")) {
        const auto label = b.at("phase").get<std::string>();
        const auto phase = parse_phase(label);
        if (!phase) throw std::runtime_error("unknown phase label '" + label + "'");
        MoveBatch batch;
        for (const auto& m : b.at("moves")) {
            std::vector<Coord> points;
            const auto& segments = m.at("segments");
            if (!segments.is_array() || segments.empty()) throw std::runtime_error("move has no segments");
            for (const auto& s : segments) {
                if (!s.is_array() || s.size() != 2) throw std::runtime_error("segment must be a [from, to] pair");
                const Coord from = coord_from(s.at(0));
                if (!points.empty() && points.back() != from)
                    throw std::runtime_error("segments of a move are not contiguous");
                if (points.empty()) points.push_back(from);
                points.push_back(coord_from(s.at(1)));
            }
            Move move = Move::through(points);
            if (m.contains("source") && coord_from(m.at("source")) != move.source())
                throw std::runtime_error("move source disagrees with its first segment");
            if (m.contains("dest") && coord_from(m.at("dest")) != move.dest())
                throw std::runtime_error("move destination disagrees with its last segment");
            batch.moves.push_back(std::move(move));
        }
        plan.append(*phase, std::move(batch));
    }
    return plan;
}

json to_json(const RuleViolation& violation) {
    return {{"rule", violation.rule}, {"moves", violation.moves}, {"detail", violation.detail}};
}

json to_json(const ExecutionReport& report) {
    json batches = json::array();
    for (const auto& b : report.batches) {
        json outcomes = json::array();
        for (auto o : b.outcomes) outcomes.push_back(std::string(outcome_name(o)));
        batches.push_back({{"phase", std::string(to_string(b.phase))},
                           {"executed", b.executed},
                           {"longest", b.longest},
                           {"physical_time_s", b.physical_time},
                           {"outcomes", std::move(outcomes)}});
    }
    return {{"batches_executed", report.batches_executed},
            {"moves_attempted", report.moves_attempted},
            {"moves_succeeded", report.moves_succeeded},
            {"moves_lost", report.moves_lost},
            {"moves_filtered", report.moves_filtered},
            {"physical_time_s", report.physical_time},
            {"batches", std::move(batches)}};
}

json to_json(const RunReport& r) {
    return {{"width", r.width},
            {"zone", {{"offset", r.zone.offset()}, {"side", r.zone.side()}}},
            {"initial_atoms", r.initial_atoms},
            {"final_atoms", r.final_atoms},
            {"zone_atoms", r.zone_atoms},
            {"fill_rate", r.fill_rate},
            {"retention", r.retention},
            {"iterations", r.iterations},
            {"total_moves", r.total_moves},
            {"total_batches", r.total_batches},
            {"atoms_lost", r.atoms_lost},
            {"unrepairable", r.unrepairable},
            {"physical_time_s", r.physical_time},
            {"computation_time_s", r.computation_time},
            {"fill_trace", r.fill_trace}};
}

json to_json(const SimConfig& c) {
    return {{"width", c.width},
            {"p_occ", c.p_occ},
            {"p_loss", c.p_loss},
            {"seed", c.seed},
            {"iteration_cap", c.iteration_cap},
            {"compress", c.compress},
            {"physics",
             {{"a_max", c.physics.a_max},
              {"v_max", c.physics.v_max},
              {"t_transfer", c.physics.t_transfer},
              {"d_site", c.physics.d_site}}},
            {"sizing",
             {{"W0", c.sizing.reference_width}, {"m0", c.sizing.base_moves}, {"safety", c.sizing.safety}}}};
}

json to_json(const SweepSummary& s) {
    return {{"W", s.width},
            {"p_occ", s.p_occ},
            {"p_loss", s.p_loss},
            {"compressed", s.compressed},
            {"samples", s.samples},
            {"failures", s.failures},
            {"std_convention", "population"},
            {"fill_rate", stat_json(s.fill_rate)},
            {"retention", stat_json(s.retention)},
            {"iterations", stat_json(s.iterations)},
            {"moves", stat_json(s.moves)},
            {"batches", stat_json(s.batches)},
            {"L", stat_json(s.side)},
            {"physical_time_s", stat_json(s.physical_time)},
            {"compute_time_s", stat_json(s.computation_time)}};
}

json to_json(const ScalingFit& fit) {
    return {{"exponent", fit.exponent},
            {"prefactor", fit.prefactor},
            {"residual", fit.residual},
            {"points", fit.points}};
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
    std::map<std::string, std::string> values;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("line " + std::to_string(number) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw std::runtime_error("line " + std::to_string(number) + ": empty key");
        values[key] = trim(line.substr(eq + 1));
    }
    return values;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto temp = path;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + temp.string());
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("short write to " + temp.string());
    }
    std::filesystem::rename(temp, path);
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace rearrange::io
