#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

#include "rearrange/executor.hpp"
#include "rearrange/harness.hpp"
#include "rearrange/lattice.hpp"
#include "rearrange/parallelizer.hpp"
#include "rearrange/plan.hpp"

namespace rearrange::io {

using nlohmann::json;

// Grid text: one line per row, '1' for an atom and '0' for an empty trap.
std::string to_grid_text(const Lattice& lattice);
Lattice lattice_from_grid_text(std::istream& in);

// {"width": W, "bits": [row-major 0/1 ...]}
json to_json(const Lattice& lattice);
Lattice lattice_from_json(const json& j);

// {"zone": {"offset", "side"}, "unrepairable": [[r,c]...],
//  "batches": [{"phase", "moves": [{"source": [r,c], "dest": [r,c],
//                                    "segments": [[[r,c],[r,c]], ...]}]}]}
json to_json(const Plan& plan);
Plan plan_from_json(const json& j);

json to_json(const RuleViolation& violation);
json to_json(const ExecutionReport& report);
json to_json(const RunReport& report);
json to_json(const SimConfig& config);
json to_json(const SweepSummary& summary);
json to_json(const ScalingFit& fit);

/// Plain-text `key = value` pairs; '#' starts a comment. Duplicate keys keep
/// the last value.
std::map<std::string, std::string> read_key_values(std::istream& in);

/// Writes through a sibling temporary file and renames it into place, so
/// readers never see a partial file.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

json read_json_file(const std::filesystem::path& path);

}  // namespace rearrange::io
