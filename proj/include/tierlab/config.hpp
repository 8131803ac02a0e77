#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tierlab/sim.hpp"
#include "tierlab/workload.hpp"

namespace tierlab {

struct CompareRow {
    std::string name;
    SimConfig sim;
};

// One parsed run description: the base simulation settings, the input
// (generated workload or trace file, exactly one), and any compare rows.
struct RunConfig {
    SimConfig sim;
    std::optional<WorkloadSpec> workload;
    std::string trace_path;
    std::string out_dir = "out";
    std::vector<CompareRow> rows;
};

// Parses a key = value config with [section] headers. Resolution is
// two-pass: policy kind, strategy kind, seed, and scale are read first so
// interval defaults can be derived, then every other key overlays those
// defaults verbatim (explicit values are never rescaled). [row <name>]
// sections re-run the same resolution with the row's entries appended, so a
// row that switches policy gets that policy's scaled defaults. CLI
// overrides, when given, beat everything in the file.
RunConfig parse_run_config(const std::string& path,
                           std::optional<std::uint64_t> seed_override = std::nullopt,
                           std::optional<double> scale_override = std::nullopt);

}  // namespace tierlab
