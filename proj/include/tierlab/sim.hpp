#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tierlab/allocator.hpp"
#include "tierlab/metrics.hpp"
#include "tierlab/migration.hpp"
#include "tierlab/policies.hpp"
#include "tierlab/trace.hpp"
#include "tierlab/workload.hpp"

namespace tierlab {

// Fully resolved settings for one simulation run. Interval scaling has
// already been applied to defaults upstream; scale is carried only so the
// report can echo it.
struct SimConfig {
    PolicyConfig policy;
    StrategyConfig strategy;
    MigrationConfig migration;
    SamplingModel sampling;
    CostModel cost;
    std::uint64_t fast_capacity_pages = 64;
    std::uint64_t arena_pages = std::uint64_t{1} << 22;
    std::uint32_t timeline_buckets = 100;
    std::uint64_t seed = 1;
    double scale = 1.0;
};

struct TimelineBucket {
    std::uint64_t accesses = 0;
    std::uint64_t fast_hits = 0;
    std::uint64_t promotions = 0;
    std::uint64_t demotions = 0;
    double hit_rate = 0.0;
    // Accesses per estimated microsecond of this bucket.
    double estimated_throughput = 0.0;
};

struct RunReport {
    std::uint64_t total_accesses = 0;
    std::uint64_t fast_hits = 0;
    double hit_rate = 0.0;
    std::uint64_t promotions = 0;
    std::uint64_t demotions = 0;
    std::uint64_t revalidation_drops = 0;
    std::uint64_t thrash_page_count = 0;
    std::uint64_t trace_errors = 0;
    // Event index of the first rejected record, or UINT64_MAX when clean.
    std::uint64_t first_error_event = UINT64_MAX;
    std::uint64_t observed_samples = 0;
    std::uint64_t pages_created = 0;
    std::uint64_t fast_resident_pages = 0;
    std::uint64_t estimated_runtime_ns = 0;
    std::vector<TimelineBucket> timeline;
};

// Replays the trace through one (strategy, policy) pair. Hit accounting
// covers every access; sampling gates only what the policy sees.
RunReport simulate(const Trace& trace, const SimConfig& cfg);

// Deterministic serialization: identical (trace, config) input yields
// byte-identical text.
std::string report_json(const RunReport& r, const SimConfig& cfg);
void write_report_json(const RunReport& r, const SimConfig& cfg, const std::string& path);
void write_timeline_csv(const RunReport& r, const std::string& path);

}  // namespace tierlab
