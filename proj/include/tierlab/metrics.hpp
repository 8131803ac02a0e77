#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tierlab/allocator.hpp"
#include "tierlab/trace.hpp"

namespace tierlab {

struct CostModel {
    double fast_latency_ns = 100.0;
    double capacity_latency_ns = 300.0;
    double migration_cost_ns = 50000.0;
};

// capacity >= fast > 0, migration >= 0.
void validate_cost_model(const CostModel& cm);

std::uint64_t estimated_runtime_ns(std::uint64_t fast_hits, std::uint64_t capacity_hits,
                                   std::uint64_t migrations, const CostModel& cm);

// Placement-only replay of a trace under one allocation strategy: the page
// each access touches, in trace order. Malformed events are skipped and
// counted, matching the simulator's handling.
struct ResolvedTrace {
    std::vector<PageId> access_pages;
    std::uint64_t page_count = 0;
    std::uint64_t trace_errors = 0;
};

ResolvedTrace resolve_trace(const Trace& t, const StrategyConfig& strategy,
                            std::uint64_t arena_pages = std::uint64_t{1} << 22);

// Serial reference and OpenMP variants must return identical results; the
// parallel ones reduce per-thread integer tallies, so ordering never shows.
std::vector<std::uint64_t> page_access_counts_serial(const ResolvedTrace& rt);
std::vector<std::uint64_t> page_access_counts_parallel(const ResolvedTrace& rt);

// matrix[time_bucket][addr_bucket]; total equals the access count.
std::vector<std::vector<std::uint64_t>> heatmap_serial(const ResolvedTrace& rt,
                                                       std::uint32_t addr_buckets,
                                                       std::uint32_t time_buckets);
std::vector<std::vector<std::uint64_t>> heatmap_parallel(const ResolvedTrace& rt,
                                                         std::uint32_t addr_buckets,
                                                         std::uint32_t time_buckets);

// Cumulative access fractions over pages sorted by descending count;
// monotone, ends at 1.0 (empty when there are no accesses).
std::vector<double> access_cdf(const std::vector<std::uint64_t>& counts);

// Smallest k such that the k most-accessed pages cover >= fraction of all
// accesses.
std::uint64_t pages_for_access_fraction(const std::vector<std::uint64_t>& counts,
                                        double fraction);

// Mean number of distinct pages touched per full window of window_accesses
// consecutive accesses; the working-set-size estimate in pages.
double wss_pages(const ResolvedTrace& rt, std::uint64_t window_accesses);

void write_heatmap_csv(const std::vector<std::vector<std::uint64_t>>& matrix,
                       const std::string& path);
void write_cdf_csv(const std::vector<std::uint64_t>& counts, const std::string& path);

}  // namespace tierlab
