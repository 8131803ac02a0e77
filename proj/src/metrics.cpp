#include "tierlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tierlab {

void validate_cost_model(const CostModel& cm) {
    if (!(cm.fast_latency_ns > 0.0)) throw InputError("fast latency must be > 0");
    if (!(cm.capacity_latency_ns >= cm.fast_latency_ns))
        throw InputError("capacity latency must be >= fast latency");
    if (!(cm.migration_cost_ns >= 0.0)) throw InputError("migration cost must be >= 0");
}

std::uint64_t estimated_runtime_ns(std::uint64_t fast_hits, std::uint64_t capacity_hits,
                                   std::uint64_t migrations, const CostModel& cm) {
    double ns = static_cast<double>(fast_hits) * cm.fast_latency_ns +
                static_cast<double>(capacity_hits) * cm.capacity_latency_ns +
                static_cast<double>(migrations) * cm.migration_cost_ns;
    return static_cast<std::uint64_t>(std::llround(ns));
}

ResolvedTrace resolve_trace(const Trace& t, const StrategyConfig& strategy,
                            std::uint64_t arena_pages) {
    Allocator alloc(strategy, t.page_size, arena_pages);
    if (strategy.kind == StrategyKind::OraclePopularity) alloc.prepare_oracle(t);

    ResolvedTrace rt;
    rt.access_pages.reserve(t.access_count());
    for (const TraceEvent& e : t.events) {
        switch (e.kind) {
            case EventKind::Alloc:
                if (e.arg == 0 || alloc.live(e.id)) {
                    ++rt.trace_errors;
                    break;
                }
                alloc.alloc(e.id, e.arg, t.frames_of(e));
                break;
            case EventKind::Free:
                if (!alloc.free(e.id)) ++rt.trace_errors;
                break;
            case EventKind::Access: {
                const Placement* pl = alloc.find(e.id);
                if (pl == nullptr || e.arg >= pl->size) {
                    ++rt.trace_errors;
                    break;
                }
                rt.access_pages.push_back(alloc.resolve(*pl, e.arg));
                break;
            }
        }
    }
    rt.page_count = alloc.pages_created();
    return rt;
}

std::vector<std::uint64_t> page_access_counts_serial(const ResolvedTrace& rt) {
    std::vector<std::uint64_t> counts(rt.page_count, 0);
    for (PageId p : rt.access_pages) {
        if (p >= counts.size()) throw InvariantError("resolved access outside the arena");
        ++counts[p];
    }
    return counts;
}

std::vector<std::uint64_t> page_access_counts_parallel(const ResolvedTrace& rt) {
#ifndef _OPENMP
    return page_access_counts_serial(rt);
#else
    std::vector<std::uint64_t> counts(rt.page_count, 0);
    const std::int64_t n = static_cast<std::int64_t>(rt.access_pages.size());
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(rt.page_count, 0);
#pragma omp for nowait
        for (std::int64_t i = 0; i < n; ++i)
            ++local[rt.access_pages[static_cast<std::size_t>(i)]];
#pragma omp critical
        for (std::size_t j = 0; j < counts.size(); ++j) counts[j] += local[j];
    }
    return counts;
#endif
}

namespace {

std::vector<std::vector<std::uint64_t>> empty_matrix(std::uint32_t addr_buckets,
                                                     std::uint32_t time_buckets) {
    if (addr_buckets == 0 || time_buckets == 0)
        throw InputError("heatmap needs at least one bucket per axis");
    return std::vector<std::vector<std::uint64_t>>(time_buckets,
                                                   std::vector<std::uint64_t>(addr_buckets, 0));
}

}  // namespace

std::vector<std::vector<std::uint64_t>> heatmap_serial(const ResolvedTrace& rt,
                                                       std::uint32_t addr_buckets,
                                                       std::uint32_t time_buckets) {
    auto m = empty_matrix(addr_buckets, time_buckets);
    const std::uint64_t total = rt.access_pages.size();
    if (total == 0 || rt.page_count == 0) return m;
    for (std::uint64_t i = 0; i < total; ++i) {
        std::uint64_t tb = i * time_buckets / total;
        std::uint64_t ab = static_cast<std::uint64_t>(rt.access_pages[i]) * addr_buckets /
                           rt.page_count;
        ++m[tb][std::min<std::uint64_t>(ab, addr_buckets - 1)];
    }
    return m;
}

std::vector<std::vector<std::uint64_t>> heatmap_parallel(const ResolvedTrace& rt,
                                                         std::uint32_t addr_buckets,
                                                         std::uint32_t time_buckets) {
#ifndef _OPENMP
    return heatmap_serial(rt, addr_buckets, time_buckets);
#else
    auto m = empty_matrix(addr_buckets, time_buckets);
    const std::uint64_t total = rt.access_pages.size();
    if (total == 0 || rt.page_count == 0) return m;
    const std::int64_t n = static_cast<std::int64_t>(total);
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(static_cast<std::size_t>(addr_buckets) * time_buckets, 0);
#pragma omp for nowait
        for (std::int64_t i = 0; i < n; ++i) {
            std::uint64_t tb = static_cast<std::uint64_t>(i) * time_buckets / total;
            std::uint64_t ab = static_cast<std::uint64_t>(
                                   rt.access_pages[static_cast<std::size_t>(i)]) *
                               addr_buckets / rt.page_count;
            ++local[tb * addr_buckets + std::min<std::uint64_t>(ab, addr_buckets - 1)];
        }
#pragma omp critical
        for (std::uint32_t tb = 0; tb < time_buckets; ++tb)
            for (std::uint32_t ab = 0; ab < addr_buckets; ++ab)
                m[tb][ab] += local[static_cast<std::size_t>(tb) * addr_buckets + ab];
    }
    return m;
#endif
}

std::vector<double> access_cdf(const std::vector<std::uint64_t>& counts) {
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    if (total == 0) return {};
    std::vector<std::uint64_t> sorted = counts;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<double> cdf(sorted.size());
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        acc += sorted[i];
        cdf[i] = static_cast<double>(acc) / static_cast<double>(total);
    }
    return cdf;
}

std::uint64_t pages_for_access_fraction(const std::vector<std::uint64_t>& counts,
                                        double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw InputError("fraction must be in [0, 1]");
    if (fraction == 0.0) return 0;
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    if (total == 0) return 0;
    std::vector<std::uint64_t> sorted = counts;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double target = fraction * static_cast<double>(total);
    double acc = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        acc += static_cast<double>(sorted[i]);
        if (acc >= target) return i + 1;
    }
    return sorted.size();
}

double wss_pages(const ResolvedTrace& rt, std::uint64_t window_accesses) {
    if (window_accesses == 0) throw InputError("working-set window must be >= 1 access");
    const std::uint64_t total = rt.access_pages.size();
    if (total == 0) return 0.0;
    std::vector<std::uint32_t> stamp(rt.page_count, 0);
    std::uint32_t cur = 0;
    std::uint64_t windows = 0;
    std::uint64_t distinct_sum = 0;
    std::uint64_t i = 0;
    while (i + window_accesses <= total) {
        ++cur;
        std::uint64_t distinct = 0;
        for (std::uint64_t j = 0; j < window_accesses; ++j) {
            PageId p = rt.access_pages[i + j];
            if (stamp[p] != cur) {
                stamp[p] = cur;
                ++distinct;
            }
        }
        distinct_sum += distinct;
        ++windows;
        i += window_accesses;
    }
    if (windows == 0) {
        // Trace shorter than one window: measure the single partial window.
        ++cur;
        std::uint64_t distinct = 0;
        for (PageId p : rt.access_pages) {
            if (stamp[p] != cur) {
                stamp[p] = cur;
                ++distinct;
            }
        }
        return static_cast<double>(distinct);
    }
    return static_cast<double>(distinct_sum) / static_cast<double>(windows);
}

void write_heatmap_csv(const std::vector<std::vector<std::uint64_t>>& matrix,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << "time_bucket";
    if (!matrix.empty())
        for (std::size_t ab = 0; ab < matrix[0].size(); ++ab) out << ",addr_" << ab;
    out << "\n";
    for (std::size_t tb = 0; tb < matrix.size(); ++tb) {
        out << tb;
        for (std::uint64_t v : matrix[tb]) out << ',' << v;
        out << "\n";
    }
    if (!out) throw InputError("write failed: " + path);
}

void write_cdf_csv(const std::vector<std::uint64_t>& counts, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open for writing: " + path);
    std::vector<double> cdf = access_cdf(counts);
    out << "page_rank,cumulative_access_fraction\n";
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%zu,%.9f\n", i + 1, cdf[i]);
        out << buf;
    }
    if (!out) throw InputError("write failed: " + path);
}

}  // namespace tierlab
