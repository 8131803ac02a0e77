#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <vector>

#include "tierlab/metrics.hpp"
#include "tierlab/workload.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace tierlab;

namespace {

template <typename F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        f();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main() {
    WorkloadSpec spec;
    spec.archetype = Archetype::StableZipf;
    spec.num_objects = 20'000;
    spec.object_size = 4096;
    spec.total_accesses = 2'000'000;
    spec.zipf_s = 0.9;
    spec.seed = 7;

    Trace t = generate(spec);
    ResolvedTrace rt = resolve_trace(t, StrategyConfig{});

#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    std::printf("trace: %" PRIu64 " accesses over %" PRIu64 " pages, %d threads\n",
                static_cast<std::uint64_t>(rt.access_pages.size()), rt.page_count, threads);

    std::vector<std::uint64_t> counts_s, counts_p;
    double cs = best_of(5, [&] { counts_s = page_access_counts_serial(rt); });
    double cp = best_of(5, [&] { counts_p = page_access_counts_parallel(rt); });
    bool counts_match = counts_s == counts_p;

    std::vector<std::vector<std::uint64_t>> hm_s, hm_p;
    double hs = best_of(5, [&] { hm_s = heatmap_serial(rt, 64, 64); });
    double hp = best_of(5, [&] { hm_p = heatmap_parallel(rt, 64, 64); });
    bool heatmap_match = hm_s == hm_p;

    std::printf("%-22s %10s %10s %8s %6s\n", "kernel", "serial_ms", "omp_ms", "speedup",
                "match");
    std::printf("%-22s %10.3f %10.3f %7.2fx %6s\n", "page_access_counts", cs, cp, cs / cp,
                counts_match ? "yes" : "NO");
    std::printf("%-22s %10.3f %10.3f %7.2fx %6s\n", "heatmap", hs, hp, hs / hp,
                heatmap_match ? "yes" : "NO");
    return counts_match && heatmap_match ? 0 : 1;
}
