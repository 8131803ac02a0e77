#include "tierlab/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "tierlab/rng.hpp"

namespace tierlab {

namespace {

constexpr std::uint64_t kAutoScanBytes = std::uint64_t{256} << 20;

std::uint64_t migrations_of(const TimelineBucket& b) { return b.promotions + b.demotions; }

}  // namespace

RunReport simulate(const Trace& trace, const SimConfig& cfg) {
    validate_cost_model(cfg.cost);
    if (cfg.timeline_buckets < 1) throw InputError("timeline needs at least one bucket");
    if (cfg.migration.tick_interval_samples < 1)
        throw InputError("migration tick interval must be >= 1 sample");
    if (cfg.sampling.rate < 1)
        throw InputError("sampling rate means one-in-N accesses, so it must be >= 1");
    if (cfg.sampling.jitter < 0.0 || cfg.sampling.jitter > 1.0)
        throw InputError("sampling jitter must lie in [0, 1]");

    PolicyConfig pc = cfg.policy;
    if (pc.numa.scan_window_pages == 0)
        pc.numa.scan_window_pages = std::max<std::uint64_t>(1, kAutoScanBytes / trace.page_size);

    MachineState mach;
    mach.fast.capacity_pages = cfg.fast_capacity_pages;
    mach.capacity.capacity_pages = UINT64_MAX;

    std::unique_ptr<Policy> policy = make_policy(pc, mach);
    MigrationEngine engine(mach, cfg.migration);
    Allocator alloc(cfg.strategy, trace.page_size, cfg.arena_pages);

    // Pages materialize the moment the allocator carves them; first-touch
    // placement is therefore creation order.
    auto materialize = [&] {
        while (mach.pages.size() < alloc.pages_created()) {
            PageId id = mach.add_page();
            policy->register_page(id);
            engine.register_page(id);
        }
    };

    if (cfg.strategy.kind == StrategyKind::OraclePopularity) {
        alloc.prepare_oracle(trace);
        materialize();
    }

    RunReport r;
    r.timeline.resize(cfg.timeline_buckets);

    std::uint64_t access_events = trace.access_count();
    const std::uint64_t sampling_seed = Rng(cfg.seed).substream("sampling").next_u64();

    LogicalTime t = 0;
    std::uint64_t access_ordinal = 0;  // includes rejected accesses: bucket = trace position
    std::uint32_t cur_bucket = 0;
    MigrationStats flushed;
    std::vector<Intent> intents;

    auto note_error = [&](std::size_t event_index) {
        ++r.trace_errors;
        if (r.first_error_event == UINT64_MAX) r.first_error_event = event_index;
    };
    auto flush_bucket = [&](std::uint32_t b) {
        const MigrationStats& s = engine.stats();
        r.timeline[b].promotions += s.promotions - flushed.promotions;
        r.timeline[b].demotions += s.demotions - flushed.demotions;
        flushed = s;
    };

    for (std::size_t ei = 0; ei < trace.events.size(); ++ei) {
        const TraceEvent& e = trace.events[ei];
        switch (e.kind) {
            case EventKind::Alloc: {
                if (e.arg == 0 || alloc.live(e.id)) {
                    note_error(ei);
                    break;
                }
                alloc.alloc(e.id, e.arg, trace.frames_of(e));
                materialize();
                break;
            }
            case EventKind::Free: {
                if (!alloc.free(e.id)) note_error(ei);
                break;
            }
            case EventKind::Access: {
                std::uint32_t b = static_cast<std::uint32_t>(
                    std::min<std::uint64_t>(access_ordinal * cfg.timeline_buckets / access_events,
                                            cfg.timeline_buckets - 1));
                if (b != cur_bucket) {
                    flush_bucket(cur_bucket);
                    cur_bucket = b;
                }
                ++access_ordinal;

                const Placement* pl = alloc.find(e.id);
                if (pl == nullptr || e.arg >= pl->size) {
                    note_error(ei);
                    break;
                }
                Page& page = mach.page(alloc.resolve(*pl, e.arg));

                ++r.total_accesses;
                ++r.timeline[b].accesses;
                if (page.tier == TierKind::Fast) {
                    ++r.fast_hits;
                    ++r.timeline[b].fast_hits;
                }

                if (sample_observed(cfg.sampling, sampling_seed, ei)) {
                    ++t;
                    ++r.observed_samples;
                    page.last_access = t;
                    intents.clear();
                    policy->on_sample(page.id, t, intents);
                    for (const Intent& in : intents) engine.enqueue(in);
                    if (t % cfg.migration.tick_interval_samples == 0) engine.tick(*policy);
                } else {
                    page.last_access = t;
                }
                break;
            }
        }
    }
    flush_bucket(cur_bucket);

    const MigrationStats& s = engine.stats();
    r.promotions = s.promotions;
    r.demotions = s.demotions;
    r.revalidation_drops = s.revalidation_drops;
    r.thrash_page_count = engine.thrash_page_count();
    r.pages_created = alloc.pages_created();
    r.fast_resident_pages = mach.fast.resident_pages;
    r.hit_rate = r.total_accesses == 0
                     ? 0.0
                     : static_cast<double>(r.fast_hits) / static_cast<double>(r.total_accesses);
    r.estimated_runtime_ns = estimated_runtime_ns(r.fast_hits, r.total_accesses - r.fast_hits,
                                                  r.promotions + r.demotions, cfg.cost);
    for (TimelineBucket& b : r.timeline) {
        b.hit_rate = b.accesses == 0
                         ? 0.0
                         : static_cast<double>(b.fast_hits) / static_cast<double>(b.accesses);
        std::uint64_t ns = estimated_runtime_ns(b.fast_hits, b.accesses - b.fast_hits,
                                                migrations_of(b), cfg.cost);
        b.estimated_throughput =
            ns == 0 ? 0.0 : static_cast<double>(b.accesses) / (static_cast<double>(ns) / 1000.0);
    }
    return r;
}

std::string report_json(const RunReport& r, const SimConfig& cfg) {
    using json = nlohmann::ordered_json;

    json jc;
    jc["policy"] = policy_name(cfg.policy.kind);
    jc["strategy"] = strategy_name(cfg.strategy.kind);
    if (cfg.strategy.kind == StrategyKind::ContextBased) {
        jc["strategy_depth"] = cfg.strategy.depth;
        jc["strategy_regions"] = cfg.strategy.regions;
    }
    switch (cfg.policy.kind) {
        case PolicyKind::SawtoothDefault:
        case PolicyKind::SawtoothQC:
        case PolicyKind::Smooth:
        case PolicyKind::TwoInterval: {
            const CoolingConfig& cc = cfg.policy.cooling;
            jc["cooling"] = {
                {"interval_samples", cc.interval_samples},
                {"decay_factor", cc.decay_factor},
                {"trigger", cooling_trigger_name(cc.trigger)},
                {"max_counter_threshold", cc.max_counter_threshold},
                {"decay_shape", decay_shape_name(cc.decay_shape)},
                {"single_decay_on_catchup", cc.single_decay_on_catchup},
            };
            jc["thresholds"] = {
                {"adapt_interval_samples", cfg.policy.thresholds.adapt_interval_samples},
                {"warm_disable_fraction", cfg.policy.thresholds.warm_disable_fraction},
            };
            if (cfg.policy.kind == PolicyKind::TwoInterval) {
                const TwoIntervalConfig& ti = cfg.policy.two_interval;
                jc["two_interval"] = {
                    {"momentum_interval_samples", ti.momentum_interval_samples},
                    {"frequency_interval_samples", ti.frequency_interval_samples},
                    {"momentum_hot_threshold", ti.momentum_hot_threshold},
                };
            }
            break;
        }
        case PolicyKind::NumaHintOnce:
        case PolicyKind::NumaHintTwice:
        case PolicyKind::NumaHintNoDemotion: {
            const NumaHintConfig& nc = cfg.policy.numa;
            jc["numa"] = {
                {"scan_window_pages", nc.scan_window_pages},
                {"scan_interval_samples", nc.scan_interval_samples},
                {"hot_fault_threshold", nc.hot_fault_threshold},
                {"demotion", numa_demotion_name(nc.demotion)},
                {"high_watermark", nc.high_watermark},
                {"low_watermark", nc.low_watermark},
            };
            break;
        }
    }
    jc["migration"] = {
        {"tick_interval_samples", cfg.migration.tick_interval_samples},
        {"max_migrations_per_tick", cfg.migration.max_migrations_per_tick},
    };
    jc["sampling"] = {{"rate", cfg.sampling.rate}, {"jitter", cfg.sampling.jitter}};
    jc["cost"] = {
        {"fast_latency_ns", cfg.cost.fast_latency_ns},
        {"capacity_latency_ns", cfg.cost.capacity_latency_ns},
        {"migration_cost_ns", cfg.cost.migration_cost_ns},
    };
    jc["fast_capacity_pages"] = cfg.fast_capacity_pages;
    jc["arena_pages"] = cfg.arena_pages;
    jc["timeline_buckets"] = cfg.timeline_buckets;
    jc["seed"] = cfg.seed;
    jc["scale"] = cfg.scale;

    json jt;
    jt["total_accesses"] = r.total_accesses;
    jt["fast_hits"] = r.fast_hits;
    jt["hit_rate"] = r.hit_rate;
    jt["promotions"] = r.promotions;
    jt["demotions"] = r.demotions;
    jt["revalidation_drops"] = r.revalidation_drops;
    jt["thrash_page_count"] = r.thrash_page_count;
    jt["trace_errors"] = r.trace_errors;
    if (r.trace_errors > 0) jt["first_error_event"] = r.first_error_event;
    jt["observed_samples"] = r.observed_samples;
    jt["pages_created"] = r.pages_created;
    jt["fast_resident_pages"] = r.fast_resident_pages;
    jt["estimated_runtime_ns"] = r.estimated_runtime_ns;

    json out;
    out["config"] = std::move(jc);
    out["totals"] = std::move(jt);
    out["timeline"] = json::array();
    for (const TimelineBucket& b : r.timeline)
        out["timeline"].push_back({
            {"accesses", b.accesses},
            {"fast_hits", b.fast_hits},
            {"hit_rate", b.hit_rate},
            {"promotions", b.promotions},
            {"demotions", b.demotions},
            {"estimated_throughput", b.estimated_throughput},
        });
    return out.dump(2) + "\n";
}

void write_report_json(const RunReport& r, const SimConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << report_json(r, cfg);
    if (!out) throw InputError("write failed: " + path);
}

void write_timeline_csv(const RunReport& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << "bucket,accesses,fast_hits,hit_rate,promotions,demotions,estimated_throughput\n";
    for (std::size_t i = 0; i < r.timeline.size(); ++i) {
        const TimelineBucket& b = r.timeline[i];
        char buf[192];
        std::snprintf(buf, sizeof buf, "%zu,%llu,%llu,%.9f,%llu,%llu,%.6f\n", i,
                      static_cast<unsigned long long>(b.accesses),
                      static_cast<unsigned long long>(b.fast_hits), b.hit_rate,
                      static_cast<unsigned long long>(b.promotions),
                      static_cast<unsigned long long>(b.demotions), b.estimated_throughput);
        out << buf;
    }
    if (!out) throw InputError("write failed: " + path);
}

}  // namespace tierlab
