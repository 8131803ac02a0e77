#include "doctest.h"

#include <cstdint>
#include <string>
#include <vector>

#include "tierlab/sim.hpp"

using namespace tierlab;

namespace {

WorkloadSpec zipf_spec(std::uint64_t objects, std::uint64_t accesses, double s = 1.1,
                       std::uint64_t seed = 5) {
    WorkloadSpec spec;
    spec.archetype = Archetype::StableZipf;
    spec.page_size = 4096;
    spec.num_objects = objects;
    spec.object_size = 4096;
    spec.total_accesses = accesses;
    spec.zipf_s = s;
    spec.seed = seed;
    return spec;
}

SimConfig small_config(PolicyKind kind = PolicyKind::Smooth) {
    SimConfig cfg;
    cfg.policy = default_policy_config(kind, 0.01);
    cfg.strategy.kind = StrategyKind::TimeBased;
    cfg.migration.tick_interval_samples = 50;
    cfg.fast_capacity_pages = 64;
    cfg.arena_pages = 1 << 16;
    cfg.timeline_buckets = 20;
    return cfg;
}

}  // namespace

TEST_CASE("timeline buckets sum exactly to the run totals") {
    Trace t = generate(zipf_spec(400, 100'000));
    SimConfig cfg = small_config();
    RunReport r = simulate(t, cfg);

    REQUIRE(r.timeline.size() == cfg.timeline_buckets);
    std::uint64_t acc = 0, hits = 0, promo = 0, demo = 0;
    for (const TimelineBucket& b : r.timeline) {
        acc += b.accesses;
        hits += b.fast_hits;
        promo += b.promotions;
        demo += b.demotions;
        CHECK(b.fast_hits <= b.accesses);
        if (b.accesses > 0)
            CHECK(b.hit_rate ==
                  doctest::Approx(static_cast<double>(b.fast_hits) / b.accesses));
    }
    CHECK(acc == r.total_accesses);
    CHECK(hits == r.fast_hits);
    CHECK(promo == r.promotions);
    CHECK(demo == r.demotions);
    CHECK(r.total_accesses == 100'000);
    CHECK(r.hit_rate == doctest::Approx(static_cast<double>(r.fast_hits) / r.total_accesses));
    CHECK(r.trace_errors == 0);
    CHECK(r.first_error_event == UINT64_MAX);
}

TEST_CASE("identical inputs serialize to identical bytes") {
    Trace t = generate(zipf_spec(300, 50'000));
    SimConfig cfg = small_config(PolicyKind::SawtoothQC);
    RunReport a = simulate(t, cfg);
    RunReport b = simulate(t, cfg);
    CHECK(report_json(a, cfg) == report_json(b, cfg));

    SimConfig other = cfg;
    other.seed = 2;  // different sampling stream
    other.sampling.rate = 4;
    cfg.sampling.rate = 4;
    RunReport c = simulate(t, cfg);
    RunReport d = simulate(t, other);
    CHECK(report_json(c, cfg) != report_json(d, other));
}

TEST_CASE("a zero-page fast tier still completes with zero hits") {
    Trace t = generate(zipf_spec(100, 20'000));
    SimConfig cfg = small_config();
    cfg.fast_capacity_pages = 0;
    RunReport r = simulate(t, cfg);
    CHECK(r.total_accesses == 20'000);
    CHECK(r.fast_hits == 0);
    CHECK(r.hit_rate == 0.0);
    CHECK(r.promotions == 0);
    CHECK(r.fast_resident_pages == 0);
}

TEST_CASE("malformed events are counted and excluded from totals") {
    Trace t;
    t.page_size = 4096;
    std::uint64_t ctx[1] = {0x1};
    t.push_alloc(1, 4096, ctx);
    t.push_access(1, 0);     // event 1: fine
    t.push_access(2, 0);     // event 2: unknown object
    t.push_access(1, 4096);  // event 3: offset out of bounds
    t.push_free(2);          // event 4: unknown free
    t.push_access(1, 1);     // event 5: fine

    SimConfig cfg = small_config();
    RunReport r = simulate(t, cfg);
    CHECK(r.trace_errors == 3);
    CHECK(r.first_error_event == 2);
    CHECK(r.total_accesses == 2);
    CHECK(r.pages_created == 1);
}

TEST_CASE("sampling thins what the policy sees, not the hit accounting") {
    Trace t = generate(zipf_spec(200, 100'000));
    SimConfig cfg = small_config();
    cfg.sampling.rate = 10;
    RunReport r = simulate(t, cfg);
    CHECK(r.total_accesses == 100'000);
    CHECK(r.observed_samples > 8'000);
    CHECK(r.observed_samples < 12'000);

    cfg.sampling.rate = 1;
    RunReport full = simulate(t, cfg);
    CHECK(full.observed_samples == 100'000);
}

TEST_CASE("tier occupancy reconciles with the migration ledger") {
    Trace t = generate(zipf_spec(500, 200'000, 0.8));
    SimConfig cfg = small_config(PolicyKind::SawtoothQC);
    RunReport r = simulate(t, cfg);
    std::uint64_t first_touch = std::min<std::uint64_t>(cfg.fast_capacity_pages, r.pages_created);
    CHECK(r.fast_resident_pages == first_touch + r.promotions - r.demotions);
    CHECK(r.fast_resident_pages <= cfg.fast_capacity_pages);
    CHECK(r.estimated_runtime_ns > 0);
}

TEST_CASE("every policy kind runs the same trace to completion") {
    Trace t = generate(zipf_spec(300, 60'000));
    for (PolicyKind kind : {PolicyKind::SawtoothDefault, PolicyKind::SawtoothQC,
                            PolicyKind::Smooth, PolicyKind::TwoInterval, PolicyKind::NumaHintOnce,
                            PolicyKind::NumaHintTwice, PolicyKind::NumaHintNoDemotion}) {
        SimConfig cfg = small_config(kind);
        RunReport r = simulate(t, cfg);
        CHECK(r.total_accesses == 60'000);
        CHECK(r.fast_hits <= r.total_accesses);
        CHECK(r.fast_resident_pages <= cfg.fast_capacity_pages);
    }
}

TEST_CASE("a fast tier that already fits everything never migrates") {
    Trace t = generate(zipf_spec(100, 50'000));
    SimConfig cfg = small_config(PolicyKind::NumaHintNoDemotion);
    cfg.fast_capacity_pages = 200;  // room to spare: watermarks never trip
    RunReport r = simulate(t, cfg);
    CHECK(r.hit_rate == 1.0);
    CHECK(r.promotions == 0);
    CHECK(r.demotions == 0);
    CHECK(r.thrash_page_count == 0);
}

TEST_CASE("a stable workload stops migrating once counters settle") {
    Trace t = generate(zipf_spec(300, 200'000, 1.3));
    SimConfig cfg = small_config();
    cfg.policy = default_policy_config(PolicyKind::Smooth, 0.1);
    cfg.migration.tick_interval_samples = 500;
    RunReport r = simulate(t, cfg);

    std::uint64_t late_migrations = 0;
    for (std::size_t i = r.timeline.size() / 2; i < r.timeline.size(); ++i)
        late_migrations += r.timeline[i].promotions + r.timeline[i].demotions;
    std::uint64_t early_migrations = r.promotions + r.demotions - late_migrations;
    CHECK(late_migrations < early_migrations / 4 + 10);
}

TEST_CASE("simulation rejects invalid run settings") {
    Trace t = generate(zipf_spec(10, 100));
    SimConfig cfg = small_config();
    cfg.timeline_buckets = 0;
    CHECK_THROWS_AS(simulate(t, cfg), InputError);

    cfg = small_config();
    cfg.migration.tick_interval_samples = 0;
    CHECK_THROWS_AS(simulate(t, cfg), InputError);

    cfg = small_config();
    cfg.sampling.rate = 0;
    CHECK_THROWS_AS(simulate(t, cfg), InputError);

    cfg = small_config();
    cfg.sampling.jitter = 1.5;
    CHECK_THROWS_AS(simulate(t, cfg), InputError);

    cfg = small_config();
    cfg.cost.capacity_latency_ns = 1.0;  // below fast latency
    CHECK_THROWS_AS(simulate(t, cfg), InputError);

    cfg = small_config();
    cfg.arena_pages = 4;  // cannot hold the population
    CHECK_THROWS_AS(simulate(t, cfg), InputError);
}

TEST_CASE("the json report carries config echo and timeline") {
    Trace t = generate(zipf_spec(50, 5'000));
    SimConfig cfg = small_config(PolicyKind::TwoInterval);
    RunReport r = simulate(t, cfg);
    std::string json = report_json(r, cfg);
    CHECK(json.find("\"policy\": \"two_interval\"") != std::string::npos);
    CHECK(json.find("\"strategy\": \"time\"") != std::string::npos);
    CHECK(json.find("\"timeline\"") != std::string::npos);
    CHECK(json.find("\"momentum_interval_samples\"") != std::string::npos);
    CHECK(json.find("first_error_event") == std::string::npos);  // clean run
    CHECK(json.back() == '\n');

    // An error run names the offending event.
    Trace bad;
    bad.page_size = 4096;
    std::uint64_t ctx[1] = {0x1};
    bad.push_alloc(1, 4096, ctx);
    bad.push_access(9, 0);
    for (int i = 0; i < 10; ++i) bad.push_access(1, 0);
    RunReport br = simulate(bad, cfg);
    std::string bjson = report_json(br, cfg);
    CHECK(bjson.find("\"first_error_event\": 1") != std::string::npos);
}

TEST_CASE("oracle placement beats time-based placement on skewed traffic") {
    WorkloadSpec spec = zipf_spec(2000, 200'000, 1.1);
    spec.object_size = 64;  // dozens of small objects share each page
    Trace t = generate(spec);

    SimConfig cfg = small_config(PolicyKind::Smooth);
    cfg.fast_capacity_pages = 8;
    RunReport time_based = simulate(t, cfg);

    SimConfig oracle = cfg;
    oracle.strategy.kind = StrategyKind::OraclePopularity;
    RunReport oracle_run = simulate(t, oracle);

    CHECK(oracle_run.hit_rate > time_based.hit_rate);
}
