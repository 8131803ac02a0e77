#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "tierlab/allocator.hpp"
#include "tierlab/rng.hpp"
#include "tierlab/trace.hpp"

using namespace tierlab;

namespace {

Allocator make(StrategyKind kind, std::uint64_t page_size = 8192,
               std::uint64_t arena_pages = 1 << 16) {
    StrategyConfig cfg;
    cfg.kind = kind;
    return Allocator(cfg, page_size, arena_pages);
}

std::vector<std::uint64_t> frames(std::initializer_list<std::uint64_t> fs) { return fs; }

}  // namespace

TEST_CASE("size classes are strictly increasing with bounded waste") {
    for (std::uint64_t page : {4096ull, 8192ull, 65536ull}) {
        auto classes = size_class_table(page);
        REQUIRE(classes.size() >= 2);
        CHECK(classes.front() == 8);
        CHECK(classes.back() == page);
        for (std::size_t i = 1; i < classes.size(); ++i) CHECK(classes[i] > classes[i - 1]);
        for (std::uint64_t size = 1; size <= page; size += 7) {
            auto it = std::lower_bound(classes.begin(), classes.end(), size);
            REQUIRE(it != classes.end());
            CHECK(*it >= size);
            CHECK(*it <= std::max<std::uint64_t>(8, (size * 4 + 2) / 3));
        }
    }
    CHECK_THROWS_AS(size_class_table(8), InputError);
}

TEST_CASE("context hashing is deterministic and truncates at depth") {
    auto a = frames({0x10, 0x20, 0x30, 0x40});
    auto b = frames({0x10, 0x20, 0x99, 0x77});
    CHECK(context_region(a, 4, 32) == context_region(a, 4, 32));
    CHECK(context_region(a, 2, 32) == context_region(b, 2, 32));
    CHECK(context_region(a, 8, 32) == context_region(a, 4, 32));  // depth past the stack
    bool differs = false;  // innermost frames differ at depth >= 3 for some region count
    for (std::uint32_t regions : {32u, 33u, 64u, 1024u})
        differs |= context_region(a, 3, regions) != context_region(b, 3, regions);
    CHECK(differs);
    CHECK(context_region(a, 4, 1) == 0);
    CHECK_THROWS_AS(context_region(a, 0, 32), InputError);
    CHECK_THROWS_AS(context_region(a, 4, 0), InputError);
}

TEST_CASE("shared-cursor grouping co-locates mixed sizes, size grouping separates them") {
    auto time = make(StrategyKind::TimeBased);
    Placement small = time.alloc(1, 64, frames({0x1}));
    Placement big = time.alloc(2, 4000, frames({0x2}));
    CHECK(small.page == big.page);

    auto size = make(StrategyKind::SizeBased);
    Placement s1 = size.alloc(1, 64, frames({0x1}));
    Placement s2 = size.alloc(2, 4000, frames({0x2}));
    CHECK(s1.page != s2.page);
    Placement s3 = size.alloc(3, 64, frames({0x3}));
    CHECK(s3.page == s1.page);
}

TEST_CASE("context grouping keys pages by call stack") {
    auto a = frames({0xaaa, 0xbbb, 0xccc});
    auto b = frames({0xaaa, 0xbbb, 0xddd});
    StrategyConfig cfg;
    cfg.kind = StrategyKind::ContextBased;
    cfg.depth = 3;
    cfg.regions = 64;
    REQUIRE(context_region(a, cfg.depth, cfg.regions) !=
            context_region(b, cfg.depth, cfg.regions));

    Allocator alloc(cfg, 8192, 1 << 16);
    Placement p1 = alloc.alloc(1, 64, a);
    Placement p2 = alloc.alloc(2, 64, a);
    Placement p3 = alloc.alloc(3, 64, b);
    CHECK(p1.page == p2.page);
    CHECK(p1.page != p3.page);
}

TEST_CASE("freed slots are reused most-recent-first") {
    auto alloc = make(StrategyKind::TimeBased);
    Placement a = alloc.alloc(1, 100, {});
    Placement b = alloc.alloc(2, 100, {});
    REQUIRE(alloc.free(1));
    REQUIRE(alloc.free(2));
    Placement c = alloc.alloc(3, 100, {});
    Placement d = alloc.alloc(4, 100, {});
    CHECK(c.page == b.page);
    CHECK(c.offset == b.offset);
    CHECK(d.page == a.page);
    CHECK(d.offset == a.offset);
}

TEST_CASE("free rejects unknown and double frees without state damage") {
    auto alloc = make(StrategyKind::TimeBased);
    CHECK_FALSE(alloc.free(7));
    alloc.alloc(7, 64, {});
    CHECK(alloc.live(7));
    CHECK(alloc.free(7));
    CHECK_FALSE(alloc.free(7));
    CHECK_FALSE(alloc.live(7));
    CHECK(alloc.find(7) == nullptr);
    CHECK(alloc.live_bytes() == 0);
}

TEST_CASE("alloc validates size and liveness") {
    auto alloc = make(StrategyKind::TimeBased);
    CHECK_THROWS_AS(alloc.alloc(1, 0, {}), InputError);
    alloc.alloc(1, 64, {});
    CHECK_THROWS_AS(alloc.alloc(1, 64, {}), InvariantError);
}

TEST_CASE("occupancy tracks page fill and drain exactly") {
    auto alloc = make(StrategyKind::TimeBased);
    const std::uint64_t slots = 8192 / 64;
    for (std::uint64_t i = 0; i < slots; ++i) alloc.alloc(i, 64, {});
    CHECK(alloc.pages_created() == 1);
    CHECK(alloc.occupied_pages() == 1);
    CHECK(alloc.live_bytes() == slots * 64);
    CHECK(alloc.fragmentation() == doctest::Approx(1.0));

    for (std::uint64_t i = 0; i < slots; ++i) REQUIRE(alloc.free(i));
    CHECK(alloc.occupied_pages() == 0);
    CHECK(alloc.live_bytes() == 0);
    CHECK(alloc.fragmentation() == doctest::Approx(1.0));  // empty heap reads as dense

    for (std::uint64_t i = 0; i < slots; ++i) alloc.alloc(100 + i, 64, {});
    CHECK(alloc.pages_created() == 1);  // every slot came from the free list
    CHECK(alloc.occupied_pages() == 1);
}

TEST_CASE("one lightly used page reports its true density") {
    auto alloc = make(StrategyKind::TimeBased);
    alloc.alloc(1, 64, {});
    CHECK(alloc.fragmentation() == doctest::Approx(64.0 / 8192.0));
}

TEST_CASE("live extents never overlap under random churn") {
    for (StrategyKind kind :
         {StrategyKind::TimeBased, StrategyKind::SizeBased, StrategyKind::ContextBased}) {
        StrategyConfig cfg;
        cfg.kind = kind;
        Allocator alloc(cfg, 4096, 1 << 16);
        Rng rng(42);
        std::vector<ObjectId> live;
        ObjectId next_id = 0;
        for (int step = 0; step < 4000; ++step) {
            bool do_free = !live.empty() && rng.bounded(100) < 40;
            if (do_free) {
                std::size_t i = rng.bounded(live.size());
                REQUIRE(alloc.free(live[i]));
                live[i] = live.back();
                live.pop_back();
            } else {
                std::uint64_t size = 1 + rng.bounded(9000);  // some span multiple pages
                std::uint64_t fs[2] = {rng.bounded(8), rng.bounded(8)};
                alloc.alloc(next_id, size, fs);
                live.push_back(next_id++);
            }
        }
        std::vector<std::pair<std::uint64_t, std::uint64_t>> extents;
        std::uint64_t bytes = 0;
        for (ObjectId id : live) {
            const Placement* p = alloc.find(id);
            REQUIRE(p != nullptr);
            std::uint64_t start = p->page * 4096 + p->offset;
            extents.emplace_back(start, start + p->size);
            bytes += p->size;
        }
        std::sort(extents.begin(), extents.end());
        for (std::size_t i = 1; i < extents.size(); ++i)
            REQUIRE(extents[i].first >= extents[i - 1].second);
        CHECK(alloc.live_bytes() == bytes);
    }
}

TEST_CASE("a context group packs onto the minimum page count") {
    StrategyConfig cfg;
    cfg.kind = StrategyKind::ContextBased;
    cfg.depth = 2;
    cfg.regions = 16;
    Allocator alloc(cfg, 4096, 1 << 16);  // 64 slots of 64 bytes per page
    auto stack = frames({0x500, 0x600});
    std::set<PageId> pages;
    for (ObjectId id = 0; id < 130; ++id) {
        Placement p = alloc.alloc(id, 64, stack);
        pages.insert(p.page);
    }
    CHECK(pages.size() == 3);  // ceil(130 / 64)
}

TEST_CASE("popularity ranking orders by count then id, absent counts last") {
    Trace t;
    t.page_size = 8192;
    auto ev = [&](EventKind k, ObjectId id, std::uint64_t arg) {
        TraceEvent e;
        e.kind = k;
        e.id = id;
        e.arg = arg;
        t.events.push_back(e);
    };
    for (ObjectId id : {1, 2, 3, 4}) ev(EventKind::Alloc, id, 64);
    for (int i = 0; i < 5; ++i) ev(EventKind::Access, 3, 0);
    for (int i = 0; i < 5; ++i) ev(EventKind::Access, 1, 0);
    for (int i = 0; i < 7; ++i) ev(EventKind::Access, 2, 0);

    auto ranked = oracle_ranking(t);
    REQUIRE(ranked.size() == 4);
    CHECK(ranked[0] == std::pair<ObjectId, std::uint64_t>{2, 7});
    CHECK(ranked[1] == std::pair<ObjectId, std::uint64_t>{1, 5});  // tie with 3, lower id first
    CHECK(ranked[2] == std::pair<ObjectId, std::uint64_t>{3, 5});
    CHECK(ranked[3] == std::pair<ObjectId, std::uint64_t>{4, 0});
}

TEST_CASE("oracle preplacement puts the hottest object at the arena start") {
    Trace t;
    t.page_size = 8192;
    auto ev = [&](EventKind k, ObjectId id, std::uint64_t arg) {
        TraceEvent e;
        e.kind = k;
        e.id = id;
        e.arg = arg;
        t.events.push_back(e);
    };
    ev(EventKind::Alloc, 10, 64);
    ev(EventKind::Alloc, 11, 64);
    ev(EventKind::Access, 11, 0);
    ev(EventKind::Access, 11, 0);
    ev(EventKind::Access, 10, 0);

    auto alloc = make(StrategyKind::OraclePopularity);
    alloc.prepare_oracle(t);
    Placement hot = alloc.alloc(11, 64, {});
    Placement warm = alloc.alloc(10, 64, {});
    CHECK(hot.page == 0);
    CHECK(hot.offset == 0);
    CHECK(warm.page == 0);
    CHECK(warm.offset == 64);

    CHECK_THROWS_AS(alloc.alloc(99, 64, {}), InputError);  // never seen in the prepass

    auto cold = make(StrategyKind::OraclePopularity);
    CHECK_THROWS_AS(cold.alloc(11, 64, {}), InvariantError);

    auto wrong = make(StrategyKind::TimeBased);
    CHECK_THROWS_AS(wrong.prepare_oracle(t), InvariantError);
}

TEST_CASE("objects larger than a page get dedicated contiguous pages") {
    auto alloc = make(StrategyKind::TimeBased);
    alloc.alloc(1, 64, {});
    Placement big = alloc.alloc(2, 20000, {});  // 3 pages at 8192
    CHECK(big.offset == 0);
    CHECK(alloc.pages_created() == 4);
    CHECK(alloc.resolve(big, 0) == big.page);
    CHECK(alloc.resolve(big, 8192) == big.page + 1);
    CHECK(alloc.resolve(big, 19999) == big.page + 2);
    CHECK(alloc.occupied_pages() == 4);
    REQUIRE(alloc.free(2));
    CHECK(alloc.occupied_pages() == 1);
}

TEST_CASE("a bounded arena rejects growth past its page budget") {
    auto alloc = make(StrategyKind::TimeBased, 8192, 2);
    alloc.alloc(1, 8192, {});
    alloc.alloc(2, 8192, {});
    CHECK_THROWS_AS(alloc.alloc(3, 8192, {}), InputError);
    CHECK(alloc.pages_created() == 2);
}

TEST_CASE("strategy names round-trip") {
    for (StrategyKind k : {StrategyKind::TimeBased, StrategyKind::SizeBased,
                           StrategyKind::ContextBased, StrategyKind::OraclePopularity})
        CHECK(strategy_kind_from_name(strategy_name(k)) == k);
    CHECK_THROWS_AS(strategy_kind_from_name("random"), InputError);
}
