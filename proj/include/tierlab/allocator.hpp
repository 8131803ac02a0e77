#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tierlab/core.hpp"
#include "tierlab/trace.hpp"

namespace tierlab {

enum class StrategyKind : std::uint8_t { TimeBased, SizeBased, ContextBased, OraclePopularity };

const char* strategy_name(StrategyKind k);
StrategyKind strategy_kind_from_name(const std::string& name);

struct StrategyConfig {
    StrategyKind kind = StrategyKind::TimeBased;
    std::uint32_t depth = 10;     // ContextBased: frames hashed, innermost first
    std::uint32_t regions = 32;   // ContextBased: allocation regions
};

// Strictly increasing size classes: 4 geometric subclasses per power of two
// from 8 bytes up to the page size. A request maps to the smallest class
// that fits; requests above the page size get dedicated contiguous pages.
std::vector<std::uint64_t> size_class_table(std::uint64_t page_size);

// Stable hash of the first min(depth, frames.size()) frames, mod regions.
std::uint32_t context_region(std::span<const std::uint64_t> frames, std::uint32_t depth,
                             std::uint32_t regions);

struct Placement {
    PageId page = kNoPage;
    std::uint64_t offset = 0;  // byte offset within the first page
    std::uint64_t size = 0;
};

// Objects ordered by descending total access count, ties by id ascending.
// Objects never accessed rank last (count 0). Two-pass oracle input.
std::vector<std::pair<ObjectId, std::uint64_t>> oracle_ranking(const Trace& t);

// Object-to-page placement under one grouping strategy. Pages are carved
// from a bounded arena of dense PageIds; an object never spans pages unless
// it is larger than one, in which case it gets dedicated contiguous pages.
class Allocator {
public:
    Allocator(StrategyConfig cfg, std::uint64_t page_size, std::uint64_t arena_pages);

    // OraclePopularity only: pre-places every object in the trace by
    // descending popularity. Temporal reuse (free/realloc windows) is
    // ignored; every object gets a distinct extent.
    void prepare_oracle(const Trace& t);

    // Pre: id not live; size >= 1. Throws InputError when the arena is
    // exhausted or an oracle allocator sees an object it was not prepared
    // for.
    Placement alloc(ObjectId id, std::uint64_t size, std::span<const std::uint64_t> frames);

    // Returns false on unknown or already-freed id (trace error, caller
    // counts it); state is unchanged in that case.
    bool free(ObjectId id);

    bool live(ObjectId id) const { return live_.count(id) != 0; }
    const Placement* find(ObjectId id) const;

    PageId resolve(const Placement& p, std::uint64_t offset) const {
        return static_cast<PageId>(p.page + (p.offset + offset) / page_size_);
    }

    std::uint64_t page_size() const { return page_size_; }
    std::uint64_t pages_created() const { return next_page_; }
    std::uint64_t occupied_pages() const { return occupied_pages_; }
    std::uint64_t live_bytes() const { return live_bytes_; }

    // Live bytes over occupied page bytes; 1.0 for an empty heap.
    double fragmentation() const;

private:
    struct Slot {
        PageId page;
        std::uint64_t offset;
    };
    struct BumpState {
        PageId page = kNoPage;
        std::uint64_t offset = 0;
    };
    struct LiveObject {
        Placement placement;
        std::uint64_t bin_key;  // (region, class) free-list key; kNoBin for large
    };
    static constexpr std::uint64_t kNoBin = static_cast<std::uint64_t>(-1);

    PageId carve_pages(std::uint64_t n);
    Placement place_small(ObjectId id, std::uint64_t size, std::uint64_t bin_key,
                          BumpState& bump);
    Placement place_large(ObjectId id, std::uint64_t size);
    void note_live(PageId first_page, std::uint64_t bytes);
    void note_dead(PageId first_page, std::uint64_t bytes);

    StrategyConfig cfg_;
    std::uint64_t page_size_;
    std::uint64_t arena_pages_;
    std::uint64_t next_page_ = 0;
    std::vector<std::uint64_t> classes_;

    // TimeBased shares one bump cursor; Size/ContextBased keep one per
    // (region, size class) so groups never share pages.
    BumpState time_bump_;
    std::unordered_map<std::uint64_t, BumpState> group_bump_;
    std::unordered_map<std::uint64_t, std::vector<Slot>> free_lists_;

    std::unordered_map<ObjectId, LiveObject> live_;
    std::unordered_map<ObjectId, Placement> preplaced_;
    bool oracle_ready_ = false;

    std::vector<std::uint32_t> live_objects_per_page_;
    std::vector<std::uint64_t> live_bytes_per_page_;
    std::uint64_t occupied_pages_ = 0;
    std::uint64_t live_bytes_ = 0;
};

}  // namespace tierlab
