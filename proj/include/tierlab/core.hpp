#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tierlab {

// Logical time: count of observed sample events since simulation start.
// Every interval in the simulator (cooling, adaptation, migration ticks,
// scan periods) is denominated in these ticks.
using LogicalTime = std::uint64_t;

// Dense page index, stable for the page's lifetime within a run.
using PageId = std::uint32_t;
inline constexpr PageId kNoPage = static_cast<PageId>(-1);

// Dense heap-object id from the trace.
using ObjectId = std::uint64_t;

// Invariant violations in simulator state. CLI maps these to exit code 1.
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed traces, specs, or configs. CLI maps these to exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

enum class TierKind : std::uint8_t { Fast, Capacity };

inline const char* tier_name(TierKind k) {
    return k == TierKind::Fast ? "fast" : "capacity";
}

struct Tier {
    TierKind kind = TierKind::Fast;
    std::uint64_t capacity_pages = 0;
    std::uint64_t resident_pages = 0;

    bool full() const { return resident_pages >= capacity_pages; }
};

enum class QueuedAs : std::uint8_t { None, Promotion, Demotion };

enum class Temperature : std::uint8_t { Hot, Warm, Cold };

inline constexpr int kBinCount = 16;

// Logarithmic hotness bin: floor(log2(v)) clamped to [0, 15]; values below
// 1 (including a never-touched counter) land in bin 0. Total function over
// v >= 0; fractional counters from smooth decay bin the same way.
int bin_index(double counter_value);

// Per-page access counter. base_at_cpstart is the counter value at the
// start of the current cooling period; accesses_in_period counts samples
// since. cooling_epoch_seen supports lazy (apply-on-next-access) decay.
struct CounterState {
    double base_at_cpstart = 0.0;
    std::uint64_t accesses_in_period = 0;
    LogicalTime cpstart = 0;
    std::uint64_t cooling_epoch_seen = 0;
};

struct Page {
    PageId id = kNoPage;
    TierKind tier = TierKind::Capacity;
    CounterState counter;
    std::uint8_t bin = 0;
    QueuedAs queued = QueuedAs::None;
    LogicalTime last_access = 0;
};

// A policy's request to move one page. Residency is re-checked at enqueue
// and again at migration time; stale intents are dropped.
struct Intent {
    enum class Kind : std::uint8_t { Promote, Demote };
    Kind kind = Kind::Promote;
    PageId page = kNoPage;
};

// Pages plus the two tiers they live in. Owned by one simulation run;
// policies and the migration engine share it by reference.
struct MachineState {
    std::vector<Page> pages;
    Tier fast{TierKind::Fast};
    Tier capacity{TierKind::Capacity};

    // Creates the next page, first-touch placed: fast tier while it has
    // room, capacity tier after.
    PageId add_page();

    Page& page(PageId id);
    const Page& page(PageId id) const;
};

// System-wide histogram: bins[b] counts tracked pages whose bin index is b.
// sum(bins) must always equal the number of tracked pages.
struct HotnessHistogram {
    std::array<std::uint64_t, kBinCount> bins{};
    int t_hot = kBinCount - 1;
    std::optional<int> t_warm;

    std::uint64_t total() const {
        std::uint64_t n = 0;
        for (auto b : bins) n += b;
        return n;
    }

    void add_page(int bin);
    void remove_page(int bin);

    // Moves one page between bins. Underflow of old_bin means the caller's
    // page state and the histogram disagree; that aborts the run.
    void move(int old_bin, int new_bin);
};

}  // namespace tierlab
