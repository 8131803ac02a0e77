#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "tierlab/core.hpp"

namespace tierlab {

class Policy;

struct MigrationConfig {
    // Ticks fire every N observed samples; the logical analogue of a
    // fixed-period background migration thread.
    LogicalTime tick_interval_samples = 5000;
    // 0 means unlimited: a tick drains everything it can.
    std::uint64_t max_migrations_per_tick = 0;
};

struct MigrationStats {
    std::uint64_t promotions = 0;
    std::uint64_t demotions = 0;
    std::uint64_t revalidation_drops = 0;
};

// Queue entries remember the page's last_access at enqueue time so a
// demotion can be dropped if the page was touched while it waited.
struct QueueEntry {
    PageId page = kNoPage;
    LogicalTime enqueued_last_access = 0;
};

// FIFO promotion/demotion queues with re-validation at migration time.
// A page appears at most once across both queues (Page.queued).
class MigrationEngine {
public:
    MigrationEngine(MachineState& mach, MigrationConfig cfg) : mach_(mach), cfg_(cfg) {}

    void register_page(PageId id);

    // Appends to the matching queue when eligible: promotion needs capacity
    // residency, demotion fast residency, and the page must not already be
    // queued. Stale or duplicate intents are ignored.
    void enqueue(const Intent& intent);

    // Promotions first: each head is re-validated against the policy; when
    // the fast tier is full, the coldest still-valid demotion candidate is
    // demoted to make room, and if none exists the head stays queued for a
    // later tick. Afterwards the demotion queue is drained.
    void tick(Policy& policy);

    const MigrationConfig& config() const { return cfg_; }
    const MigrationStats& stats() const { return stats_; }
    std::uint64_t thrash_page_count() const;
    std::size_t promotion_queue_size() const { return promo_.size(); }
    std::size_t demotion_queue_size() const { return demo_.size(); }

private:
    bool demotion_entry_valid(const QueueEntry& e, const Policy& policy) const;
    // Erases and returns the best victim in the demotion queue, kNoPage if
    // none is valid. Order: lowest counter, then oldest last_access, then id.
    PageId take_demotion_victim(const Policy& policy);
    void move_page(Page& p, TierKind to, Policy& policy);

    MachineState& mach_;
    MigrationConfig cfg_;
    std::deque<QueueEntry> promo_;
    std::deque<QueueEntry> demo_;
    MigrationStats stats_;
    // 0 = never moved, 1 = last move was a promotion, 2 = a demotion.
    std::vector<std::uint8_t> last_dir_;
    std::vector<std::uint32_t> dir_changes_;
};

}  // namespace tierlab
