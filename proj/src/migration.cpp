#include "tierlab/migration.hpp"

#include <algorithm>
#include <tuple>

#include "tierlab/policies.hpp"

namespace tierlab {

void MigrationEngine::register_page(PageId id) {
    if (id >= last_dir_.size()) {
        last_dir_.resize(id + 1, 0);
        dir_changes_.resize(id + 1, 0);
    }
}

void MigrationEngine::enqueue(const Intent& intent) {
    Page& p = mach_.page(intent.page);
    if (p.queued != QueuedAs::None) return;
    if (intent.kind == Intent::Kind::Promote) {
        if (p.tier != TierKind::Capacity) return;
        p.queued = QueuedAs::Promotion;
        promo_.push_back({p.id, p.last_access});
    } else {
        if (p.tier != TierKind::Fast) return;
        p.queued = QueuedAs::Demotion;
        demo_.push_back({p.id, p.last_access});
    }
}

bool MigrationEngine::demotion_entry_valid(const QueueEntry& e, const Policy& policy) const {
    const Page& p = mach_.page(e.page);
    return p.tier == TierKind::Fast && p.queued == QueuedAs::Demotion &&
           policy.revalidate_demotion(e.page, e.enqueued_last_access);
}

PageId MigrationEngine::take_demotion_victim(const Policy& policy) {
    auto best = demo_.end();
    double best_value = 0.0;
    LogicalTime best_age = 0;
    for (auto it = demo_.begin(); it != demo_.end(); ++it) {
        if (!demotion_entry_valid(*it, policy)) continue;
        double value = policy.counter_value(it->page);
        LogicalTime age = mach_.page(it->page).last_access;
        if (best == demo_.end() || std::tie(value, age, it->page) <
                                       std::tie(best_value, best_age, best->page)) {
            best = it;
            best_value = value;
            best_age = age;
        }
    }
    if (best == demo_.end()) return kNoPage;
    PageId victim = best->page;
    demo_.erase(best);
    return victim;
}

void MigrationEngine::move_page(Page& p, TierKind to, Policy& policy) {
    Tier& from = p.tier == TierKind::Fast ? mach_.fast : mach_.capacity;
    Tier& dest = to == TierKind::Fast ? mach_.fast : mach_.capacity;
    if (from.kind == dest.kind) throw InvariantError("page moved to its own tier");
    if (from.resident_pages == 0) throw InvariantError("tier occupancy underflow");
    if (dest.full()) throw InvariantError("migration would overfill a tier");
    --from.resident_pages;
    ++dest.resident_pages;
    p.tier = to;
    p.queued = QueuedAs::None;

    std::uint8_t dir = to == TierKind::Fast ? 1 : 2;
    if (last_dir_[p.id] != 0 && last_dir_[p.id] != dir) ++dir_changes_[p.id];
    last_dir_[p.id] = dir;

    policy.on_migrated(p.id, to);
}

void MigrationEngine::tick(Policy& policy) {
    std::uint64_t moved = 0;
    auto budget_left = [&] {
        return cfg_.max_migrations_per_tick == 0 || moved < cfg_.max_migrations_per_tick;
    };

    while (!promo_.empty() && budget_left()) {
        QueueEntry e = promo_.front();
        Page& p = mach_.page(e.page);
        if (p.tier != TierKind::Capacity || p.queued != QueuedAs::Promotion ||
            !policy.revalidate_promotion(e.page)) {
            promo_.pop_front();
            if (p.queued == QueuedAs::Promotion) p.queued = QueuedAs::None;
            ++stats_.revalidation_drops;
            continue;
        }
        if (mach_.fast.full()) {
            PageId victim = take_demotion_victim(policy);
            if (victim == kNoPage) break;  // no room; head waits for a later tick
            move_page(mach_.page(victim), TierKind::Capacity, policy);
            ++stats_.demotions;
            ++moved;
            if (!budget_left()) break;
        }
        promo_.pop_front();
        move_page(p, TierKind::Fast, policy);
        ++stats_.promotions;
        ++moved;
    }

    while (!demo_.empty() && budget_left()) {
        QueueEntry e = demo_.front();
        demo_.pop_front();
        Page& p = mach_.page(e.page);
        if (!((p.tier == TierKind::Fast) && p.queued == QueuedAs::Demotion &&
              policy.revalidate_demotion(e.page, e.enqueued_last_access))) {
            if (p.queued == QueuedAs::Demotion) p.queued = QueuedAs::None;
            ++stats_.revalidation_drops;
            continue;
        }
        move_page(p, TierKind::Capacity, policy);
        ++stats_.demotions;
        ++moved;
    }
}

std::uint64_t MigrationEngine::thrash_page_count() const {
    return static_cast<std::uint64_t>(
        std::count_if(dir_changes_.begin(), dir_changes_.end(),
                      [](std::uint32_t c) { return c >= 2; }));
}

}  // namespace tierlab
