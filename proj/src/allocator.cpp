#include "tierlab/allocator.hpp"

#include <algorithm>

#include "tierlab/rng.hpp"

namespace tierlab {

const char* strategy_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::TimeBased: return "time";
        case StrategyKind::SizeBased: return "size";
        case StrategyKind::ContextBased: return "context";
        case StrategyKind::OraclePopularity: return "oracle";
    }
    return "?";
}

StrategyKind strategy_kind_from_name(const std::string& name) {
    for (StrategyKind k : {StrategyKind::TimeBased, StrategyKind::SizeBased,
                           StrategyKind::ContextBased, StrategyKind::OraclePopularity}) {
        if (name == strategy_name(k)) return k;
    }
    throw InputError("unknown allocation strategy: " + name);
}

std::vector<std::uint64_t> size_class_table(std::uint64_t page_size) {
    if (page_size < 16) throw InputError("page size too small for size classes");
    std::vector<std::uint64_t> classes;
    for (std::uint64_t base = 8; base < page_size; base *= 2) {
        std::uint64_t step = std::max<std::uint64_t>(base / 4, 1);
        for (int i = 0; i < 4; ++i) {
            std::uint64_t c = base + step * static_cast<std::uint64_t>(i);
            if (c >= page_size) break;
            classes.push_back(c);
        }
    }
    classes.push_back(page_size);
    return classes;
}

std::uint32_t context_region(std::span<const std::uint64_t> frames, std::uint32_t depth,
                             std::uint32_t regions) {
    if (depth < 1 || regions < 1) throw InputError("context grouping needs depth/regions >= 1");
    std::uint64_t h = 0x1ef7'51d3'2b1c'9a55ull;
    std::size_t k = std::min<std::size_t>(depth, frames.size());
    for (std::size_t i = 0; i < k; ++i) h = hash_combine(h, frames[i]);
    return static_cast<std::uint32_t>(h % regions);
}

std::vector<std::pair<ObjectId, std::uint64_t>> oracle_ranking(const Trace& t) {
    std::unordered_map<ObjectId, std::uint64_t> counts;
    for (const auto& e : t.events) {
        if (e.kind == EventKind::Alloc) counts.emplace(e.id, 0);
        else if (e.kind == EventKind::Access) ++counts[e.id];
    }
    std::vector<std::pair<ObjectId, std::uint64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranked;
}

Allocator::Allocator(StrategyConfig cfg, std::uint64_t page_size, std::uint64_t arena_pages)
    : cfg_(cfg), page_size_(page_size), arena_pages_(arena_pages),
      classes_(size_class_table(page_size)) {
    if (cfg.kind == StrategyKind::ContextBased && (cfg.depth < 1 || cfg.regions < 1))
        throw InputError("context grouping needs depth/regions >= 1");
}

PageId Allocator::carve_pages(std::uint64_t n) {
    if (next_page_ + n > arena_pages_)
        throw InputError("simulation arena exhausted (" + std::to_string(arena_pages_) +
                         " pages)");
    PageId first = static_cast<PageId>(next_page_);
    next_page_ += n;
    live_objects_per_page_.resize(next_page_, 0);
    live_bytes_per_page_.resize(next_page_, 0);
    return first;
}

void Allocator::note_live(PageId first_page, std::uint64_t bytes) {
    live_bytes_ += bytes;
    for (PageId p = first_page; bytes > 0; ++p) {
        std::uint64_t part = std::min(bytes, page_size_);
        if (live_objects_per_page_[p]++ == 0) ++occupied_pages_;
        live_bytes_per_page_[p] += part;
        bytes -= part;
    }
}

void Allocator::note_dead(PageId first_page, std::uint64_t bytes) {
    live_bytes_ -= bytes;
    for (PageId p = first_page; bytes > 0; ++p) {
        std::uint64_t part = std::min(bytes, page_size_);
        if (--live_objects_per_page_[p] == 0) --occupied_pages_;
        live_bytes_per_page_[p] -= part;
        bytes -= part;
    }
}

Placement Allocator::place_small(ObjectId id, std::uint64_t size, std::uint64_t key,
                                 BumpState& bump) {
    auto cls = std::lower_bound(classes_.begin(), classes_.end(), size);
    std::uint64_t slot_bytes = *cls;

    Placement pl;
    auto& freed = free_lists_[key];
    if (!freed.empty()) {
        Slot s = freed.back();
        freed.pop_back();
        pl = {s.page, s.offset, size};
    } else {
        if (bump.page == kNoPage || bump.offset + slot_bytes > page_size_) {
            bump.page = carve_pages(1);
            bump.offset = 0;
        }
        pl = {bump.page, bump.offset, size};
        bump.offset += slot_bytes;
    }
    live_[id] = {pl, key};
    note_live(pl.page, size);
    return pl;
}

Placement Allocator::place_large(ObjectId id, std::uint64_t size) {
    std::uint64_t n = (size + page_size_ - 1) / page_size_;
    Placement pl{carve_pages(n), 0, size};
    live_[id] = {pl, kNoBin};
    note_live(pl.page, size);
    return pl;
}

Placement Allocator::alloc(ObjectId id, std::uint64_t size,
                           std::span<const std::uint64_t> frames) {
    if (size == 0) throw InputError("zero-size allocation");
    if (live_.count(id))
        throw InvariantError("object " + std::to_string(id) + " allocated while live");

    if (cfg_.kind == StrategyKind::OraclePopularity) {
        if (!oracle_ready_) throw InvariantError("oracle allocator used without preparation");
        auto it = preplaced_.find(id);
        if (it == preplaced_.end())
            throw InputError("object " + std::to_string(id) + " absent from oracle prepass");
        live_[id] = {it->second, kNoBin};
        note_live(it->second.page, size);
        return it->second;
    }

    if (size > page_size_) return place_large(id, size);

    std::uint64_t class_idx = static_cast<std::uint64_t>(
        std::lower_bound(classes_.begin(), classes_.end(), size) - classes_.begin());
    switch (cfg_.kind) {
        case StrategyKind::TimeBased:
            // One shared cursor: pages fill in allocation order regardless
            // of size or context. Free lists still group by class so a
            // freed slot is only reused by a request it can hold.
            return place_small(id, size, class_idx, time_bump_);
        case StrategyKind::SizeBased:
            return place_small(id, size, class_idx, group_bump_[class_idx]);
        case StrategyKind::ContextBased: {
            std::uint64_t region = context_region(frames, cfg_.depth, cfg_.regions);
            std::uint64_t key = region * classes_.size() + class_idx;
            return place_small(id, size, key, group_bump_[key]);
        }
        default:
            throw InvariantError("unreachable strategy");
    }
}

bool Allocator::free(ObjectId id) {
    auto it = live_.find(id);
    if (it == live_.end()) return false;
    const LiveObject& obj = it->second;
    if (obj.bin_key != kNoBin)
        free_lists_[obj.bin_key].push_back({obj.placement.page, obj.placement.offset});
    note_dead(obj.placement.page, obj.placement.size);
    live_.erase(it);
    return true;
}

const Placement* Allocator::find(ObjectId id) const {
    auto it = live_.find(id);
    return it == live_.end() ? nullptr : &it->second.placement;
}

void Allocator::prepare_oracle(const Trace& t) {
    if (cfg_.kind != StrategyKind::OraclePopularity)
        throw InvariantError("oracle prepass on a non-oracle allocator");
    std::unordered_map<ObjectId, std::uint64_t> sizes;
    for (const auto& e : t.events)
        if (e.kind == EventKind::Alloc) sizes.emplace(e.id, e.arg);

    BumpState bump;
    for (const auto& [id, count] : oracle_ranking(t)) {
        std::uint64_t size = sizes.at(id);
        if (size == 0) continue;  // rejected again at replay, counted there
        if (size > page_size_) {
            std::uint64_t n = (size + page_size_ - 1) / page_size_;
            preplaced_[id] = {carve_pages(n), 0, size};
            continue;
        }
        auto cls = std::lower_bound(classes_.begin(), classes_.end(), size);
        std::uint64_t slot_bytes = *cls;
        if (bump.page == kNoPage || bump.offset + slot_bytes > page_size_) {
            bump.page = carve_pages(1);
            bump.offset = 0;
        }
        preplaced_[id] = {bump.page, bump.offset, size};
        bump.offset += slot_bytes;
    }
    oracle_ready_ = true;
}

double Allocator::fragmentation() const {
    if (occupied_pages_ == 0) return 1.0;
    return static_cast<double>(live_bytes_) /
           static_cast<double>(occupied_pages_ * page_size_);
}

}  // namespace tierlab
