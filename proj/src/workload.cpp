#include "tierlab/workload.hpp"

#include <algorithm>
#include <cmath>

#include "tierlab/rng.hpp"

namespace tierlab {

const char* archetype_name(Archetype a) {
    switch (a) {
        case Archetype::StableZipf: return "stable_zipf";
        case Archetype::PhaseChange: return "phase_change";
        case Archetype::Checkered: return "checkered";
        case Archetype::SmallObjectSkew: return "small_object_skew";
    }
    throw InvariantError("unreachable archetype");
}

Archetype archetype_from_name(const std::string& name) {
    for (Archetype a : {Archetype::StableZipf, Archetype::PhaseChange, Archetype::Checkered,
                        Archetype::SmallObjectSkew}) {
        if (name == archetype_name(a)) return a;
    }
    throw InputError("unknown workload archetype: " + name);
}

namespace {

// Inverse-CDF sampler over ranks 0..n-1 with weight (rank+1)^-s.
class ZipfTable {
public:
    ZipfTable(std::uint64_t n, double s) : cum_(n) {
        if (n == 0) throw InputError("zipf table needs at least one object");
        double acc = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            acc += std::pow(static_cast<double>(i + 1), -s);
            cum_[i] = acc;
        }
        total_ = acc;
    }

    std::uint64_t pick(double u) const {
        double target = u * total_;
        auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
        if (it == cum_.end()) return cum_.size() - 1;
        return static_cast<std::uint64_t>(it - cum_.begin());
    }

private:
    std::vector<double> cum_;
    double total_ = 0.0;
};

void check_common(const WorkloadSpec& spec) {
    if (spec.page_size < 16) throw InputError("page size must be >= 16 bytes");
    if (spec.archetype != Archetype::SmallObjectSkew) {
        if (spec.num_objects == 0) throw InputError("workload needs at least one object");
        if (spec.object_size == 0) throw InputError("object size must be >= 1 byte");
    }
}

// Fixed nominal backtrace for the single-context archetypes.
constexpr std::uint64_t kPlainContext[1] = {0x100};

Trace gen_stable_zipf(const WorkloadSpec& spec) {
    Trace t;
    t.page_size = spec.page_size;
    Rng rng = Rng(spec.seed).substream("workload");
    for (ObjectId id = 0; id < spec.num_objects; ++id)
        t.push_alloc(id, spec.object_size, kPlainContext);
    ZipfTable zipf(spec.num_objects, spec.zipf_s);
    for (std::uint64_t i = 0; i < spec.total_accesses; ++i) {
        ObjectId id = zipf.pick(rng.next_double());
        t.push_access(id, rng.bounded(spec.object_size));
    }
    return t;
}

Trace gen_phase_change(const WorkloadSpec& spec) {
    std::uint64_t n = spec.num_objects;
    std::uint64_t n_hot = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(n) * spec.hot_fraction));
    if (n_hot < 1 || 2 * n_hot > n)
        throw InputError("phase-change hotsets must be disjoint: need 1 <= round(num_objects * "
                         "hot_fraction) and twice that <= num_objects");
    if (!(spec.hot_share >= 0.0 && spec.hot_share <= 1.0))
        throw InputError("hot_share must be in [0, 1]");
    std::uint64_t switch_at = spec.switch_at == 0 ? spec.total_accesses / 2 : spec.switch_at;
    if (switch_at > spec.total_accesses)
        throw InputError("switch_at must not exceed total_accesses");

    Trace t;
    t.page_size = spec.page_size;
    Rng rng = Rng(spec.seed).substream("workload");
    for (ObjectId id = 0; id < n; ++id) t.push_alloc(id, spec.object_size, kPlainContext);
    for (std::uint64_t i = 0; i < spec.total_accesses; ++i) {
        // Hotset A is [0, n_hot), B is [n_hot, 2*n_hot). Draw structure is
        // identical in both phases (same bounds, same draw count), so a
        // truncated trace equals one generated with a later switch.
        std::uint64_t hot_lo = i < switch_at ? 0 : n_hot;
        ObjectId id;
        if (rng.next_double() < spec.hot_share) {
            id = hot_lo + rng.bounded(n_hot);
        } else {
            std::uint64_t r = rng.bounded(n - n_hot);
            id = r < hot_lo ? r : r + n_hot;
        }
        t.push_access(id, rng.bounded(spec.object_size));
    }
    return t;
}

Trace gen_checkered(const WorkloadSpec& spec) {
    std::uint64_t n = spec.num_objects;
    std::uint64_t k = spec.regions;
    if (k < 1) throw InputError("checkered workload needs at least one region");
    if (n < k) throw InputError("checkered workload needs num_objects >= regions");
    if (!(spec.region_share >= 0.0 && spec.region_share <= 1.0))
        throw InputError("region_share must be in [0, 1]");
    std::uint64_t phase_len =
        spec.phase_len == 0 ? std::max<std::uint64_t>(1, spec.total_accesses / k) : spec.phase_len;

    Trace t;
    t.page_size = spec.page_size;
    Rng rng = Rng(spec.seed).substream("workload");
    for (ObjectId id = 0; id < n; ++id) t.push_alloc(id, spec.object_size, kPlainContext);
    for (std::uint64_t i = 0; i < spec.total_accesses; ++i) {
        std::uint64_t hot_r = (i / phase_len) % k;
        std::uint64_t lo = hot_r * n / k;
        std::uint64_t hi = (hot_r + 1) * n / k;
        ObjectId id;
        // A single region has no complement to draw cold accesses from.
        if (hi - lo == n || rng.next_double() < spec.region_share) {
            id = lo + rng.bounded(hi - lo);
        } else {
            std::uint64_t r = rng.bounded(n - (hi - lo));
            id = r < lo ? r : r + (hi - lo);
        }
        t.push_access(id, rng.bounded(spec.object_size));
    }
    return t;
}

Trace gen_small_object_skew(const WorkloadSpec& spec) {
    const auto& ctxs = spec.contexts;
    if (ctxs.size() < 2) throw InputError("small-object workload needs >= 2 contexts");
    double share_sum = 0.0;
    for (const ContextSpec& c : ctxs) {
        if (c.objects == 0) throw InputError("every context needs at least one object");
        if (c.object_size == 0) throw InputError("context object size must be >= 1 byte");
        if (c.share < 0.0) throw InputError("context shares must be >= 0");
        share_sum += c.share;
    }
    if (std::abs(share_sum - 1.0) > 1e-6)
        throw InputError("context shares must sum to 1");

    Trace t;
    t.page_size = spec.page_size;
    Rng rng = Rng(spec.seed).substream("workload");

    // Backtraces: wrapper_frames shared innermost frames, then one caller
    // frame unique to the context.
    std::vector<std::vector<std::uint64_t>> frames(ctxs.size());
    for (std::size_t c = 0; c < ctxs.size(); ++c) {
        for (std::uint64_t w = 0; w < spec.wrapper_frames; ++w)
            frames[c].push_back(0x1000 + w);
        frames[c].push_back(0x2000 + c);
    }

    // Round-robin interleaved allocation order.
    std::vector<std::vector<ObjectId>> members(ctxs.size());
    std::vector<std::uint64_t> next(ctxs.size(), 0);
    ObjectId gid = 0;
    bool more = true;
    while (more) {
        more = false;
        for (std::size_t c = 0; c < ctxs.size(); ++c) {
            if (next[c] >= ctxs[c].objects) continue;
            ++next[c];
            more = true;
            members[c].push_back(gid);
            t.push_alloc(gid, ctxs[c].object_size, frames[c]);
            ++gid;
        }
    }

    std::vector<ZipfTable> zipf;
    zipf.reserve(ctxs.size());
    std::vector<double> cum_share(ctxs.size());
    double acc = 0.0;
    for (std::size_t c = 0; c < ctxs.size(); ++c) {
        zipf.emplace_back(ctxs[c].objects, ctxs[c].zipf_s);
        acc += ctxs[c].share;
        cum_share[c] = acc;
    }

    for (std::uint64_t i = 0; i < spec.total_accesses; ++i) {
        double u = rng.next_double() * acc;
        std::size_t c = static_cast<std::size_t>(
            std::upper_bound(cum_share.begin(), cum_share.end(), u) - cum_share.begin());
        if (c >= ctxs.size()) c = ctxs.size() - 1;
        ObjectId id = members[c][zipf[c].pick(rng.next_double())];
        t.push_access(id, rng.bounded(ctxs[c].object_size));
    }
    return t;
}

}  // namespace

Trace generate(const WorkloadSpec& spec) {
    check_common(spec);
    switch (spec.archetype) {
        case Archetype::StableZipf: return gen_stable_zipf(spec);
        case Archetype::PhaseChange: return gen_phase_change(spec);
        case Archetype::Checkered: return gen_checkered(spec);
        case Archetype::SmallObjectSkew: return gen_small_object_skew(spec);
    }
    throw InvariantError("unreachable archetype");
}

bool sample_observed(const SamplingModel& m, std::uint64_t seed, std::uint64_t event_seq) {
    if (m.rate < 1) throw InputError("sampling rate must be >= 1");
    if (m.rate == 1 && m.jitter == 0.0) return true;
    std::uint64_t h = mix64(seed ^ mix64(event_seq));
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    double rate = static_cast<double>(m.rate);
    if (m.jitter != 0.0) {
        std::uint64_t h2 = mix64(h ^ 0x6a09e667f3bcc909ull);
        double v = static_cast<double>(h2 >> 11) * 0x1.0p-53;
        rate *= 1.0 + m.jitter * (2.0 * v - 1.0);
        if (rate < 1.0) rate = 1.0;
    }
    return u * rate < 1.0;
}

}  // namespace tierlab
