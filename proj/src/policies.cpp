#include "tierlab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace tierlab {

const char* policy_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::SawtoothDefault: return "sawtooth_default";
        case PolicyKind::SawtoothQC: return "sawtooth_qc";
        case PolicyKind::Smooth: return "smooth";
        case PolicyKind::TwoInterval: return "two_interval";
        case PolicyKind::NumaHintOnce: return "numa_hint_once";
        case PolicyKind::NumaHintTwice: return "numa_hint_twice";
        case PolicyKind::NumaHintNoDemotion: return "numa_hint_no_demotion";
    }
    throw InvariantError("unreachable policy kind");
}

PolicyKind policy_kind_from_name(const std::string& name) {
    for (PolicyKind k : {PolicyKind::SawtoothDefault, PolicyKind::SawtoothQC, PolicyKind::Smooth,
                         PolicyKind::TwoInterval, PolicyKind::NumaHintOnce, PolicyKind::NumaHintTwice,
                         PolicyKind::NumaHintNoDemotion}) {
        if (name == policy_name(k)) return k;
    }
    throw InputError("unknown policy: " + name);
}

const char* numa_demotion_name(NumaDemotionKind k) {
    return k == NumaDemotionKind::LruWatermark ? "lru_watermark" : "none";
}

NumaDemotionKind numa_demotion_from_name(const std::string& name) {
    if (name == "lru_watermark") return NumaDemotionKind::LruWatermark;
    if (name == "none") return NumaDemotionKind::None;
    throw InputError("unknown numa demotion mode: " + name);
}

std::uint64_t scaled_interval(double base, double scale) {
    double v = base * scale;
    if (v < 1.0) return 1;
    return static_cast<std::uint64_t>(std::llround(v));
}

namespace {

void validate_common(const PolicyConfig& cfg) {
    if (cfg.cooling.interval_samples < 1) throw InputError("cooling interval must be >= 1 sample");
    if (!(cfg.cooling.decay_factor > 0.0 && cfg.cooling.decay_factor <= 1.0))
        throw InputError("decay factor must be in (0, 1]");
    if (cfg.thresholds.adapt_interval_samples < 1)
        throw InputError("adaptation interval must be >= 1 sample");
    if (cfg.thresholds.warm_disable_fraction < 0.0)
        throw InputError("warm disable fraction must be >= 0");
    if (cfg.cooling.trigger == CoolingTrigger::MaxCounter) {
        if (cfg.cooling.decay_shape != DecayShape::Step)
            throw InputError("max-counter cooling requires the stepped decay shape");
        if (cfg.cooling.max_counter_threshold < 2.0)
            throw InputError("max-counter trigger threshold must be >= 2");
    }
}

}  // namespace

PolicyConfig default_policy_config(PolicyKind kind, double scale) {
    if (!(scale > 0.0)) throw InputError("interval scale must be positive");
    PolicyConfig cfg;
    cfg.kind = kind;
    cfg.thresholds.adapt_interval_samples = scaled_interval(100'000, scale);
    cfg.numa.scan_interval_samples = scaled_interval(100'000, scale);
    cfg.two_interval.momentum_interval_samples = scaled_interval(500'000, scale);
    cfg.two_interval.frequency_interval_samples = scaled_interval(80'000'000, scale);
    switch (kind) {
        case PolicyKind::SawtoothDefault:
            cfg.cooling.interval_samples = scaled_interval(2'000'000, scale);
            cfg.cooling.decay_shape = DecayShape::Step;
            break;
        case PolicyKind::SawtoothQC:
            cfg.cooling.interval_samples = scaled_interval(120'000, scale);
            cfg.cooling.decay_shape = DecayShape::Step;
            break;
        case PolicyKind::Smooth:
            cfg.cooling.interval_samples = scaled_interval(120'000, scale);
            cfg.cooling.decay_shape = DecayShape::LinearSmooth;
            break;
        case PolicyKind::TwoInterval:
            cfg.cooling.interval_samples = cfg.two_interval.frequency_interval_samples;
            cfg.cooling.decay_shape = DecayShape::Step;
            cfg.thresholds.adapt_interval_samples = cfg.two_interval.momentum_interval_samples;
            break;
        case PolicyKind::NumaHintOnce:
            cfg.numa.hot_fault_threshold = 1;
            cfg.numa.demotion = NumaDemotionKind::LruWatermark;
            break;
        case PolicyKind::NumaHintTwice:
            cfg.numa.hot_fault_threshold = 2;
            cfg.numa.demotion = NumaDemotionKind::LruWatermark;
            break;
        case PolicyKind::NumaHintNoDemotion:
            cfg.numa.hot_fault_threshold = 1;
            cfg.numa.demotion = NumaDemotionKind::None;
            break;
    }
    return cfg;
}

// --- HistogramPolicy --------------------------------------------------------

HistogramPolicy::HistogramPolicy(const PolicyConfig& cfg, MachineState& mach)
    : cfg_(cfg), mach_(mach) {
    validate_common(cfg_);
    bool wants_smooth = cfg_.kind == PolicyKind::Smooth;
    if (wants_smooth && cfg_.cooling.decay_shape == DecayShape::Step)
        throw InputError("policy 'smooth' requires a linear or exponential decay shape");
    if (!wants_smooth && cfg_.cooling.decay_shape != DecayShape::Step)
        throw InputError(std::string("policy '") + policy_name(cfg_.kind) +
                         "' requires the stepped decay shape");
    next_cool_at_ = cfg_.cooling.trigger == CoolingTrigger::EverySamples
                        ? cfg_.cooling.interval_samples
                        : std::numeric_limits<LogicalTime>::max();
    next_adapt_at_ = cfg_.thresholds.adapt_interval_samples;
}

void HistogramPolicy::register_page(PageId id) {
    Page& p = mach_.page(id);
    p.bin = 0;
    p.counter.cooling_epoch_seen = epoch_;
    p.counter.cpstart = epoch_cpstart_;
    hist_.add_page(0);
    if (p.tier == TierKind::Fast) ++fast_bins_[0];
}

void HistogramPolicy::set_bin(Page& p, int new_bin) {
    if (new_bin == p.bin) return;
    hist_.move(p.bin, new_bin);
    if (p.tier == TierKind::Fast) {
        if (fast_bins_[p.bin] == 0) throw InvariantError("fast-tier bin count underflow");
        --fast_bins_[p.bin];
        ++fast_bins_[new_bin];
    }
    p.bin = static_cast<std::uint8_t>(new_bin);
}

void HistogramPolicy::fold_page(Page& p) {
    if (smooth()) {
        smooth_fold_to(p.counter, epoch_cpstart_, cfg_.cooling);
        set_bin(p, bin_index(smooth_value(p.counter, epoch_cpstart_, cfg_.cooling)));
    } else {
        sawtooth_catch_up(p.counter, epoch_, epoch_cpstart_, cfg_.cooling);
        set_bin(p, bin_index(sawtooth_effective(p.counter)));
    }
}

void HistogramPolicy::run_cooling(LogicalTime boundary) {
    ++epoch_;
    epoch_cpstart_ = boundary;
    if (cfg_.cooling.trigger == CoolingTrigger::EverySamples)
        next_cool_at_ += cfg_.cooling.interval_samples;
    // Queued pages decay synchronously so the queues never hold bins from a
    // previous epoch; everything else decays lazily on its next access.
    for (Page& p : mach_.pages)
        if (p.queued != QueuedAs::None) fold_page(p);
}

void HistogramPolicy::run_adapt() {
    th_ = adapt_thresholds(hist_, mach_.fast, cfg_.thresholds,
                           std::span<const std::uint64_t, kBinCount>(fast_bins_));
    hist_.t_hot = th_.t_hot;
    hist_.t_warm = th_.t_warm;
}

void HistogramPolicy::on_sample(PageId id, LogicalTime t, std::vector<Intent>& out) {
    now_ = t;
    while (true) {
        bool cool_due = next_cool_at_ <= t;
        bool adapt_due = next_adapt_at_ <= t;
        if (cool_due && (!adapt_due || next_cool_at_ <= next_adapt_at_)) {
            run_cooling(next_cool_at_);
        } else if (adapt_due) {
            run_adapt();
            next_adapt_at_ += cfg_.thresholds.adapt_interval_samples;
        } else {
            break;
        }
    }

    Page& p = mach_.page(id);
    double v = smooth() ? record_access_smooth(p.counter, t, cfg_.cooling)
                        : record_access_sawtooth(p.counter, t, epoch_, cfg_.cooling);
    set_bin(p, bin_index(v));

    if (cfg_.cooling.trigger == CoolingTrigger::MaxCounter &&
        v >= cfg_.cooling.max_counter_threshold) {
        run_cooling(t);
        fold_page(p);  // the page at the cap decays with everyone else
    }

    Temperature temp = classify(p.bin, th_);
    if (p.tier == TierKind::Capacity && temp == Temperature::Hot && p.queued == QueuedAs::None)
        out.push_back({Intent::Kind::Promote, id});
    else if (p.tier == TierKind::Fast && temp == Temperature::Cold && p.queued == QueuedAs::None)
        out.push_back({Intent::Kind::Demote, id});
}

bool HistogramPolicy::revalidate_promotion(PageId id) const {
    return classify(mach_.page(id).bin, th_) == Temperature::Hot;
}

bool HistogramPolicy::revalidate_demotion(PageId id, LogicalTime) const {
    return classify(mach_.page(id).bin, th_) == Temperature::Cold;
}

double HistogramPolicy::counter_value(PageId id) const {
    const Page& p = mach_.page(id);
    if (smooth()) return smooth_value_at(p.counter, now_, cfg_.cooling);
    if (cfg_.cooling.trigger == CoolingTrigger::EverySamples)
        return sawtooth_value_at(p.counter, now_, cfg_.cooling);
    CounterState s = p.counter;
    sawtooth_catch_up(s, epoch_, epoch_cpstart_, cfg_.cooling);
    return sawtooth_effective(s);
}

void HistogramPolicy::on_migrated(PageId id, TierKind now) {
    const Page& p = mach_.page(id);
    if (now == TierKind::Fast) {
        ++fast_bins_[p.bin];
    } else {
        if (fast_bins_[p.bin] == 0) throw InvariantError("fast-tier bin count underflow");
        --fast_bins_[p.bin];
    }
}

// --- TwoIntervalPolicy ------------------------------------------------------

TwoIntervalPolicy::TwoIntervalPolicy(const PolicyConfig& cfg, MachineState& mach)
    : cfg_(cfg), mach_(mach) {
    // The long frequency interval IS the cooling period of the demotion-side
    // counter; keep the two fields in lockstep regardless of what the caller
    // set on the cooling block.
    cfg_.cooling.interval_samples = cfg_.two_interval.frequency_interval_samples;
    validate_common(cfg_);
    if (cfg_.cooling.decay_shape != DecayShape::Step)
        throw InputError("policy 'two_interval' requires the stepped decay shape");
    if (cfg_.two_interval.momentum_interval_samples < 1)
        throw InputError("momentum interval must be >= 1 sample");
    if (cfg_.two_interval.momentum_interval_samples >=
        cfg_.two_interval.frequency_interval_samples)
        throw InputError("momentum interval must be shorter than the frequency interval");
    next_cool_at_ = cfg_.cooling.trigger == CoolingTrigger::EverySamples
                        ? cfg_.cooling.interval_samples
                        : std::numeric_limits<LogicalTime>::max();
    next_adapt_at_ = cfg_.two_interval.momentum_interval_samples;
}

void TwoIntervalPolicy::register_page(PageId id) {
    Page& p = mach_.page(id);
    p.bin = 0;
    p.counter.cooling_epoch_seen = epoch_;
    p.counter.cpstart = epoch_cpstart_;
    hist_.add_page(0);
    if (p.tier == TierKind::Fast) ++fast_bins_[0];
    if (id >= momentum_window_.size()) {
        momentum_window_.resize(id + 1, 0);
        momentum_count_.resize(id + 1, 0);
    }
}

void TwoIntervalPolicy::set_bin(Page& p, int new_bin) {
    if (new_bin == p.bin) return;
    hist_.move(p.bin, new_bin);
    if (p.tier == TierKind::Fast) {
        if (fast_bins_[p.bin] == 0) throw InvariantError("fast-tier bin count underflow");
        --fast_bins_[p.bin];
        ++fast_bins_[new_bin];
    }
    p.bin = static_cast<std::uint8_t>(new_bin);
}

void TwoIntervalPolicy::run_cooling(LogicalTime boundary) {
    ++epoch_;
    epoch_cpstart_ = boundary;
    if (cfg_.cooling.trigger == CoolingTrigger::EverySamples)
        next_cool_at_ += cfg_.cooling.interval_samples;
    for (Page& p : mach_.pages) {
        if (p.queued == QueuedAs::None) continue;
        sawtooth_catch_up(p.counter, epoch_, epoch_cpstart_, cfg_.cooling);
        set_bin(p, bin_index(sawtooth_effective(p.counter)));
    }
}

void TwoIntervalPolicy::run_adapt() {
    th_ = adapt_thresholds(hist_, mach_.fast, cfg_.thresholds,
                           std::span<const std::uint64_t, kBinCount>(fast_bins_));
    hist_.t_hot = th_.t_hot;
    hist_.t_warm = th_.t_warm;
}

bool TwoIntervalPolicy::momentum_hot(PageId id) const {
    if (now_ == 0) return false;
    std::uint64_t window = (now_ - 1) / cfg_.two_interval.momentum_interval_samples;
    return momentum_window_[id] == window + 1 &&
           momentum_count_[id] >= cfg_.two_interval.momentum_hot_threshold;
}

std::uint64_t TwoIntervalPolicy::momentum_count(PageId id) const {
    return momentum_window_.at(id) == 0 ? 0 : momentum_count_[id];
}

void TwoIntervalPolicy::on_sample(PageId id, LogicalTime t, std::vector<Intent>& out) {
    now_ = t;
    while (true) {
        bool cool_due = next_cool_at_ <= t;
        bool adapt_due = next_adapt_at_ <= t;
        if (cool_due && (!adapt_due || next_cool_at_ <= next_adapt_at_)) {
            run_cooling(next_cool_at_);
        } else if (adapt_due) {
            run_adapt();
            next_adapt_at_ += cfg_.two_interval.momentum_interval_samples;
        } else {
            break;
        }
    }

    Page& p = mach_.page(id);
    double v = record_access_sawtooth(p.counter, t, epoch_, cfg_.cooling);
    set_bin(p, bin_index(v));

    std::uint64_t window = (t - 1) / cfg_.two_interval.momentum_interval_samples;
    if (momentum_window_[id] != window + 1) {
        momentum_window_[id] = window + 1;
        momentum_count_[id] = 0;
    }
    ++momentum_count_[id];

    bool fast_by_momentum = momentum_hot(id);
    Temperature temp = classify(p.bin, th_);
    if (p.tier == TierKind::Capacity && (fast_by_momentum || temp == Temperature::Hot) &&
        p.queued == QueuedAs::None)
        out.push_back({Intent::Kind::Promote, id});
    else if (p.tier == TierKind::Fast && temp == Temperature::Cold && !fast_by_momentum &&
             p.queued == QueuedAs::None)
        out.push_back({Intent::Kind::Demote, id});
}

bool TwoIntervalPolicy::revalidate_promotion(PageId id) const {
    return momentum_hot(id) || classify(mach_.page(id).bin, th_) == Temperature::Hot;
}

bool TwoIntervalPolicy::revalidate_demotion(PageId id, LogicalTime) const {
    return !momentum_hot(id) && classify(mach_.page(id).bin, th_) == Temperature::Cold;
}

double TwoIntervalPolicy::counter_value(PageId id) const {
    const Page& p = mach_.page(id);
    if (cfg_.cooling.trigger == CoolingTrigger::EverySamples)
        return sawtooth_value_at(p.counter, now_, cfg_.cooling);
    CounterState s = p.counter;
    sawtooth_catch_up(s, epoch_, epoch_cpstart_, cfg_.cooling);
    return sawtooth_effective(s);
}

void TwoIntervalPolicy::on_migrated(PageId id, TierKind now) {
    const Page& p = mach_.page(id);
    if (now == TierKind::Fast) {
        ++fast_bins_[p.bin];
    } else {
        if (fast_bins_[p.bin] == 0) throw InvariantError("fast-tier bin count underflow");
        --fast_bins_[p.bin];
    }
}

// --- NumaHintPolicy ---------------------------------------------------------

NumaHintPolicy::NumaHintPolicy(const PolicyConfig& cfg, MachineState& mach)
    : cfg_(cfg), mach_(mach) {
    if (cfg_.numa.hot_fault_threshold != 1 && cfg_.numa.hot_fault_threshold != 2)
        throw InputError("numa hint fault threshold must be 1 or 2");
    if (cfg_.numa.scan_interval_samples < 1)
        throw InputError("numa scan interval must be >= 1 sample");
    if (!(cfg_.numa.low_watermark >= 0.0 && cfg_.numa.low_watermark <= cfg_.numa.high_watermark &&
          cfg_.numa.high_watermark <= 1.0))
        throw InputError("numa watermarks must satisfy 0 <= low <= high <= 1");
    next_scan_at_ = cfg_.numa.scan_interval_samples;
}

void NumaHintPolicy::register_page(PageId id) {
    if (id >= faults_.size()) faults_.resize(id + 1, 0);
}

void NumaHintPolicy::scan(std::vector<Intent>& out) {
    const std::size_t n = mach_.pages.size();
    if (n == 0) return;
    std::uint64_t window = cfg_.numa.scan_window_pages == 0
                               ? n
                               : std::min<std::uint64_t>(cfg_.numa.scan_window_pages, n);
    for (std::uint64_t i = 0; i < window; ++i) {
        PageId id = static_cast<PageId>((cursor_ + i) % n);
        Page& p = mach_.page(id);
        if (p.tier == TierKind::Capacity && p.queued == QueuedAs::None &&
            faults_[id] >= static_cast<std::uint32_t>(cfg_.numa.hot_fault_threshold))
            out.push_back({Intent::Kind::Promote, id});
        faults_[id] = 0;
    }
    cursor_ = static_cast<PageId>((cursor_ + window) % n);

    if (cfg_.numa.demotion != NumaDemotionKind::LruWatermark) return;
    const Tier& fast = mach_.fast;
    double cap = static_cast<double>(fast.capacity_pages);
    if (static_cast<double>(fast.resident_pages) <= cfg_.numa.high_watermark * cap) return;
    std::uint64_t target = static_cast<std::uint64_t>(cfg_.numa.low_watermark * cap);
    std::uint64_t already_queued = 0;
    std::vector<PageId> candidates;
    for (const Page& p : mach_.pages) {
        if (p.tier != TierKind::Fast) continue;
        if (p.queued == QueuedAs::Demotion)
            ++already_queued;
        else if (p.queued == QueuedAs::None)
            candidates.push_back(p.id);
    }
    if (fast.resident_pages <= target + already_queued) return;
    std::uint64_t surplus = fast.resident_pages - target - already_queued;
    std::uint64_t take = std::min<std::uint64_t>(surplus, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                      candidates.end(), [&](PageId a, PageId b) {
                          return std::tie(mach_.page(a).last_access, a) <
                                 std::tie(mach_.page(b).last_access, b);
                      });
    for (std::uint64_t i = 0; i < take; ++i)
        out.push_back({Intent::Kind::Demote, candidates[i]});
}

void NumaHintPolicy::on_sample(PageId id, LogicalTime t, std::vector<Intent>& out) {
    now_ = t;
    while (next_scan_at_ <= t) {
        scan(out);
        next_scan_at_ += cfg_.numa.scan_interval_samples;
    }
    ++faults_[id];
}

bool NumaHintPolicy::revalidate_promotion(PageId) const { return true; }

bool NumaHintPolicy::revalidate_demotion(PageId id, LogicalTime enqueued_last_access) const {
    return mach_.page(id).last_access <= enqueued_last_access;
}

double NumaHintPolicy::counter_value(PageId) const { return 0.0; }

void NumaHintPolicy::on_migrated(PageId id, TierKind) { faults_[id] = 0; }

// --- factory ----------------------------------------------------------------

std::unique_ptr<Policy> make_policy(const PolicyConfig& cfg, MachineState& mach) {
    switch (cfg.kind) {
        case PolicyKind::SawtoothDefault:
        case PolicyKind::SawtoothQC:
        case PolicyKind::Smooth:
            return std::make_unique<HistogramPolicy>(cfg, mach);
        case PolicyKind::TwoInterval:
            return std::make_unique<TwoIntervalPolicy>(cfg, mach);
        case PolicyKind::NumaHintOnce:
        case PolicyKind::NumaHintTwice:
        case PolicyKind::NumaHintNoDemotion:
            return std::make_unique<NumaHintPolicy>(cfg, mach);
    }
    throw InvariantError("unreachable policy kind");
}

}  // namespace tierlab
