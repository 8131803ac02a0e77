#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tierlab/core.hpp"
#include "tierlab/hotness.hpp"

namespace tierlab {

enum class PolicyKind : std::uint8_t {
    SawtoothDefault,
    SawtoothQC,
    Smooth,
    TwoInterval,
    NumaHintOnce,
    NumaHintTwice,
    NumaHintNoDemotion,
};

const char* policy_name(PolicyKind k);
PolicyKind policy_kind_from_name(const std::string& name);

enum class NumaDemotionKind : std::uint8_t { LruWatermark, None };

const char* numa_demotion_name(NumaDemotionKind k);
NumaDemotionKind numa_demotion_from_name(const std::string& name);

struct NumaHintConfig {
    // 0 means auto: the page count equivalent of 256MB at the run's page
    // size, resolved when the simulation starts.
    std::uint64_t scan_window_pages = 0;
    LogicalTime scan_interval_samples = 100'000;
    int hot_fault_threshold = 1;
    NumaDemotionKind demotion = NumaDemotionKind::LruWatermark;
    double high_watermark = 0.95;
    double low_watermark = 0.90;
};

struct TwoIntervalConfig {
    LogicalTime momentum_interval_samples = 500'000;
    LogicalTime frequency_interval_samples = 80'000'000;
    std::uint64_t momentum_hot_threshold = 3;
};

struct PolicyConfig {
    PolicyKind kind = PolicyKind::Smooth;
    CoolingConfig cooling;
    ThresholdConfig thresholds;
    NumaHintConfig numa;
    TwoIntervalConfig two_interval;
};

// base * scale rounded to the nearest sample, floored at 1.
std::uint64_t scaled_interval(double base, double scale);

// Kind-specific defaults with every sample-denominated interval multiplied
// by scale (floored at 1). Callers overlay explicit settings afterwards,
// unscaled.
PolicyConfig default_policy_config(PolicyKind kind, double scale);

// A policy observes sampled accesses, maintains its own counters and
// classification state, and emits migration intents. Single-threaded: one
// driver mutates it in trace order.
class Policy {
public:
    virtual ~Policy() = default;

    virtual PolicyKind kind() const = 0;

    // Called once per page right after MachineState::add_page.
    virtual void register_page(PageId id) = 0;

    // Consumes one observed sample at logical time t, firing any cooling,
    // adaptation, or scan work whose deadline passed, and appends intents.
    virtual void on_sample(PageId id, LogicalTime t, std::vector<Intent>& out) = 0;

    // Re-checks a queued intent at migration time.
    virtual bool revalidate_promotion(PageId id) const = 0;
    virtual bool revalidate_demotion(PageId id, LogicalTime enqueued_last_access) const = 0;

    // Effective counter value used to order demotion victims (coldest first).
    virtual double counter_value(PageId id) const = 0;

    // State fixup after the engine moved a page.
    virtual void on_migrated(PageId id, TierKind now) = 0;

    virtual Thresholds thresholds() const { return Thresholds{}; }
};

// Shared engine for the counter-histogram policies: a per-page counter
// (stepped or smooth decay), the system-wide bin histogram, periodic
// threshold adaptation, and hot/warm/cold intents.
class HistogramPolicy final : public Policy {
public:
    HistogramPolicy(const PolicyConfig& cfg, MachineState& mach);

    PolicyKind kind() const override { return cfg_.kind; }
    void register_page(PageId id) override;
    void on_sample(PageId id, LogicalTime t, std::vector<Intent>& out) override;
    bool revalidate_promotion(PageId id) const override;
    bool revalidate_demotion(PageId id, LogicalTime enqueued_last_access) const override;
    double counter_value(PageId id) const override;
    void on_migrated(PageId id, TierKind now) override;
    Thresholds thresholds() const override { return th_; }

    const HotnessHistogram& histogram() const { return hist_; }
    std::uint64_t cooling_epoch() const { return epoch_; }

private:
    bool smooth() const { return cfg_.cooling.decay_shape != DecayShape::Step; }
    void set_bin(Page& p, int new_bin);
    // Applies the pending decay to one page and re-bins it.
    void fold_page(Page& p);
    // Advances one cooling epoch at logical time `boundary` and folds every
    // queued page synchronously so stale queue entries re-bin.
    void run_cooling(LogicalTime boundary);
    void run_adapt();

    PolicyConfig cfg_;
    MachineState& mach_;
    HotnessHistogram hist_;
    std::array<std::uint64_t, kBinCount> fast_bins_{};
    Thresholds th_;
    std::uint64_t epoch_ = 0;
    LogicalTime epoch_cpstart_ = 0;
    LogicalTime next_cool_at_ = 0;
    LogicalTime next_adapt_at_ = 0;
    LogicalTime now_ = 0;
};

// Two-interval hybrid: a short momentum window whose static threshold can
// promote quickly, over a long-interval stepped counter histogram that
// governs demotion. Thresholds adapt at momentum boundaries.
class TwoIntervalPolicy final : public Policy {
public:
    TwoIntervalPolicy(const PolicyConfig& cfg, MachineState& mach);

    PolicyKind kind() const override { return PolicyKind::TwoInterval; }
    void register_page(PageId id) override;
    void on_sample(PageId id, LogicalTime t, std::vector<Intent>& out) override;
    bool revalidate_promotion(PageId id) const override;
    bool revalidate_demotion(PageId id, LogicalTime enqueued_last_access) const override;
    double counter_value(PageId id) const override;
    void on_migrated(PageId id, TierKind now) override;
    Thresholds thresholds() const override { return th_; }

    std::uint64_t momentum_count(PageId id) const;

private:
    bool momentum_hot(PageId id) const;
    void set_bin(Page& p, int new_bin);
    void run_cooling(LogicalTime boundary);
    void run_adapt();

    PolicyConfig cfg_;
    MachineState& mach_;
    HotnessHistogram hist_;
    std::array<std::uint64_t, kBinCount> fast_bins_{};
    Thresholds th_;
    std::uint64_t epoch_ = 0;
    LogicalTime epoch_cpstart_ = 0;
    LogicalTime next_cool_at_ = 0;
    LogicalTime next_adapt_at_ = 0;
    LogicalTime now_ = 0;
    // Window index + 1 of the last touch; 0 = untouched. A stale window
    // resets the count, so windows need no global sweep.
    std::vector<std::uint64_t> momentum_window_;
    std::vector<std::uint32_t> momentum_count_;
};

// Fault-count promotion in the style of kernel NUMA balancing: a periodic
// scan visits a window of pages, promotes those whose fault count reached
// the threshold, resets counts, and (optionally) demotes the coldest pages
// by last_access when fast-tier occupancy exceeds the high watermark.
class NumaHintPolicy final : public Policy {
public:
    NumaHintPolicy(const PolicyConfig& cfg, MachineState& mach);

    PolicyKind kind() const override { return cfg_.kind; }
    void register_page(PageId id) override;
    void on_sample(PageId id, LogicalTime t, std::vector<Intent>& out) override;
    bool revalidate_promotion(PageId id) const override;
    bool revalidate_demotion(PageId id, LogicalTime enqueued_last_access) const override;
    double counter_value(PageId id) const override;
    void on_migrated(PageId id, TierKind now) override;

    std::uint32_t fault_count(PageId id) const { return faults_.at(id); }

private:
    void scan(std::vector<Intent>& out);

    PolicyConfig cfg_;
    MachineState& mach_;
    std::vector<std::uint32_t> faults_;
    PageId cursor_ = 0;
    LogicalTime next_scan_at_ = 0;
    LogicalTime now_ = 0;
};

std::unique_ptr<Policy> make_policy(const PolicyConfig& cfg, MachineState& mach);

}  // namespace tierlab
