#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "tierlab/core.hpp"

namespace tierlab {

// How a cooling epoch is triggered: at fixed sample intervals, or when any
// page counter reaches a cap (HeMem style).
enum class CoolingTrigger : std::uint8_t { EverySamples, MaxCounter };

// How the decay is spread over a cooling period. Step is the classic
// sawtooth (full decay at the boundary); the smooth shapes distribute it
// across the period so the value at a boundary equals the stepped one.
enum class DecayShape : std::uint8_t { Step, LinearSmooth, ExponentialSmooth };

const char* cooling_trigger_name(CoolingTrigger t);
CoolingTrigger cooling_trigger_from_name(const std::string& name);
const char* decay_shape_name(DecayShape s);
DecayShape decay_shape_from_name(const std::string& name);

struct CoolingConfig {
    std::uint64_t interval_samples = 2'000'000;  // cp
    double decay_factor = 0.5;
    CoolingTrigger trigger = CoolingTrigger::EverySamples;
    double max_counter_threshold = 1024.0;  // MaxCounter trigger only
    DecayShape decay_shape = DecayShape::Step;
    // When true, a page untouched across several epochs decays once instead
    // of once per elapsed epoch.
    bool single_decay_on_catchup = false;
};

struct ThresholdConfig {
    std::uint64_t adapt_interval_samples = 100'000;
    double warm_disable_fraction = 0.75;
};

struct Thresholds {
    int t_hot = kBinCount - 1;
    std::optional<int> t_warm;
};

// Largest multiple of cp that is <= t.
inline LogicalTime cpstart_of(LogicalTime t, std::uint64_t cp) {
    return (t / cp) * cp;
}

// --- Sawtooth (stepped) counter -------------------------------------------

// Effective sawtooth value of the stored state (no pending decay applied).
inline double sawtooth_effective(const CounterState& s) {
    return s.base_at_cpstart + static_cast<double>(s.accesses_in_period);
}

// Applies any decay owed since the page was last touched: folds base and
// in-period accesses together and multiplies by decay_factor once per
// elapsed epoch (or once total if single_decay_on_catchup). Asynchronous
// decay model: nothing happens to an untouched page until this runs.
void sawtooth_catch_up(CounterState& s, std::uint64_t epoch_now, LogicalTime cpstart_now,
                       const CoolingConfig& cfg);

// Records one sampled access at time t under epoch epoch_now. Returns the
// effective counter value after the increment.
double record_access_sawtooth(CounterState& s, LogicalTime t, std::uint64_t epoch_now,
                              const CoolingConfig& cfg);

// Pure peek for an EverySamples-triggered sawtooth counter: the value an
// observer would compute at time t, pending decay included, no access
// recorded. Test oracle surface.
double sawtooth_value_at(CounterState s, LogicalTime t, const CoolingConfig& cfg);

// --- Smooth (decoupled-decay) counter --------------------------------------

// Counter value at time t within the state's current period. With
// f = (t - cpstart)/cp, the stored base decays by a factor interpolating
// from 1 at f=0 to decay_factor at f=1, and each in-period access
// contributes decay_factor. At f=1 this equals the post-cooling sawtooth
// value exactly.
double smooth_value(const CounterState& s, LogicalTime t, const CoolingConfig& cfg);

// Folds a smooth counter forward across every period boundary in
// (cpstart, t]: base becomes the value at each period's end, which is
// decay_factor * (base + accesses). Used directly for the synchronous decay
// of queued pages at cooling triggers.
void smooth_fold_to(CounterState& s, LogicalTime t, const CoolingConfig& cfg);

// Folds any period boundaries crossed since the last touch, then records
// one access. Returns the effective (smooth) value at t after the increment.
double record_access_smooth(CounterState& s, LogicalTime t, const CoolingConfig& cfg);

// Pure peek at time t (folds a copy across pending boundaries first).
double smooth_value_at(CounterState s, LogicalTime t, const CoolingConfig& cfg);

// --- Thresholds -------------------------------------------------------------

// Recomputes T_hot so the hot set fits the fast tier: the smallest bin b
// whose suffix page count is <= fast capacity, or 15 if even the top bin
// overflows. T_warm = T_hot - 1 unless the warm-disable rule fires: when
// hot-classified pages already resident in the fast tier occupy at least
// warm_disable_fraction of its capacity, the warm bin is dropped and every
// page is either hot or cold.
Thresholds adapt_thresholds(const HotnessHistogram& h, const Tier& fast,
                            const ThresholdConfig& cfg,
                            std::span<const std::uint64_t, kBinCount> fast_resident_bins);

inline Temperature classify(int bin, const Thresholds& th) {
    if (bin >= th.t_hot) return Temperature::Hot;
    if (th.t_warm && bin == *th.t_warm) return Temperature::Warm;
    return Temperature::Cold;
}

}  // namespace tierlab
