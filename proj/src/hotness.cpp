#include "tierlab/hotness.hpp"

#include <cmath>

namespace tierlab {

const char* cooling_trigger_name(CoolingTrigger t) {
    return t == CoolingTrigger::EverySamples ? "every_samples" : "max_counter";
}

CoolingTrigger cooling_trigger_from_name(const std::string& name) {
    if (name == "every_samples") return CoolingTrigger::EverySamples;
    if (name == "max_counter") return CoolingTrigger::MaxCounter;
    throw InputError("unknown cooling trigger: " + name);
}

const char* decay_shape_name(DecayShape s) {
    switch (s) {
        case DecayShape::Step: return "step";
        case DecayShape::LinearSmooth: return "linear";
        case DecayShape::ExponentialSmooth: return "exponential";
    }
    throw InvariantError("unreachable decay shape");
}

DecayShape decay_shape_from_name(const std::string& name) {
    if (name == "step") return DecayShape::Step;
    if (name == "linear") return DecayShape::LinearSmooth;
    if (name == "exponential") return DecayShape::ExponentialSmooth;
    throw InputError("unknown decay shape: " + name);
}

namespace {

double decay_pow(double factor, std::uint64_t n) {
    if (factor == 0.5) return std::ldexp(1.0, -static_cast<int>(n > 1023 ? 1023 : n));
    return std::pow(factor, static_cast<double>(n));
}

}  // namespace

void sawtooth_catch_up(CounterState& s, std::uint64_t epoch_now, LogicalTime cpstart_now,
                       const CoolingConfig& cfg) {
    if (epoch_now <= s.cooling_epoch_seen) return;
    std::uint64_t elapsed = epoch_now - s.cooling_epoch_seen;
    if (cfg.single_decay_on_catchup) elapsed = 1;
    double v = s.base_at_cpstart + static_cast<double>(s.accesses_in_period);
    s.base_at_cpstart = v * decay_pow(cfg.decay_factor, elapsed);
    s.accesses_in_period = 0;
    s.cooling_epoch_seen = epoch_now;
    s.cpstart = cpstart_now;
}

double record_access_sawtooth(CounterState& s, LogicalTime t, std::uint64_t epoch_now,
                              const CoolingConfig& cfg) {
    LogicalTime cpstart_now = cfg.trigger == CoolingTrigger::EverySamples
                                  ? cpstart_of(t, cfg.interval_samples)
                                  : t;
    sawtooth_catch_up(s, epoch_now, cpstart_now, cfg);
    ++s.accesses_in_period;
    return sawtooth_effective(s);
}

double sawtooth_value_at(CounterState s, LogicalTime t, const CoolingConfig& cfg) {
    std::uint64_t epoch_now = t / cfg.interval_samples;
    sawtooth_catch_up(s, epoch_now, cpstart_of(t, cfg.interval_samples), cfg);
    return sawtooth_effective(s);
}

double smooth_value(const CounterState& s, LogicalTime t, const CoolingConfig& cfg) {
    double f = static_cast<double>(t - s.cpstart) / static_cast<double>(cfg.interval_samples);
    if (f > 1.0) f = 1.0;
    double d = cfg.decay_factor;
    double base_factor;
    switch (cfg.decay_shape) {
        case DecayShape::ExponentialSmooth:
            base_factor = std::pow(d, f);
            break;
        case DecayShape::LinearSmooth:
        default:
            base_factor = 1.0 - (1.0 - d) * f;
            break;
    }
    return base_factor * s.base_at_cpstart + d * static_cast<double>(s.accesses_in_period);
}

// One fold per boundary; later empty periods just scale base.
void smooth_fold_to(CounterState& s, LogicalTime t, const CoolingConfig& cfg) {
    LogicalTime target = cpstart_of(t, cfg.interval_samples);
    if (target <= s.cpstart) return;
    std::uint64_t periods = (target - s.cpstart) / cfg.interval_samples;
    double d = cfg.decay_factor;
    s.base_at_cpstart =
        d * (s.base_at_cpstart + static_cast<double>(s.accesses_in_period));
    s.accesses_in_period = 0;
    if (periods > 1) s.base_at_cpstart *= decay_pow(d, periods - 1);
    s.cpstart = target;
    s.cooling_epoch_seen += periods;
}

double record_access_smooth(CounterState& s, LogicalTime t, const CoolingConfig& cfg) {
    smooth_fold_to(s, t, cfg);
    ++s.accesses_in_period;
    return smooth_value(s, t, cfg);
}

double smooth_value_at(CounterState s, LogicalTime t, const CoolingConfig& cfg) {
    smooth_fold_to(s, t, cfg);
    return smooth_value(s, t, cfg);
}

Thresholds adapt_thresholds(const HotnessHistogram& h, const Tier& fast,
                            const ThresholdConfig& cfg,
                            std::span<const std::uint64_t, kBinCount> fast_resident_bins) {
    Thresholds th;
    th.t_hot = kBinCount - 1;
    std::uint64_t suffix = 0;
    // Walk top-down; the last b whose suffix still fits is the smallest one.
    for (int b = kBinCount - 1; b >= 0; --b) {
        suffix += h.bins[b];
        if (suffix <= fast.capacity_pages)
            th.t_hot = b;
        else
            break;
    }

    if (th.t_hot >= 1) {
        std::uint64_t hot_in_fast = 0;
        for (int b = th.t_hot; b < kBinCount; ++b) hot_in_fast += fast_resident_bins[b];
        double threshold = cfg.warm_disable_fraction * static_cast<double>(fast.capacity_pages);
        if (static_cast<double>(hot_in_fast) < threshold)
            th.t_warm = th.t_hot - 1;
    }
    return th;
}

}  // namespace tierlab
