#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tierlab/trace.hpp"

namespace tierlab {

enum class Archetype : std::uint8_t { StableZipf, PhaseChange, Checkered, SmallObjectSkew };

const char* archetype_name(Archetype a);
Archetype archetype_from_name(const std::string& name);

// One allocation context of a small-object workload: how many objects it
// allocates, their size, its share of all accesses, and the intra-context
// popularity skew.
struct ContextSpec {
    std::uint64_t objects = 0;
    std::uint64_t object_size = 64;
    double share = 0.0;
    double zipf_s = 0.0;
};

struct WorkloadSpec {
    Archetype archetype = Archetype::StableZipf;
    std::uint64_t page_size = 4096;
    std::uint64_t total_accesses = 1'000'000;
    std::uint64_t seed = 1;

    // Object population for the fixed-size archetypes.
    std::uint64_t num_objects = 1024;
    std::uint64_t object_size = 4096;

    // StableZipf: popularity of object i is proportional to (i+1)^-s.
    double zipf_s = 0.9;

    // PhaseChange: hot_share of accesses land uniformly in the current
    // hotset of round(num_objects * hot_fraction) objects; the rest spread
    // uniformly over everything else. At access index switch_at the hotset
    // moves to a disjoint object range (0 means halfway).
    double hot_share = 0.9;
    double hot_fraction = 0.2;
    std::uint64_t switch_at = 0;

    // Checkered: objects split into `regions` equal ranges; the hot region
    // rotates every phase_len accesses (0 means total/regions).
    std::uint64_t regions = 4;
    std::uint64_t phase_len = 0;
    double region_share = 0.9;

    // SmallObjectSkew: allocation order round-robins across contexts so
    // time-adjacent objects come from different contexts.
    std::vector<ContextSpec> contexts;
    // Innermost frames shared by every context's backtrace; one distinct
    // caller frame follows them.
    std::uint64_t wrapper_frames = 3;
};

// Pure function of the spec; all randomness flows from spec.seed.
Trace generate(const WorkloadSpec& spec);

struct SamplingModel {
    std::uint64_t rate = 1;  // one-in-N accesses observed by the policy
    double jitter = 0.0;     // optional per-event perturbation of the rate
};

// Stateless per-event decision: a pure function of (seed, event_seq), so
// observation sets never depend on simulator state.
bool sample_observed(const SamplingModel& m, std::uint64_t seed, std::uint64_t event_seq);

}  // namespace tierlab
