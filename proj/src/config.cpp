#include "tierlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>

namespace tierlab {

namespace {

struct RawEntry {
    std::string section;  // "" = top level, "row <name>" = compare row
    std::string key;
    std::string value;
    int line = 0;
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(int line, const std::string& what) {
    throw InputError("config line " + std::to_string(line) + ": " + what);
}

std::uint64_t parse_u64(const RawEntry& e) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc{} || p != e.value.data() + e.value.size())
        bad(e.line, "'" + e.key + "' expects an unsigned integer, got '" + e.value + "'");
    return v;
}

std::uint32_t parse_u32(const RawEntry& e) {
    std::uint64_t v = parse_u64(e);
    if (v > UINT32_MAX) bad(e.line, "'" + e.key + "' is out of range");
    return static_cast<std::uint32_t>(v);
}

double parse_double(const RawEntry& e) {
    const char* s = e.value.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s + e.value.size() || e.value.empty())
        bad(e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
    return v;
}

bool parse_bool(const RawEntry& e) {
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    bad(e.line, "'" + e.key + "' expects true or false, got '" + e.value + "'");
}

ContextSpec parse_context(const RawEntry& e) {
    // objects:size:share:zipf_s
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t colon = e.value.find(':', start);
        parts.push_back(trim(e.value.substr(start, colon - start)));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 4) bad(e.line, "'context' expects objects:size:share:zipf_s");
    auto field = [&](int i) { return RawEntry{e.section, "context", parts[i], e.line}; };
    ContextSpec c;
    c.objects = parse_u64(field(0));
    c.object_size = parse_u64(field(1));
    c.share = parse_double(field(2));
    c.zipf_s = parse_double(field(3));
    return c;
}

std::vector<RawEntry> read_entries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config: " + path);

    static const std::set<std::string> kSections = {
        "workload", "sim",       "strategy",     "cooling", "thresholds",
        "sampling", "migration", "two_interval", "numa",    "cost"};

    std::vector<RawEntry> entries;
    std::string section;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') bad(n, "unterminated section header");
            std::string name = trim(line.substr(1, line.size() - 2));
            if (name.rfind("row", 0) == 0 &&
                (name.size() == 3 || std::isspace(static_cast<unsigned char>(name[3])))) {
                std::string row_name = trim(name.substr(3));
                if (row_name.empty()) bad(n, "row section needs a name");
                section = "row " + row_name;
            } else if (kSections.count(name)) {
                section = name;
            } else {
                bad(n, "unknown section [" + name + "]");
            }
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) bad(n, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) bad(n, "empty key");
        entries.push_back({section, key, value, n});
    }
    return entries;
}

// Row keys address base sections with a dotted prefix; bare keys fall back
// to [sim] (plus top-level seed/scale) so the common row shape stays short.
RawEntry translate_row_key(const RawEntry& e) {
    RawEntry out = e;
    std::size_t dot = e.key.find('.');
    if (dot != std::string::npos) {
        out.section = e.key.substr(0, dot);
        out.key = e.key.substr(dot + 1);
    } else if (e.key == "seed" || e.key == "scale") {
        out.section = "";
    } else {
        out.section = "sim";
    }
    if (out.section == "workload" || (out.section.empty() && e.key != "seed" && e.key != "scale"))
        bad(e.line, "rows may only vary simulation settings, not the workload or paths");
    return out;
}

// Returns false when the (section, key) pair is not recognized. Keys
// consumed by the first pass and top-level path keys are accepted and
// skipped here.
bool apply_sim_entry(SimConfig& sim, const RawEntry& e) {
    const std::string& s = e.section;
    const std::string& k = e.key;
    if (s.empty())
        return k == "seed" || k == "scale" || k == "out" || k == "trace";
    if (s == "workload") return true;  // parsed separately
    if (s == "sim") {
        if (k == "policy" || k == "strategy") return true;  // first pass
        if (k == "fast_capacity_pages") sim.fast_capacity_pages = parse_u64(e);
        else if (k == "arena_pages") sim.arena_pages = parse_u64(e);
        else if (k == "timeline_buckets") sim.timeline_buckets = parse_u32(e);
        else return false;
        return true;
    }
    if (s == "strategy") {
        if (k == "depth") sim.strategy.depth = parse_u32(e);
        else if (k == "regions") sim.strategy.regions = parse_u32(e);
        else return false;
        return true;
    }
    if (s == "cooling") {
        CoolingConfig& c = sim.policy.cooling;
        if (k == "interval_samples") c.interval_samples = parse_u64(e);
        else if (k == "decay_factor") c.decay_factor = parse_double(e);
        else if (k == "trigger") c.trigger = cooling_trigger_from_name(e.value);
        else if (k == "max_counter_threshold") c.max_counter_threshold = parse_double(e);
        else if (k == "shape") c.decay_shape = decay_shape_from_name(e.value);
        else if (k == "single_decay_on_catchup") c.single_decay_on_catchup = parse_bool(e);
        else return false;
        return true;
    }
    if (s == "thresholds") {
        if (k == "adapt_interval_samples")
            sim.policy.thresholds.adapt_interval_samples = parse_u64(e);
        else if (k == "warm_disable_fraction")
            sim.policy.thresholds.warm_disable_fraction = parse_double(e);
        else return false;
        return true;
    }
    if (s == "sampling") {
        if (k == "rate") sim.sampling.rate = parse_u64(e);
        else if (k == "jitter") sim.sampling.jitter = parse_double(e);
        else return false;
        return true;
    }
    if (s == "migration") {
        if (k == "tick_interval_samples") sim.migration.tick_interval_samples = parse_u64(e);
        else if (k == "max_migrations_per_tick")
            sim.migration.max_migrations_per_tick = parse_u64(e);
        else return false;
        return true;
    }
    if (s == "two_interval") {
        TwoIntervalConfig& t = sim.policy.two_interval;
        if (k == "momentum_interval_samples") t.momentum_interval_samples = parse_u64(e);
        else if (k == "frequency_interval_samples") t.frequency_interval_samples = parse_u64(e);
        else if (k == "momentum_hot_threshold") t.momentum_hot_threshold = parse_u64(e);
        else return false;
        return true;
    }
    if (s == "numa") {
        NumaHintConfig& nc = sim.policy.numa;
        if (k == "scan_window_pages") nc.scan_window_pages = parse_u64(e);
        else if (k == "scan_interval_samples") nc.scan_interval_samples = parse_u64(e);
        else if (k == "hot_fault_threshold") nc.hot_fault_threshold = static_cast<int>(parse_u64(e));
        else if (k == "demotion") nc.demotion = numa_demotion_from_name(e.value);
        else if (k == "high_watermark") nc.high_watermark = parse_double(e);
        else if (k == "low_watermark") nc.low_watermark = parse_double(e);
        else return false;
        return true;
    }
    if (s == "cost") {
        if (k == "fast_latency_ns") sim.cost.fast_latency_ns = parse_double(e);
        else if (k == "capacity_latency_ns") sim.cost.capacity_latency_ns = parse_double(e);
        else if (k == "migration_cost_ns") sim.cost.migration_cost_ns = parse_double(e);
        else return false;
        return true;
    }
    return false;
}

SimConfig resolve_sim(const std::vector<RawEntry>& base, const std::vector<RawEntry>& row,
                      std::optional<std::uint64_t> seed_override,
                      std::optional<double> scale_override) {
    PolicyKind pk = PolicyKind::Smooth;
    StrategyKind sk = StrategyKind::TimeBased;
    std::uint64_t seed = 1;
    double scale = 1.0;
    auto first_pass = [&](const RawEntry& e) {
        if (e.section == "sim" && e.key == "policy") pk = policy_kind_from_name(e.value);
        else if (e.section == "sim" && e.key == "strategy")
            sk = strategy_kind_from_name(e.value);
        else if (e.section.empty() && e.key == "seed") seed = parse_u64(e);
        else if (e.section.empty() && e.key == "scale") scale = parse_double(e);
    };
    for (const RawEntry& e : base) first_pass(e);
    for (const RawEntry& e : row) first_pass(e);
    if (seed_override) seed = *seed_override;
    if (scale_override) scale = *scale_override;
    if (!(scale > 0.0)) throw InputError("scale must be positive");

    SimConfig sim;
    sim.policy = default_policy_config(pk, scale);
    sim.strategy.kind = sk;
    sim.seed = seed;
    sim.scale = scale;
    sim.migration.tick_interval_samples = scaled_interval(5000, scale);

    auto second_pass = [&](const RawEntry& e) {
        if (!apply_sim_entry(sim, e))
            bad(e.line, "unknown key '" + e.key + "' in section [" +
                            (e.section.empty() ? "top level" : e.section) + "]");
    };
    for (const RawEntry& e : base) second_pass(e);
    for (const RawEntry& e : row) second_pass(e);
    return sim;
}

WorkloadSpec parse_workload(const std::vector<RawEntry>& base, std::uint64_t seed) {
    WorkloadSpec spec;
    spec.seed = seed;
    bool have_archetype = false;
    for (const RawEntry& e : base) {
        if (e.section != "workload") continue;
        const std::string& k = e.key;
        if (k == "archetype") {
            spec.archetype = archetype_from_name(e.value);
            have_archetype = true;
        } else if (k == "page_size") spec.page_size = parse_u64(e);
        else if (k == "total_accesses") spec.total_accesses = parse_u64(e);
        else if (k == "num_objects") spec.num_objects = parse_u64(e);
        else if (k == "object_size") spec.object_size = parse_u64(e);
        else if (k == "zipf_s") spec.zipf_s = parse_double(e);
        else if (k == "hot_share") spec.hot_share = parse_double(e);
        else if (k == "hot_fraction") spec.hot_fraction = parse_double(e);
        else if (k == "switch_at") spec.switch_at = parse_u64(e);
        else if (k == "regions") spec.regions = parse_u64(e);
        else if (k == "phase_len") spec.phase_len = parse_u64(e);
        else if (k == "region_share") spec.region_share = parse_double(e);
        else if (k == "wrapper_frames") spec.wrapper_frames = parse_u64(e);
        else if (k == "context") spec.contexts.push_back(parse_context(e));
        else bad(e.line, "unknown key '" + k + "' in section [workload]");
    }
    if (!have_archetype)
        throw InputError("workload section needs an archetype (stable_zipf, phase_change, "
                         "checkered, small_object_skew)");
    return spec;
}

}  // namespace

RunConfig parse_run_config(const std::string& path, std::optional<std::uint64_t> seed_override,
                           std::optional<double> scale_override) {
    std::vector<RawEntry> all = read_entries(path);

    std::vector<RawEntry> base;
    std::vector<std::pair<std::string, std::vector<RawEntry>>> rows;
    for (const RawEntry& e : all) {
        if (e.section.rfind("row ", 0) == 0) {
            std::string name = e.section.substr(4);
            if (rows.empty() || rows.back().first != name) {
                for (const auto& r : rows)
                    if (r.first == name) bad(e.line, "duplicate row '" + name + "'");
                rows.push_back({name, {}});
            }
            rows.back().second.push_back(translate_row_key(e));
        } else {
            base.push_back(e);
        }
    }

    RunConfig rc;
    rc.sim = resolve_sim(base, {}, seed_override, scale_override);

    bool have_workload = std::any_of(base.begin(), base.end(),
                                     [](const RawEntry& e) { return e.section == "workload"; });
    for (const RawEntry& e : base) {
        if (!e.section.empty()) continue;
        if (e.key == "out") rc.out_dir = e.value;
        else if (e.key == "trace") rc.trace_path = e.value;
    }
    if (have_workload && !rc.trace_path.empty())
        throw InputError("config sets both a [workload] and a trace path; pick one input");
    if (!have_workload && rc.trace_path.empty())
        throw InputError("config needs an input: a [workload] section or trace = <path>");
    if (have_workload) rc.workload = parse_workload(base, rc.sim.seed);

    for (auto& [name, entries] : rows)
        rc.rows.push_back({name, resolve_sim(base, entries, seed_override, scale_override)});
    return rc;
}

}  // namespace tierlab
