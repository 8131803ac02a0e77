#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tierlab/config.hpp"
#include "tierlab/metrics.hpp"
#include "tierlab/sim.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace tierlab;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> scale;
};

Trace load_input(const RunConfig& rc) {
    if (rc.workload) return generate(*rc.workload);
    return read_trace(rc.trace_path);
}

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return out;
}

fs::path prepare_out_dir(const RunConfig& rc, const std::string& cli_out) {
    fs::path dir = cli_out.empty() ? rc.out_dir : cli_out;
    fs::create_directories(dir);
    return dir;
}

int cmd_generate(const std::string& spec_path, const std::string& out_path, bool binary,
                 const Overrides& ov) {
    RunConfig rc = parse_run_config(spec_path, ov.seed, ov.scale);
    if (!rc.workload) throw InputError("generate needs a [workload] section in the spec");
    Trace t = generate(*rc.workload);
    if (binary) write_trace_binary(t, out_path);
    else write_trace_text(t, out_path);

    ResolvedTrace rt = resolve_trace(t, rc.sim.strategy, rc.sim.arena_pages);
    std::uint64_t window = std::max<std::uint64_t>(1, t.access_count() / 100);
    std::printf("wrote %s: %zu events, %" PRIu64 " accesses, %" PRIu64 " pages\n",
                out_path.c_str(), t.events.size(), t.access_count(), rt.page_count);
    std::printf("working set: %.1f pages per %" PRIu64 "-access window (%s placement)\n",
                wss_pages(rt, window), window, strategy_name(rc.sim.strategy.kind));
    return 0;
}

int report_run(const RunReport& r, const SimConfig& sim, const fs::path& dir,
               const std::string& prefix) {
    write_report_json(r, sim, (dir / (prefix + "report.json")).string());
    write_timeline_csv(r, (dir / (prefix + "timeline.csv")).string());
    std::printf("%s%s/%s: hit_rate=%.4f promotions=%" PRIu64 " demotions=%" PRIu64
                " drops=%" PRIu64 " est_runtime_ms=%.3f\n",
                prefix.c_str(), policy_name(sim.policy.kind), strategy_name(sim.strategy.kind),
                r.hit_rate, r.promotions, r.demotions, r.revalidation_drops,
                static_cast<double>(r.estimated_runtime_ns) / 1e6);
    if (r.trace_errors > 0) {
        std::fprintf(stderr,
                     "error: trace contained %" PRIu64
                     " invalid records, first at event index %" PRIu64 "\n",
                     r.trace_errors, r.first_error_event);
        return 2;
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& cli_out,
                 const Overrides& ov) {
    RunConfig rc = parse_run_config(config_path, ov.seed, ov.scale);
    Trace t = load_input(rc);
    fs::path dir = prepare_out_dir(rc, cli_out);
    RunReport r = simulate(t, rc.sim);
    return report_run(r, rc.sim, dir, "");
}

int cmd_compare(const std::string& config_path, const std::string& cli_out,
                const Overrides& ov) {
    RunConfig rc = parse_run_config(config_path, ov.seed, ov.scale);
    if (rc.rows.empty())
        throw InputError("compare needs at least one [row <name>] section");
    Trace t = load_input(rc);
    fs::path dir = prepare_out_dir(rc, cli_out);

    std::vector<RunReport> reports(rc.rows.size());
    std::exception_ptr eptr = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(rc.rows.size()); ++i) {
        try {
            reports[i] = simulate(t, rc.rows[i].sim);
        } catch (...) {
#pragma omp critical
            if (!eptr) eptr = std::current_exception();
        }
    }
    if (eptr) std::rethrow_exception(eptr);

    std::uint64_t best = UINT64_MAX;
    for (const RunReport& r : reports) best = std::min(best, r.estimated_runtime_ns);

    fs::path summary = dir / "summary.csv";
    {
        std::FILE* f = std::fopen(summary.string().c_str(), "wb");
        if (!f) throw InputError("cannot open for writing: " + summary.string());
        std::fprintf(f,
                     "name,policy,strategy,hit_rate,promotions,demotions,revalidation_drops,"
                     "estimated_runtime_ns,slowdown_vs_best\n");
        for (std::size_t i = 0; i < rc.rows.size(); ++i) {
            const CompareRow& row = rc.rows[i];
            const RunReport& r = reports[i];
            std::fprintf(f, "%s,%s,%s,%.9f,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%.6f\n",
                         row.name.c_str(), policy_name(row.sim.policy.kind),
                         strategy_name(row.sim.strategy.kind), r.hit_rate, r.promotions,
                         r.demotions, r.revalidation_drops, r.estimated_runtime_ns,
                         static_cast<double>(r.estimated_runtime_ns) / static_cast<double>(best));
        }
        std::fclose(f);
    }

    std::printf("%-20s %-16s %-8s %9s %10s %10s %14s %9s\n", "name", "policy", "strategy",
                "hit_rate", "promotions", "demotions", "est_runtime_ms", "slowdown");
    int rv = 0;
    for (std::size_t i = 0; i < rc.rows.size(); ++i) {
        const CompareRow& row = rc.rows[i];
        const RunReport& r = reports[i];
        std::printf("%-20s %-16s %-8s %9.4f %10" PRIu64 " %10" PRIu64 " %14.3f %8.2fx\n",
                    row.name.c_str(), policy_name(row.sim.policy.kind),
                    strategy_name(row.sim.strategy.kind), r.hit_rate, r.promotions, r.demotions,
                    static_cast<double>(r.estimated_runtime_ns) / 1e6,
                    static_cast<double>(r.estimated_runtime_ns) / static_cast<double>(best));
        write_report_json(r, row.sim, (dir / (sanitize(row.name) + ".report.json")).string());
        if (r.trace_errors > 0 && rv == 0) {
            std::fprintf(stderr,
                         "error: trace contained %" PRIu64
                         " invalid records, first at event index %" PRIu64 "\n",
                         r.trace_errors, r.first_error_event);
            rv = 2;
        }
    }
    std::printf("wrote %s\n", summary.string().c_str());
    return rv;
}

int cmd_heatmap(const std::string& config_path, const std::string& cli_out,
                std::uint64_t addr_buckets, std::uint64_t time_buckets, const Overrides& ov) {
    RunConfig rc = parse_run_config(config_path, ov.seed, ov.scale);
    Trace t = load_input(rc);
    fs::path dir = prepare_out_dir(rc, cli_out);
    ResolvedTrace rt = resolve_trace(t, rc.sim.strategy, rc.sim.arena_pages);
    auto matrix = heatmap_parallel(rt, addr_buckets, time_buckets);
    fs::path out = dir / "heatmap.csv";
    write_heatmap_csv(matrix, out.string());
    std::printf("wrote %s (%" PRIu64 " time x %" PRIu64 " addr buckets, %" PRIu64 " pages)\n",
                out.string().c_str(), time_buckets, addr_buckets, rt.page_count);
    return 0;
}

int cmd_cdf(const std::string& config_path, const std::string& cli_out, double fraction,
            const Overrides& ov) {
    RunConfig rc = parse_run_config(config_path, ov.seed, ov.scale);
    Trace t = load_input(rc);
    fs::path dir = prepare_out_dir(rc, cli_out);
    ResolvedTrace rt = resolve_trace(t, rc.sim.strategy, rc.sim.arena_pages);
    auto counts = page_access_counts_parallel(rt);
    fs::path out = dir / "cdf.csv";
    write_cdf_csv(counts, out.string());
    std::printf("wrote %s\n", out.string().c_str());
    std::printf("%" PRIu64 " pages cover %.0f%% of accesses (%s placement)\n",
                pages_for_access_fraction(counts, fraction), fraction * 100.0,
                strategy_name(rc.sim.strategy.kind));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tierlab: trace-driven tiered-memory policy simulator"};
    app.require_subcommand(1);

    std::string spec_path, config_path, out_path, out_dir;
    bool binary = false;
    std::uint64_t seed_val = 0;
    double scale_val = 0.0, fraction = 0.5;
    std::uint64_t addr_buckets = 64, time_buckets = 64;

    auto* gen = app.add_subcommand("generate", "Generate a synthetic trace from a workload spec");
    gen->add_option("--spec", spec_path, "config file with a [workload] section")->required();
    gen->add_option("--out", out_path, "trace file to write")->required();
    gen->add_flag("--binary", binary, "write the binary trace format");
    auto* gen_seed = gen->add_option("--seed", seed_val, "override the spec seed");

    auto* sim = app.add_subcommand("simulate", "Replay one trace through one policy");
    sim->add_option("--config", config_path, "run config")->required();
    sim->add_option("--out", out_dir, "output directory (default from config)");
    auto* sim_seed = sim->add_option("--seed", seed_val, "override the config seed");
    auto* sim_scale = sim->add_option("--scale", scale_val, "override the interval scale factor");

    auto* cmp = app.add_subcommand("compare", "Run every [row] of a config against one trace");
    cmp->add_option("--config", config_path, "run config with [row <name>] sections")->required();
    cmp->add_option("--out", out_dir, "output directory (default from config)");
    auto* cmp_seed = cmp->add_option("--seed", seed_val, "override the config seed");
    auto* cmp_scale = cmp->add_option("--scale", scale_val, "override the interval scale factor");

    auto* hm = app.add_subcommand("heatmap", "Bucketed page-access heatmap of a trace");
    hm->add_option("--config", config_path, "run config")->required();
    hm->add_option("--out", out_dir, "output directory (default from config)");
    hm->add_option("--addr-buckets", addr_buckets, "address-axis buckets (default 64)");
    hm->add_option("--time-buckets", time_buckets, "time-axis buckets (default 64)");
    auto* hm_seed = hm->add_option("--seed", seed_val, "override the config seed");

    auto* cdf = app.add_subcommand("cdf", "Access-concentration CDF of a trace");
    cdf->add_option("--config", config_path, "run config")->required();
    cdf->add_option("--out", out_dir, "output directory (default from config)");
    cdf->add_option("--fraction", fraction, "report pages covering this access fraction");
    auto* cdf_seed = cdf->add_option("--seed", seed_val, "override the config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Overrides ov;
        auto pick = [&](CLI::Option* seed_opt, CLI::Option* scale_opt) {
            if (seed_opt != nullptr && seed_opt->count() > 0) ov.seed = seed_val;
            if (scale_opt != nullptr && scale_opt->count() > 0) ov.scale = scale_val;
        };
        if (gen->parsed()) {
            pick(gen_seed, nullptr);
            return cmd_generate(spec_path, out_path, binary, ov);
        }
        if (sim->parsed()) {
            pick(sim_seed, sim_scale);
            return cmd_simulate(config_path, out_dir, ov);
        }
        if (cmp->parsed()) {
            pick(cmp_seed, cmp_scale);
            return cmd_compare(config_path, out_dir, ov);
        }
        if (hm->parsed()) {
            pick(hm_seed, nullptr);
            return cmd_heatmap(config_path, out_dir, addr_buckets, time_buckets, ov);
        }
        if (cdf->parsed()) {
            pick(cdf_seed, nullptr);
            return cmd_cdf(config_path, out_dir, fraction, ov);
        }
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const InvariantError& e) {
        std::fprintf(stderr, "invariant violated: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 2;
}
