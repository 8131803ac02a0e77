#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tierlab/trace.hpp"

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    std::printf("%s: %s\n", ok ? "ok" : "FAIL", what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

int run(const std::string& args) {
    std::string cmd = std::string(TIERLAB_BIN) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    return n;
}

}  // namespace

int main() {
    fs::path dir = fs::temp_directory_path() / "tierlab_cli_smoke";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const std::string base_workload = R"(
seed = 5
scale = 0.01
[workload]
archetype = stable_zipf
page_size = 4096
num_objects = 200
object_size = 4096
total_accesses = 20000
zipf_s = 1.1
[sim]
policy = smooth
strategy = time
fast_capacity_pages = 32
arena_pages = 4096
timeline_buckets = 10
)";

    fs::path spec = dir / "spec.ini";
    write_file(spec, base_workload);

    // generate: deterministic text and binary traces
    fs::path trace_a = dir / "a.trace";
    fs::path trace_b = dir / "b.trace";
    expect(run("generate --spec " + spec.string() + " --out " + trace_a.string()) == 0,
           "generate exits 0");
    expect(fs::exists(trace_a), "generate writes the trace file");
    expect(run("generate --spec " + spec.string() + " --out " + trace_b.string()) == 0,
           "generate again exits 0");
    expect(slurp(trace_a) == slurp(trace_b), "same spec generates identical bytes");
    expect(run("generate --spec " + spec.string() + " --out " + trace_b.string() +
               " --seed 9") == 0,
           "generate with a seed override exits 0");
    expect(slurp(trace_a) != slurp(trace_b), "a different seed changes the trace");

    fs::path trace_bin = dir / "a.bin";
    expect(run("generate --spec " + spec.string() + " --out " + trace_bin.string() +
               " --binary") == 0,
           "binary generate exits 0");
    try {
        expect(tierlab::trace_equal(tierlab::read_trace(trace_a.string()),
                                    tierlab::read_trace(trace_bin.string())),
               "text and binary traces decode identically");
    } catch (const std::exception& e) {
        expect(false, std::string("decoding the generated traces: ") + e.what());
    }

    // simulate: byte-stable outputs
    fs::path out1 = dir / "run1";
    fs::path out2 = dir / "run2";
    expect(run("simulate --config " + spec.string() + " --out " + out1.string()) == 0,
           "simulate exits 0");
    expect(fs::exists(out1 / "report.json"), "simulate writes report.json");
    expect(fs::exists(out1 / "timeline.csv"), "simulate writes timeline.csv");
    expect(run("simulate --config " + spec.string() + " --out " + out2.string()) == 0,
           "simulate again exits 0");
    expect(slurp(out1 / "report.json") == slurp(out2 / "report.json"),
           "reports are byte-identical across runs");
    expect(run("simulate --config " + spec.string() + " --out " + out2.string() +
               " --seed 77") == 0,
           "simulate with a seed override exits 0");
    expect(slurp(out1 / "report.json") != slurp(out2 / "report.json"),
           "the seed override reaches the report");

    // out directory taken from the config when --out is absent
    fs::path outcfg = dir / "outcfg.ini";
    write_file(outcfg, "out = " + (dir / "from_config").string() + "\n" + base_workload);
    expect(run("simulate --config " + outcfg.string()) == 0,
           "simulate without --out uses the config out dir");
    expect(fs::exists(dir / "from_config" / "report.json"),
           "the config out dir receives the report");

    // simulating a trace file instead of a generated workload
    fs::path trace_cfg = dir / "trace_cfg.ini";
    write_file(trace_cfg, "trace = " + trace_a.string() + "\nscale = 0.01\n[sim]\npolicy = "
                          "sawtooth_qc\nfast_capacity_pages = 32\narena_pages = 4096\n");
    expect(run("simulate --config " + trace_cfg.string() + " --out " +
               (dir / "run3").string()) == 0,
           "simulate from a trace file exits 0");

    // semantically invalid events are counted, reported, and exit 2
    fs::path bad_trace = dir / "bad.trace";
    write_file(bad_trace,
               "#tierlab-trace v1 page_size=4096\nA 1 4096 17\nX 2 0\nX 1 0\nX 1 0\n");
    fs::path bad_cfg = dir / "bad_cfg.ini";
    write_file(bad_cfg, "trace = " + bad_trace.string() + "\n[sim]\npolicy = smooth\n");
    expect(run("simulate --config " + bad_cfg.string() + " --out " +
               (dir / "bad_out").string()) == 2,
           "a trace with invalid records exits 2");
    expect(fs::exists(dir / "bad_out" / "report.json"),
           "the error run still writes its report");

    // a file that does not parse at all fails before any simulation
    fs::path garbled = dir / "garbled.trace";
    write_file(garbled, "#tierlab-trace v1 page_size=4096\nQ 1 2\n");
    fs::path garbled_cfg = dir / "garbled_cfg.ini";
    write_file(garbled_cfg, "trace = " + garbled.string() + "\n[sim]\npolicy = smooth\n");
    expect(run("simulate --config " + garbled_cfg.string() + " --out " +
               (dir / "garbled_out").string()) == 2,
           "an unparseable trace exits 2");

    // arena too small for the population
    fs::path tiny = dir / "tiny.ini";
    std::string squeezed = base_workload;
    squeezed.replace(squeezed.find("arena_pages = 4096"), 18, "arena_pages = 16");
    write_file(tiny, squeezed);
    expect(run("simulate --config " + tiny.string() + " --out " +
               (dir / "tiny_out").string()) == 2,
           "an arena smaller than the population exits 2");

    // compare: one summary line per row plus the header
    fs::path cmp_cfg = dir / "compare.ini";
    write_file(cmp_cfg, base_workload + R"(
[row smooth]
policy = smooth
[row qc]
policy = sawtooth_qc
[row numa]
policy = numa_hint_once
[row oracle]
strategy = oracle
)");
    fs::path cmp_out = dir / "cmp";
    expect(run("compare --config " + cmp_cfg.string() + " --out " + cmp_out.string()) == 0,
           "compare exits 0");
    expect(count_lines(cmp_out / "summary.csv") == 5, "summary.csv has header plus 4 rows");
    expect(fs::exists(cmp_out / "smooth.report.json") && fs::exists(cmp_out / "qc.report.json") &&
               fs::exists(cmp_out / "numa.report.json") &&
               fs::exists(cmp_out / "oracle.report.json"),
           "compare writes one report per row");
    expect(run("compare --config " + spec.string() + " --out " + cmp_out.string()) == 2,
           "compare without rows exits 2");

    // heatmap and cdf
    expect(run("heatmap --config " + spec.string() + " --out " + (dir / "hm").string() +
               " --addr-buckets 8 --time-buckets 8") == 0,
           "heatmap exits 0");
    expect(count_lines(dir / "hm" / "heatmap.csv") == 9, "heatmap.csv has header plus 8 rows");
    expect(run("cdf --config " + spec.string() + " --out " + (dir / "cdf").string() +
               " --fraction 0.9") == 0,
           "cdf exits 0");
    expect(fs::exists(dir / "cdf" / "cdf.csv"), "cdf writes cdf.csv");

    // CLI and config failure modes
    expect(run("--help") == 0, "--help exits 0");
    expect(run("simulate --help") == 0, "subcommand help exits 0");
    expect(run("frobnicate") == 2, "an unknown subcommand exits 2");
    expect(run("simulate --config " + spec.string() + " --bogus") == 2,
           "an unknown flag exits 2");
    expect(run("simulate") == 2, "a missing required option exits 2");
    expect(run("simulate --config " + (dir / "missing.ini").string()) == 2,
           "a missing config file exits 2");

    fs::path invalid = dir / "invalid.ini";
    write_file(invalid, "[sim]\npolicy = nonsense\n");
    expect(run("simulate --config " + invalid.string()) == 2, "an invalid config exits 2");

    if (failures == 0) fs::remove_all(dir);
    std::printf("%s (%d failures)\n", failures == 0 ? "cli smoke passed" : "cli smoke FAILED",
                failures);
    return failures == 0 ? 0 : 1;
}
