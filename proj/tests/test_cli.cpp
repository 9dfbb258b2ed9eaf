#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "mrr/explore.hpp"
#include "mrr/json_io.hpp"

using namespace mrr;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int exit_code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// wallTimeMs is the one report field allowed to differ between runs.
std::string strip_wall_time(const std::string& bytes) {
    Json j = Json::parse(bytes);
    j.erase("wallTimeMs");
    return to_bytes(j);
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("mrr_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

}  // namespace

TEST_CASE("invariants subcommand lists the full registry") {
    const auto r = run({"invariants"});
    CHECK(r.exit_code == kExitOk);
    int lines = 0;
    std::istringstream ss(r.out);
    std::string line;
    while (std::getline(ss, line)) lines++;
    CHECK(lines == 22);
    CHECK(r.out.find("LeaderCompleteness") != std::string::npos);
    CHECK(r.out.find("StateMachineSafety") != std::string::npos);
}

TEST_CASE("check exits 0 on a clean space and 1 on violations") {
    const auto clean = run({"check", "--servers", "2", "--max-term", "2", "--max-log-len", "1",
                            "--max-config-version", "2"});
    CHECK(clean.exit_code == kExitOk);
    CHECK(clean.out.find("no violations") != std::string::npos);

    const auto broken = run({"check", "--servers", "3", "--max-term", "2", "--max-log-len", "1",
                             "--max-config-version", "2", "--disable-reconfig-guards",
                             "--stop-at-first", "--invariants",
                             "ActiveConfigsOverlap,ActiveConfigsOverlapWithCommittedEntry,StateMachineSafety"});
    CHECK(broken.exit_code == kExitViolation);

    const auto budget = run({"check", "--servers", "2", "--max-term", "2", "--max-log-len", "1",
                             "--max-config-version", "2", "--max-states", "10"});
    CHECK(budget.exit_code == kExitIncomplete);
}

TEST_CASE("bad flags and names exit 2 with a diagnostic naming the token") {
    const auto unknown_inv = run({"check", "--servers", "2", "--invariants", "LeaderComplete"});
    CHECK(unknown_inv.exit_code == kExitUsage);
    CHECK(unknown_inv.err.find("LeaderComplete") != std::string::npos);

    const auto unknown_flag = run({"check", "--no-such-flag"});
    CHECK(unknown_flag.exit_code == kExitUsage);

    const auto bad_mode = run({"induction", "--mode", "sideways"});
    CHECK(bad_mode.exit_code == kExitUsage);
    CHECK(bad_mode.err.find("sideways") != std::string::npos);

    const auto bad_action = run({"induction", "--mode", "sample", "--actions", "Explode"});
    CHECK(bad_action.exit_code == kExitUsage);
    CHECK(bad_action.err.find("Explode") != std::string::npos);

    const auto no_cmd = run({});
    CHECK(no_cmd.exit_code == kExitUsage);
}

TEST_CASE("induction initiation and exhaustive modes") {
    const auto init = run({"induction", "--mode", "initiation", "--servers", "3"});
    CHECK(init.exit_code == kExitOk);
    CHECK(init.out.find("initiation holds") != std::string::npos);

    const auto exh = run({"induction", "--mode", "exhaustive", "--servers", "2", "--max-term", "2",
                          "--max-log-len", "1", "--max-config-version", "2", "--threads", "2"});
    CHECK(exh.exit_code == kExitOk);
    CHECK(exh.out.find("no counterexamples") != std::string::npos);

    const auto refused = run({"induction", "--mode", "exhaustive", "--servers", "3", "--max-term",
                              "3", "--max-log-len", "2", "--max-config-version", "3"});
    CHECK(refused.exit_code == kExitIncomplete);
    CHECK(refused.err.find("budget") != std::string::npos);
}

TEST_CASE("induction sample finds CTIs for weakened candidates and writes the artifact") {
    TempDir tmp;
    const auto report_path = (tmp.path / "cti.json").string();
    const auto r = run({"induction", "--mode", "sample", "--samples", "100000", "--seed", "42",
                        "--servers", "3", "--max-term", "3", "--max-log-len", "2",
                        "--max-config-version", "3", "--drop-conjunct", "ElectionSafety",
                        "--threads", "2", "--out", report_path});
    CHECK(r.exit_code == kExitViolation);
    REQUIRE(fs::exists(report_path));
    const Json report = Json::parse(slurp(report_path));
    CHECK(report["ctisTotal"].get<std::uint64_t>() >= 1);
    CHECK(report["ctis"].size() >= 1);
    CHECK(report["matrix"]["cells"].size() == 8);
    // The dropped conjunct is gone from both sets.
    for (const auto& name : report["runConfig"]["candidate"]) CHECK(name != "ElectionSafety");
    for (const auto& name : report["runConfig"]["conjuncts"]) CHECK(name != "ElectionSafety");
}

TEST_CASE("simulate emits a replayable trace; tampering is caught with its step") {
    TempDir tmp;
    const auto trace_path = (tmp.path / "walk.json").string();
    const auto sim = run({"simulate", "--servers", "3", "--max-term", "2", "--max-log-len", "1",
                          "--max-config-version", "2", "--steps", "40", "--seed", "7", "--out",
                          trace_path});
    CHECK(sim.exit_code == kExitOk);
    REQUIRE(fs::exists(trace_path));

    const auto ok = run({"replay", trace_path});
    CHECK(ok.exit_code == kExitOk);
    CHECK(ok.out.find("all actions enabled") != std::string::npos);

    // Corrupt one recorded post-state and replay again.
    Json j = Json::parse(slurp(trace_path));
    REQUIRE(j["steps"].size() >= 2);
    auto& state = j["steps"][1]["state"];
    state["servers"][0]["term"] = state["servers"][0]["term"].get<int>() + 1;
    const auto tampered_path = (tmp.path / "tampered.json").string();
    std::ofstream(tampered_path) << to_bytes(j);

    const auto bad = run({"replay", tampered_path});
    CHECK(bad.exit_code == kExitUsage);
    CHECK(bad.err.find("step 2") != std::string::npos);

    const auto missing = run({"replay", (tmp.path / "nope.json").string()});
    CHECK(missing.exit_code == kExitUsage);
}

TEST_CASE("replay reports violations recorded by a mutated walk") {
    TempDir tmp;
    // Scan a few seeds for a violating mutated walk, then replay it.
    std::uint64_t violating_seed = 0;
    bool found = false;
    for (std::uint64_t seed = 0; seed < 64 && !found; ++seed) {
        ProtocolOptions mutated;
        mutated.reconfig_safety_guards = false;
        const auto w = random_walk(ModelBounds::make(3, 2, 1, 3), 300, seed,
                                   {InvariantId::ActiveConfigsOverlap}, mutated);
        if (!w.report.violations.empty()) {
            violating_seed = seed;
            found = true;
        }
    }
    REQUIRE(found);
    const auto trace_path = (tmp.path / "violating.json").string();
    const auto sim = run({"simulate", "--servers", "3", "--max-term", "2", "--max-log-len", "1",
                          "--max-config-version", "3", "--steps", "300", "--seed",
                          std::to_string(violating_seed), "--disable-reconfig-guards",
                          "--invariants", "ActiveConfigsOverlap", "--out", trace_path});
    CHECK(sim.exit_code == kExitViolation);
    const auto rep = run({"replay", trace_path, "--invariants", "ActiveConfigsOverlap"});
    CHECK(rep.exit_code == kExitViolation);
}

TEST_CASE("identical run configs produce identical report bytes") {
    TempDir tmp;
    const std::vector<std::string> base = {"check", "--servers", "2", "--max-term", "2",
                                           "--max-log-len", "1", "--max-config-version", "2"};

    auto with_out = [&](const std::string& path, int threads) {
        auto args = base;
        args.insert(args.end(), {"--threads", std::to_string(threads), "--out", path});
        return run(args);
    };
    const auto p1 = (tmp.path / "r1.json").string();
    const auto p2 = (tmp.path / "r2.json").string();
    const auto p4 = (tmp.path / "r4.json").string();
    CHECK(with_out(p1, 1).exit_code == kExitOk);
    CHECK(with_out(p2, 1).exit_code == kExitOk);
    CHECK(with_out(p4, 4).exit_code == kExitOk);
    // Byte-identical apart from wall time; thread count is a runtime knob,
    // not part of the run config.
    CHECK(strip_wall_time(slurp(p1)) == strip_wall_time(slurp(p2)));
    CHECK(strip_wall_time(slurp(p1)) == strip_wall_time(slurp(p4)));

    // Same for sampled induction under a fixed seed.
    const auto i1 = (tmp.path / "i1.json").string();
    const auto i4 = (tmp.path / "i4.json").string();
    const std::vector<std::string> ind = {"induction", "--mode", "sample", "--samples", "20000",
                                          "--seed", "3", "--servers", "3", "--max-term", "3",
                                          "--max-log-len", "2", "--max-config-version", "3",
                                          "--drop-conjunct", "ElectionSafety"};
    auto ind_with = [&](const std::string& path, int threads) {
        auto args = ind;
        args.insert(args.end(), {"--threads", std::to_string(threads), "--out", path});
        return run(args);
    };
    ind_with(i1, 1);
    ind_with(i4, 4);
    CHECK(strip_wall_time(slurp(i1)) == strip_wall_time(slurp(i4)));

    // Simulate traces carry no timing at all: byte-identical.
    const auto t1 = (tmp.path / "t1.json").string();
    const auto t2 = (tmp.path / "t2.json").string();
    for (const auto& p : {t1, t2}) {
        run({"simulate", "--servers", "2", "--max-term", "2", "--max-log-len", "1",
             "--max-config-version", "2", "--steps", "25", "--seed", "9", "--out", p});
    }
    CHECK(slurp(t1) == slurp(t2));
}

TEST_CASE("non-conjunct names are rejected for --conjuncts") {
    const auto r = run({"induction", "--mode", "sample", "--samples", "100", "--seed", "1",
                        "--servers", "2", "--conjuncts", "StateMachineSafety"});
    CHECK(r.exit_code == kExitUsage);
    CHECK(r.err.find("StateMachineSafety") != std::string::npos);
}
