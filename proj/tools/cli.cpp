#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mrr/explore.hpp"
#include "mrr/induction.hpp"
#include "mrr/json_io.hpp"

namespace mrr {

namespace {

struct BoundsFlags {
    int servers = 3;
    std::uint32_t max_term = 2;
    std::uint32_t max_log_len = 1;
    std::uint32_t max_config_version = 2;

    void attach(CLI::App* cmd) {
        cmd->add_option("--servers", servers, "Number of servers (named n1..nN)")
            ->check(CLI::Range(1, 16));
        cmd->add_option("--max-term", max_term, "Largest term explored");
        cmd->add_option("--max-log-len", max_log_len, "Largest log length explored");
        cmd->add_option("--max-config-version", max_config_version, "Largest config version explored");
    }
    ModelBounds bounds() const {
        return ModelBounds::make(servers, max_term, max_log_len, max_config_version);
    }
};

int default_threads() {
    if (const char* env = std::getenv("MRR_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<InvariantId> parse_invariants(const std::string& csv) {
    if (csv == "all") {
        auto span = all_invariants();
        return {span.begin(), span.end()};
    }
    std::vector<InvariantId> out;
    for (const std::string& name : split_csv(csv)) {
        auto id = invariant_from_name(name);
        if (!id) throw CLI::ValidationError("--invariants", "unknown invariant '" + name + "'");
        out.push_back(*id);
    }
    if (out.empty()) throw CLI::ValidationError("--invariants", "no invariants selected");
    return out;
}

std::vector<InvariantId> parse_conjunct_set(const std::string& flag, const std::string& csv) {
    if (csv == "ind") {
        auto span = mrr_ind_conjuncts();
        return {span.begin(), span.end()};
    }
    std::vector<InvariantId> out;
    for (const std::string& name : split_csv(csv)) {
        auto id = invariant_from_name(name);
        if (!id) throw CLI::ValidationError(flag, "unknown invariant '" + name + "'");
        out.push_back(*id);
    }
    return out;
}

std::vector<ActionKind> parse_actions(const std::string& csv) {
    if (csv == "all") {
        return {all_action_kinds.begin(), all_action_kinds.end()};
    }
    std::vector<ActionKind> out;
    for (const std::string& name : split_csv(csv)) {
        auto kind = action_kind_from_name(name);
        if (!kind) throw CLI::ValidationError("--actions", "unknown action '" + name + "'");
        out.push_back(*kind);
    }
    return out;
}

void drop_conjuncts(std::vector<InvariantId>& set, const std::vector<std::string>& names) {
    for (const std::string& name : names) {
        auto id = invariant_from_name(name);
        if (!id) throw CLI::ValidationError("--drop-conjunct", "unknown invariant '" + name + "'");
        std::erase(set, *id);
    }
}

Json names_json(const std::vector<InvariantId>& ids) {
    Json arr = Json::array();
    for (InvariantId id : ids) arr.push_back(std::string(invariant_name(id)));
    return arr;
}

Json action_names_json(const std::vector<ActionKind>& kinds) {
    Json arr = Json::array();
    for (ActionKind k : kinds) arr.push_back(std::string(to_string(k)));
    return arr;
}

MemberSet parse_init_config(const std::string& csv, const ModelBounds& bounds) {
    MemberSet m;
    for (const std::string& name : split_csv(csv)) {
        bool known = false;
        for (size_t i = 0; i < bounds.servers.size(); ++i) {
            if (bounds.servers[i] == name) {
                m = m.with(static_cast<ServerId>(i));
                known = true;
            }
        }
        if (!known) throw CLI::ValidationError("--init-config", "unknown server '" + name + "'");
    }
    if (!csv.empty() && m.empty()) {
        throw CLI::ValidationError("--init-config", "initial config must be non-empty");
    }
    return m;
}

Json init_config_json(MemberSet m, const ModelBounds& bounds) {
    Json arr = Json::array();
    m.for_each([&](ServerId s) { arr.push_back(bounds.servers[s]); });
    return arr;
}

Json mutations_json(const ProtocolOptions& p) {
    Json arr = Json::array();
    if (!p.reconfig_safety_guards) arr.push_back("disable-reconfig-guards");
    return arr;
}

void write_artifact(const std::string& path, const Json& j) {
    if (path.empty()) return;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
    f << to_bytes(j);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Executable model and bounded checker for MongoRaftReconfig, "
                 "MongoDB's logless dynamic reconfiguration protocol"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    // ---- check ----------------------------------------------------------
    auto* check = app.add_subcommand("check", "Breadth-first search of the reachable state space");
    BoundsFlags check_bounds;
    check_bounds.attach(check);
    std::string check_invariants = "all";
    std::uint64_t check_max_states = 50'000'000;
    bool check_stop_at_first = false;
    bool check_no_guards = false;
    int check_threads = default_threads();
    std::string check_out;
    std::string check_init_config;
    check->add_option("--invariants", check_invariants, "Comma-separated invariant names, or 'all'");
    check->add_option("--init-config", check_init_config,
                      "Initial member set (comma-separated server names; default: all)");
    check->add_option("--max-states", check_max_states, "State budget before giving up");
    check->add_flag("--stop-at-first", check_stop_at_first, "Stop after the first violating level");
    check->add_flag("--disable-reconfig-guards", check_no_guards, "Mutation: drop Reconfig's safety guards");
    check->add_option("--threads", check_threads, "Worker threads (default from MRR_THREADS)");
    check->add_option("--out", check_out, "Write the JSON report here");

    // ---- induction ------------------------------------------------------
    auto* induction = app.add_subcommand("induction", "Initiation and consecution checks for the inductive invariant");
    BoundsFlags ind_bounds;
    ind_bounds.attach(induction);
    std::string ind_mode;
    std::uint64_t ind_samples = 100'000;
    std::uint64_t ind_seed = 0;
    std::string ind_check = "ind";
    std::string ind_candidate = "ind";
    std::string ind_actions = "all";
    std::vector<std::string> ind_drop;
    std::uint64_t ind_max_ctis = 4;
    std::uint64_t ind_budget = 200'000'000;
    bool ind_no_guards = false;
    int ind_threads = default_threads();
    std::string ind_out;
    std::string ind_init_config;
    induction->add_option("--mode", ind_mode, "initiation | sample | exhaustive")->required();
    induction->add_option("--init-config", ind_init_config,
                          "Initial member set for --mode initiation (default: all)");
    induction->add_option("--samples", ind_samples, "Random states to draw (sample mode)");
    induction->add_option("--seed", ind_seed, "Generator seed (sample mode)");
    induction->add_option("--conjuncts", ind_check, "Conjuncts to check on post-states, or 'ind'");
    induction->add_option("--candidate", ind_candidate, "Conjuncts the pre-state must satisfy, or 'ind'");
    induction->add_option("--actions", ind_actions, "Action kinds to exercise, or 'all'");
    induction->add_option("--drop-conjunct", ind_drop, "Remove a conjunct from candidate and checked sets");
    induction->add_option("--max-ctis-per-goal", ind_max_ctis, "CTI records kept per goal cell");
    induction->add_option("--budget", ind_budget, "State budget for exhaustive mode");
    induction->add_flag("--disable-reconfig-guards", ind_no_guards, "Mutation: drop Reconfig's safety guards");
    induction->add_option("--threads", ind_threads, "Worker threads (default from MRR_THREADS)");
    induction->add_option("--out", ind_out, "Write the JSON report here");

    // ---- simulate -------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Seeded random walk over enabled transitions");
    BoundsFlags sim_bounds;
    sim_bounds.attach(simulate);
    std::uint64_t sim_steps = 1000;
    std::uint64_t sim_seed = 0;
    std::string sim_invariants = "all";
    bool sim_no_guards = false;
    std::string sim_out;
    std::string sim_report;
    std::string sim_init_config;
    simulate->add_option("--steps", sim_steps, "Step budget");
    simulate->add_option("--seed", sim_seed, "Walk seed");
    simulate->add_option("--invariants", sim_invariants, "Comma-separated invariant names, or 'all'");
    simulate->add_flag("--disable-reconfig-guards", sim_no_guards, "Mutation: drop Reconfig's safety guards");
    simulate->add_option("--init-config", sim_init_config,
                         "Initial member set (comma-separated server names; default: all)");
    simulate->add_option("--out", sim_out, "Write the replayable trace here");
    simulate->add_option("--report", sim_report, "Write the JSON report here");

    // ---- replay ---------------------------------------------------------
    auto* replay = app.add_subcommand("replay", "Re-validate a trace file and re-check invariants");
    std::string replay_file;
    std::string replay_invariants = "all";
    replay->add_option("trace", replay_file, "Trace JSON produced by simulate or check")->required();
    replay->add_option("--invariants", replay_invariants, "Comma-separated invariant names, or 'all'");

    // ---- invariants -----------------------------------------------------
    auto* invariants_cmd = app.add_subcommand("invariants", "List the canonical invariant names");

    std::vector<const char*> argv;
    argv.push_back("mrr");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (check->parsed()) {
            const ModelBounds bounds = check_bounds.bounds();
            const auto invariants = parse_invariants(check_invariants);
            BfsOptions opts;
            opts.max_states = check_max_states;
            opts.stop_at_first = check_stop_at_first;
            opts.threads = check_threads;
            opts.protocol.reconfig_safety_guards = !check_no_guards;
            opts.initial_config = parse_init_config(check_init_config, bounds);

            const CheckReport report = bfs_check(bounds, invariants, opts);

            Json run_config;
            run_config["command"] = "check";
            run_config["bounds"] = bounds_to_json(bounds);
            run_config["invariants"] = names_json(invariants);
            run_config["maxStates"] = check_max_states;
            run_config["stopAtFirst"] = check_stop_at_first;
            run_config["initConfig"] = init_config_json(opts.initial_config, bounds);
            run_config["mutations"] = mutations_json(opts.protocol);
            write_artifact(check_out, check_report_to_json(report, run_config));

            out << "checked " << report.states_visited << " states, " << report.transitions_explored
                << " transitions, diameter " << report.diameter << ", " << report.deadlock_states
                << " deadlock states (" << to_string(report.stop_reason) << ")\n";
            if (report.violations_total == 0) {
                out << "no violations\n";
                return report.complete ? kExitOk : kExitIncomplete;
            }
            out << report.violations_total << " violating state/invariant pairs; first: "
                << invariant_name(report.violations.front().invariant) << " at depth "
                << report.violations.front().trace.steps.size() << "\n";
            return kExitViolation;
        }

        if (induction->parsed()) {
            const ModelBounds bounds = ind_bounds.bounds();
            Json run_config;
            run_config["command"] = "induction";
            run_config["mode"] = ind_mode;
            run_config["bounds"] = bounds_to_json(bounds);

            if (ind_mode == "initiation") {
                const MemberSet init_config = parse_init_config(ind_init_config, bounds);
                run_config["initConfig"] = init_config_json(init_config, bounds);
                const InitiationReport rep = check_initiation(bounds, init_config);
                write_artifact(ind_out, initiation_report_to_json(rep, run_config));
                for (const auto& [id, ok] : rep.conjuncts) {
                    out << (ok ? "pass" : "FAIL") << "  " << invariant_name(id) << "\n";
                }
                out << (rep.all_pass ? "initiation holds\n" : "initiation fails\n");
                return rep.all_pass ? kExitOk : kExitViolation;
            }
            if (ind_mode != "sample" && ind_mode != "exhaustive") {
                err << "error: --mode must be initiation, sample or exhaustive, got '" << ind_mode << "'\n";
                return kExitUsage;
            }

            ConsecutionOptions opts;
            opts.candidate = parse_conjunct_set("--candidate", ind_candidate);
            opts.check = parse_conjunct_set("--conjuncts", ind_check);
            drop_conjuncts(opts.candidate, ind_drop);
            drop_conjuncts(opts.check, ind_drop);
            opts.actions = parse_actions(ind_actions);
            opts.threads = ind_threads;
            opts.max_ctis_per_goal = ind_max_ctis;
            opts.exhaustive_budget = ind_budget;
            opts.protocol.reconfig_safety_guards = !ind_no_guards;

            run_config["candidate"] = names_json(opts.candidate);
            run_config["conjuncts"] = names_json(opts.check);
            run_config["actions"] = action_names_json(opts.actions);
            run_config["mutations"] = mutations_json(opts.protocol);

            ConsecutionReport rep;
            if (ind_mode == "sample") {
                run_config["samples"] = ind_samples;
                run_config["seed"] = ind_seed;
                rep = check_consecution_sampled(bounds, ind_samples, ind_seed, opts);
                out << "drew " << rep.samples_drawn << " states, accepted " << rep.samples_accepted
                    << ", checked " << rep.transitions_checked << " transitions\n";
            } else {
                rep = check_consecution_exhaustive(bounds, opts);
                out << "enumerated " << rep.states_enumerated << " states, accepted "
                    << rep.samples_accepted << ", checked " << rep.transitions_checked
                    << " transitions\n";
            }
            write_artifact(ind_out, consecution_report_to_json(rep, run_config));
            out << goal_matrix_to_text(rep.matrix);
            if (rep.ctis_total == 0) {
                out << "no counterexamples to induction\n";
                return kExitOk;
            }
            out << rep.ctis_total << " counterexamples to induction (" << rep.ctis.size()
                << " recorded)\n";
            return kExitViolation;
        }

        if (simulate->parsed()) {
            const ModelBounds bounds = sim_bounds.bounds();
            const auto invariants = parse_invariants(sim_invariants);
            ProtocolOptions protocol;
            protocol.reconfig_safety_guards = !sim_no_guards;
            const MemberSet init_config = parse_init_config(sim_init_config, bounds);
            const WalkResult result =
                random_walk(bounds, sim_steps, sim_seed, invariants, protocol, init_config);

            Json run_config;
            run_config["command"] = "simulate";
            run_config["bounds"] = bounds_to_json(bounds);
            run_config["invariants"] = names_json(invariants);
            run_config["steps"] = sim_steps;
            run_config["seed"] = sim_seed;
            run_config["initConfig"] = init_config_json(init_config, bounds);
            run_config["mutations"] = mutations_json(protocol);
            write_artifact(sim_out, trace_to_json(result.trace));
            write_artifact(sim_report, check_report_to_json(result.report, run_config));

            out << "walked " << result.trace.steps.size() << " steps";
            if (result.report.deadlock_states > 0) out << " (deadlocked)";
            out << "\n";
            if (result.report.violations.empty()) {
                out << "no violations\n";
                return kExitOk;
            }
            out << "violated " << invariant_name(result.report.violations.front().invariant)
                << " after " << result.trace.steps.size() << " steps\n";
            return kExitViolation;
        }

        if (replay->parsed()) {
            std::ifstream f(replay_file, std::ios::binary);
            if (!f) {
                err << "error: cannot open trace file '" << replay_file << "'\n";
                return kExitUsage;
            }
            Json j;
            try {
                f >> j;
            } catch (const std::exception& e) {
                err << "error: trace file '" << replay_file << "' is not valid JSON: " << e.what() << "\n";
                return kExitUsage;
            }
            const Trace trace = trace_from_json(j);
            const auto invariants = parse_invariants(replay_invariants);
            const ReplayResult res = replay_trace(trace, invariants);
            if (!res.valid) {
                err << "error: replay failed at step " << res.bad_step << ": " << res.error << "\n";
                return kExitUsage;
            }
            out << "replayed " << trace.steps.size() << " steps: all actions enabled, all states match\n";
            if (!res.violations.empty()) {
                out << res.violations.size() << " invariant violations along the trace; first: "
                    << invariant_name(res.violations.front().invariant) << "\n";
                return kExitViolation;
            }
            out << "no violations\n";
            return kExitOk;
        }

        if (invariants_cmd->parsed()) {
            for (InvariantId id : all_invariants()) {
                std::string name(invariant_name(id));
                name.resize(42, ' ');
                out << name << invariant_summary(id) << "\n";
            }
            return kExitOk;
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIncomplete;
    }
    return kExitUsage;
}

}  // namespace mrr
