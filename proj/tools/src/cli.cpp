#include "vtl/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "vtl/engine.hpp"
#include "vtl/harness.hpp"
#include "vtl/report.hpp"
#include "vtl/scenario.hpp"

namespace vtl::cli {

namespace {

struct RunArgs {
    std::string scenario;
    std::string controller;
    std::uint64_t seed = 1;
    std::string trace;
    std::string out;
};

struct IpgArgs {
    std::uint64_t packets = 2000;
    std::uint32_t interval_ms = channel::kBsmIntervalMs;
    std::uint64_t seed = 1;
    std::vector<double> extra;
    std::string out;
};

struct CompareArgs {
    std::string scenario;
    std::uint64_t seeds = 10;
    unsigned jobs = 0;
    std::string out;
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    f << text;
    if (!f) {
        throw std::runtime_error("error writing " + path);
    }
}

void emit_run(const RunArgs& a, const SimReport& report, std::ostream& out) {
    if (!a.trace.empty()) {
        std::ostringstream csv;
        write_trace_csv(csv, report.trace);
        write_file(a.trace, csv.str());
    }
    const std::string doc = to_json(report) + "\n";
    if (a.out.empty() || a.out == "-") {
        out << doc;
    } else {
        write_file(a.out, doc);
    }
}

int do_run(const RunArgs& a, std::ostream& out) {
    Scenario s = load_scenario_file(a.scenario);
    s.controller = *controller_from_string(a.controller);
    s.seed = a.seed;
    try {
        emit_run(a, run(s, RunOptions{.record_trace = !a.trace.empty(), .on_tick = {}}), out);
    } catch (const SimulationTimeout& e) {
        // The partial report still shows which vehicles were stuck.
        emit_run(a, e.partial(), out);
        throw;
    }
    return kOk;
}

int do_ipg(const IpgArgs& a) {
    harness::IpgOptions opts;
    opts.packets = a.packets;
    opts.interval_ms = a.interval_ms;
    opts.seed = a.seed;
    opts.distances.insert(opts.distances.end(), a.extra.begin(), a.extra.end());
    std::ostringstream csv;
    harness::write_ipg_csv(csv, harness::ipg_table(opts));
    write_file(a.out, csv.str());
    return kOk;
}

int do_compare(const CompareArgs& a) {
    const Scenario s = load_scenario_file(a.scenario);
    std::vector<std::uint64_t> seeds(a.seeds);
    for (std::uint64_t i = 0; i < a.seeds; ++i) {
        seeds[i] = i + 1;
    }
    const unsigned jobs = a.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : a.jobs;
    const auto report = harness::compare(s, seeds, jobs);
    write_file(a.out, harness::to_json(report) + "\n");
    return kOk;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Virtual Traffic Light simulator", "vtlsim"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and write its report");
    run_cmd->add_option("--scenario", run_args.scenario, "Scenario file")->required();
    run_cmd->add_option("--controller", run_args.controller, "Intersection control")
        ->required()
        ->check(CLI::IsMember({"vtl", "stop4"}));
    run_cmd->add_option("--seed", run_args.seed, "Channel seed");
    run_cmd->add_option("--trace", run_args.trace, "Per-tick CSV trace");
    run_cmd->add_option("--out", run_args.out, "Report path ('-' for stdout)");

    IpgArgs ipg_args;
    auto* ipg_cmd = app.add_subcommand("ipg", "Inter-packet gap versus distance from the corner");
    ipg_cmd->add_option("--packets", ipg_args.packets, "Beacons per distance")
        ->check(CLI::Range(channel::kMinIpgPackets, std::uint64_t{100'000'000}));
    ipg_cmd->add_option("--interval-ms", ipg_args.interval_ms, "Beacon interval")->check(CLI::PositiveNumber);
    ipg_cmd->add_option("--seed", ipg_args.seed, "Channel seed");
    ipg_cmd->add_option("--distance", ipg_args.extra, "Extra distance in ft (repeatable)")
        ->check(CLI::NonNegativeNumber);
    ipg_cmd->add_option("--out", ipg_args.out, "CSV path")->required();

    CompareArgs cmp_args;
    auto* cmp_cmd = app.add_subcommand("compare", "Paired stop-sign and VTL runs over seeds 1..N");
    cmp_cmd->add_option("--scenario", cmp_args.scenario, "Scenario file")->required();
    cmp_cmd->add_option("--seeds", cmp_args.seeds, "Number of seeds")->check(CLI::Range(1, 100000));
    cmp_cmd->add_option("--jobs", cmp_args.jobs, "Parallel simulations (0 = one per core)");
    cmp_cmd->add_option("--out", cmp_args.out, "Comparison report path")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "vtlsim: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    try {
        if (*run_cmd) {
            return do_run(run_args, out);
        }
        if (*ipg_cmd) {
            return do_ipg(ipg_args);
        }
        return do_compare(cmp_args);
    } catch (const ScenarioError& e) {
        err << "vtlsim: " << e.what() << '\n';
        return kScenarioError;
    } catch (const SimulationTimeout& e) {
        err << "vtlsim: " << e.what() << '\n';
        return kTimeout;
    } catch (const std::exception& e) {
        err << "vtlsim: " << e.what() << '\n';
        return kScenarioError;
    }
}

}  // namespace vtl::cli
