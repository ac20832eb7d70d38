#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "arbsim/arbsim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitRuntime = 3;

int run_command(const std::string& scenario_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed, std::optional<std::size_t> ticks) {
    arbsim::Scenario scenario = arbsim::parse_scenario_file(scenario_path);
    if (seed) scenario.seed = *seed;
    if (ticks) scenario.ticks = *ticks;

    const arbsim::TraceLog trace = arbsim::run_episode(scenario);
    const auto files = arbsim::emit_outputs(trace, out_dir);

    std::cout << "scenario: " << scenario.name << "\n"
              << "config_hash: " << trace.config_hash << "\n"
              << "ticks: " << trace.ticks.size() << "\n";
    if (!trace.ticks.empty()) {
        const auto& last = trace.ticks.back().arbitration;
        std::cout << "final decision: " << arbsim::to_string(last.selected) << "\n"
                  << last.description.text();
    }
    std::cout << "wrote " << files.size() << " files to " << out_dir << "\n";
    return kExitOk;
}

int validate_command(const std::string& scenario_path) {
    const arbsim::Scenario scenario = arbsim::parse_scenario_file(scenario_path);
    std::cout << "OK: " << scenario.name << " (" << arbsim::to_string(scenario.mode) << ", "
              << scenario.participants.size() << " participants, " << scenario.map.lanes.size()
              << " lanes, " << scenario.ticks << " ticks)\n"
              << "config_hash: " << arbsim::config_hash(scenario) << "\n";
    return kExitOk;
}

int replay_command(const std::string& trace_path) {
    const arbsim::TraceLog trace = arbsim::load_trace_file(trace_path);
    const auto mismatches = arbsim::replay_mismatches(trace);
    if (mismatches.empty()) {
        std::cout << "replay OK: " << trace.ticks.size()
                  << " ticks reproduce the recorded arbitration\n";
        return kExitOk;
    }
    std::cerr << "replay FAILED at " << mismatches.size() << " tick(s):";
    for (const std::size_t t : mismatches) std::cerr << " " << t;
    std::cerr << "\n";
    return kExitRuntime;
}

int explain_command(const std::string& trace_path, std::size_t tick) {
    const arbsim::TraceLog trace = arbsim::load_trace_file(trace_path);
    for (const auto& record : trace.ticks) {
        if (record.tick == tick) {
            std::cout << record.arbitration.description.text();
            return kExitOk;
        }
    }
    std::cerr << "tick " << tick << " not present in trace (" << trace.ticks.size()
              << " ticks recorded)\n";
    return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scene-network behavior arbitration and 2D traffic micro-simulation"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string trace_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> ticks;
    std::size_t explain_tick = 0;

    CLI::App* run = app.add_subcommand("run", "Run an episode and write outputs");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory (default: out)");
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--ticks", ticks, "override the tick count");

    CLI::App* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
    validate->add_option("scenario", scenario_path, "scenario file")->required();

    CLI::App* replay = app.add_subcommand("replay", "Re-run arbitration on a recorded trace");
    replay->add_option("trace", trace_path, "trace file (.jsonl)")->required();

    CLI::App* explain = app.add_subcommand("explain", "Print the description for one tick");
    explain->add_option("trace", trace_path, "trace file (.jsonl)")->required();
    explain->add_option("--tick", explain_tick, "tick number")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(scenario_path, out_dir, seed, ticks);
        if (validate->parsed()) return validate_command(scenario_path);
        if (replay->parsed()) return replay_command(trace_path);
        if (explain->parsed()) return explain_command(trace_path, explain_tick);
    } catch (const arbsim::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const arbsim::SemanticError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const arbsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
