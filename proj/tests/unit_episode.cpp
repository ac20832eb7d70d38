#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "arbsim/episode.hpp"
#include "arbsim/outputs.hpp"

using namespace arbsim;

namespace {

Scenario load(const std::string& name) {
    return parse_scenario_file(std::string(ARBSIM_SCENARIO_DIR) + "/" + name);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("golden fixture run: one tick, ReduceSpeed, the four highlighted cells") {
    const TraceLog trace = run_episode(load("fig5_three_car.json"));
    REQUIRE(trace.ticks.size() == 1);
    const TickRecord& tick = trace.ticks[0];

    CHECK(tick.arbitration.selected == EgoBehavior::ReduceSpeed);
    REQUIRE(tick.arbitration.max_threat.has_value());
    CHECK(tick.arbitration.max_threat->object_id == "Car2");
    CHECK(tick.arbitration.max_threat->behavior == ObjectBehavior::LaneFollow);
    CHECK(tick.arbitration.max_threat->theta == Catch::Approx(0.36));

    std::vector<ThreatKey> active;
    for (const auto& e : tick.threats.entries)
        if (e.active) active.push_back({e.object_id, e.behavior});
    const std::vector<ThreatKey> expected = {{"Car1", ObjectBehavior::LaneChangeRight},
                                             {"Car2", ObjectBehavior::LaneFollow},
                                             {"Car2", ObjectBehavior::Stop},
                                             {"Car3", ObjectBehavior::LaneChangeLeft}};
    CHECK(active == expected);
    CHECK(tick.arbitration.resolved.size() == 3);
    CHECK(tick.arbitration.unresolved.empty());
}

TEST_CASE("golden fixture description is byte-stable") {
    const TraceLog trace = run_episode(load("fig5_three_car.json"));
    const Description& d = trace.ticks[0].arbitration.description;
    REQUIRE(d.n_significant() == 3);
    CHECK(d.text() ==
          "Car1 (left, near; significance 0.30): LaneChangeRight p=0.59, impact 20.0 s; "
          "mitigated by ReduceSpeed\n"
          "Car2 (ahead, far; significance 0.60): LaneFollow p=0.60, impact 25.0 s; "
          "mitigated by ReduceSpeed\n"
          "Car3 (right, near; significance 0.10): LaneChangeLeft p=0.10, impact 30.0 s; "
          "mitigated by ReduceSpeed\n"
          "Selected ReduceSpeed: resolves 3 of 3 active threats; dominant threat "
          "Car2/LaneFollow (Θ=0.36)\n");
}

TEST_CASE("ego-only closed loop keeps the lane on every tick") {
    const TraceLog trace = run_episode(load("ego_only.json"));
    REQUIRE(trace.ticks.size() == 100);
    for (const auto& tick : trace.ticks) {
        CHECK(tick.arbitration.selected == EgoBehavior::KeepLane);
        CHECK(!tick.arbitration.max_threat.has_value());
        for (const auto& e : tick.threats.entries) CHECK(e.theta == 0.0);
    }
    // speed hold: the ego cruises at its initial speed
    CHECK(trace.ticks.back().ego.speed == Catch::Approx(15.0));
    CHECK(trace.ticks.back().ego.x > 140.0);
}

TEST_CASE("perception assigns lane indices from the map geometry") {
    const Scenario s = load("fig5_three_car_closed_loop.json");
    const WorldState world = world_from_scenario(s);
    const auto [scene, measurements] = perceive(world);
    CHECK(scene.entities.size() == 6);  // 3 cars + 3 lanes
    CHECK(measurements.by_id.at("Car1").lane == 3);
    CHECK(measurements.by_id.at("Car2").lane == 2);
    CHECK(measurements.by_id.at("Car3").lane == 1);
    CHECK(measurements.by_id.at("Car1").speed == 19.0);
    CHECK(measurements.by_id.at("Lane2").lane == 2);
}

TEST_CASE("closed-loop worked example slows down and recovers") {
    const TraceLog trace = run_episode(load("fig5_three_car_closed_loop.json"));
    REQUIRE(trace.ticks.size() == 100);
    CHECK(trace.ticks[0].arbitration.selected == EgoBehavior::ReduceSpeed);
    // deceleration takes effect
    CHECK(trace.ticks[20].ego.speed < 20.0);
    // once the merge completes and gaps open, the threats drop away
    CHECK(trace.ticks.back().arbitration.selected == EgoBehavior::KeepLane);
    // ego never collides with any participant
    for (const auto& tick : trace.ticks) {
        WorldState w = world_from_scenario(trace.scenario);
        w.ego = tick.ego;
        for (const auto& [id, st] : tick.participants) w.participants.at(id).state = st;
        for (const auto& [id, p] : w.participants)
            CHECK(!rects_overlap(w.ego_footprint(), p.footprint()));
    }
}

TEST_CASE("pedestrian scenario brakes for the crossing and recovers") {
    const TraceLog trace = run_episode(load("pedestrian_crossing.json"));
    REQUIRE(!trace.ticks.empty());
    CHECK(trace.ticks[0].arbitration.selected == EgoBehavior::ReduceSpeed);
    CHECK(trace.ticks[0].threats.entries[0].significance == 0.95);
    CHECK(trace.ticks.back().arbitration.selected == EgoBehavior::KeepLane);
    for (const auto& tick : trace.ticks) {
        WorldState w = world_from_scenario(trace.scenario);
        w.ego = tick.ego;
        for (const auto& [id, st] : tick.participants) w.participants.at(id).state = st;
        for (const auto& [id, p] : w.participants)
            CHECK(!rects_overlap(w.ego_footprint(), p.footprint()));
    }
}

TEST_CASE("identical seeds reproduce identical traces byte for byte") {
    const Scenario s = load("sampled_traffic.json");
    const std::string a = trace_to_jsonl(run_episode(s));
    const std::string b = trace_to_jsonl(run_episode(s));
    CHECK(a == b);

    Scenario reseeded = s;
    reseeded.seed = s.seed + 1;
    const std::string c = trace_to_jsonl(run_episode(reseeded));
    CHECK(a != c);
}

TEST_CASE("replay reproduces every recorded arbitration") {
    for (const char* name : {"fig5_three_car.json", "fig5_three_car_closed_loop.json",
                             "pedestrian_crossing.json", "sampled_traffic.json"}) {
        const TraceLog trace = run_episode(load(name));
        CHECK(replay_mismatches(trace).empty());
    }
}

TEST_CASE("trace serialization round-trips") {
    const TraceLog trace = run_episode(load("fig5_three_car.json"));
    const std::string text = trace_to_jsonl(trace);
    const TraceLog parsed = parse_trace(text);
    CHECK(trace_to_jsonl(parsed) == text);
    REQUIRE(parsed.ticks.size() == trace.ticks.size());
    CHECK(parsed.config_hash == trace.config_hash);
    CHECK(parsed.ticks[0].arbitration.selected == trace.ticks[0].arbitration.selected);
    CHECK(parsed.ticks[0].arbitration.description.text() ==
          trace.ticks[0].arbitration.description.text());
}

TEST_CASE("a tampered trace fails replay") {
    TraceLog trace = run_episode(load("fig5_three_car.json"));
    trace.ticks[0].arbitration.selected = EgoBehavior::EmergencyStop;
    CHECK(replay_mismatches(trace) == std::vector<std::size_t>{0});
}

TEST_CASE("episode ends when the ego reaches its destination") {
    Scenario s = load("ego_only.json");
    s.ego.task.waypoints = {{-50.0, 0.0}, {20.0, 0.0}};
    // keep the map in sync with the shortened route
    const TraceLog trace = run_episode(s);
    CHECK(trace.ticks.size() < 100);
    CHECK(trace.ticks.size() > 5);
}

TEST_CASE("emit_outputs writes the contracted file set") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "arbsim_emit_test";
    fs::remove_all(dir);

    const TraceLog golden = run_episode(load("fig5_three_car.json"));
    const auto files = emit_outputs(golden, dir.string());
    REQUIRE(files.size() == 3);  // trace + one grid + plot table
    CHECK(fs::exists(dir / "fig5_three_car.trace.jsonl"));
    CHECK(fs::exists(dir / "grid_000000.pgm"));
    CHECK(fs::exists(dir / "plot.tsv"));

    const std::string plot = slurp((dir / "plot.tsv").string());
    CHECK(plot.substr(0, plot.find('\n')) ==
          "tick\tclock\ttheta_max\tselected\ttheta:Car1\ttheta:Car2\ttheta:Car3");

    // re-emission is byte-identical
    const std::string trace_bytes = slurp(files[0]);
    const std::string grid_bytes = slurp(files[1]);
    emit_outputs(golden, dir.string());
    CHECK(slurp(files[0]) == trace_bytes);
    CHECK(slurp(files[1]) == grid_bytes);
    fs::remove_all(dir);
}

TEST_CASE("plot table has one row per tick under a constant header") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "arbsim_plot_test";
    fs::remove_all(dir);
    const TraceLog trace = run_episode(load("ego_only.json"));
    REQUIRE(trace.ticks.size() == 100);
    emit_outputs(trace, dir.string());
    const std::string plot = slurp((dir / "plot.tsv").string());
    std::size_t lines = 0;
    for (const char c : plot)
        if (c == '\n') ++lines;
    CHECK(lines == 101);  // header + 100 ticks
    fs::remove_all(dir);
}

TEST_CASE("loaded traces drive replay from disk") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "arbsim_replay_test";
    fs::remove_all(dir);
    const TraceLog trace = run_episode(load("pedestrian_crossing.json"));
    const auto files = emit_outputs(trace, dir.string());
    const TraceLog loaded = load_trace_file(files[0]);
    CHECK(replay_mismatches(loaded).empty());
    fs::remove_all(dir);
}
