#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "arbsim/episode.hpp"
#include "arbsim/grid.hpp"
#include "arbsim/scenario.hpp"

namespace arbsim {

namespace detail {

inline json threat_entry_to_json(const ThreatEntry& e) {
    return json{{"object", e.object_id},
                {"behavior", to_string(e.behavior)},
                {"p", e.probability},
                {"tau", std::isfinite(e.impact_time) ? json(e.impact_time) : json(nullptr)},
                {"significance", e.significance},
                {"theta", e.theta},
                {"counter", to_string(e.counter)},
                {"active", e.active},
                {"relation", to_string(e.relation)},
                {"band", to_string(e.band)}};
}

inline ThreatEntry threat_entry_from_json(const json& j, const std::string& path) {
    ThreatEntry e;
    e.object_id = schema::text(j.at("object"), path + "/object");
    if (!parse_object_behavior(schema::text(j.at("behavior"), path + "/behavior"), e.behavior))
        throw SchemaError(path + "/behavior", "unknown behavior");
    e.probability = schema::number(j.at("p"), path + "/p");
    e.impact_time = j.at("tau").is_null() ? kInfiniteTime : schema::number(j.at("tau"), path + "/tau");
    e.significance = schema::number(j.at("significance"), path + "/significance");
    e.theta = schema::number(j.at("theta"), path + "/theta");
    if (!parse_ego_behavior(schema::text(j.at("counter"), path + "/counter"), e.counter))
        throw SchemaError(path + "/counter", "unknown ego behavior");
    e.active = schema::boolean(j.at("active"), path + "/active");
    e.relation = schema::relation(j.at("relation"), path + "/relation");
    e.band = schema::band(j.at("band"), path + "/band");
    return e;
}

inline json threat_keys_to_json(const std::vector<ThreatKey>& keys) {
    json arr = json::array();
    for (const auto& [id, k] : keys) arr.push_back(json::array({id, to_string(k)}));
    return arr;
}

inline std::vector<ThreatKey> threat_keys_from_json(const json& j, const std::string& path) {
    std::vector<ThreatKey> keys;
    for (std::size_t i = 0; i < schema::array(j, path).size(); ++i) {
        const json& pair = j[i];
        if (!pair.is_array() || pair.size() != 2)
            throw SchemaError(path, "expected [id, behavior] pairs");
        ObjectBehavior b;
        if (!parse_object_behavior(pair[1].get<std::string>(), b))
            throw SchemaError(path, "unknown behavior");
        keys.emplace_back(pair[0].get<std::string>(), b);
    }
    return keys;
}

inline json arbitration_to_json(const ArbitrationResult& r) {
    json j;
    j["selected"] = to_string(r.selected);
    if (r.max_threat)
        j["max_threat"] = json{{"object", r.max_threat->object_id},
                               {"behavior", to_string(r.max_threat->behavior)},
                               {"theta", r.max_threat->theta}};
    else
        j["max_threat"] = nullptr;
    j["resolved"] = threat_keys_to_json(r.resolved);
    j["unresolved"] = threat_keys_to_json(r.unresolved);
    json tried = json::array();
    for (const EgoBehavior b : r.candidates_tried) tried.push_back(to_string(b));
    j["candidates_tried"] = std::move(tried);
    return j;
}

inline ArbitrationResult arbitration_from_json(const json& j, const std::string& path) {
    ArbitrationResult r;
    if (!parse_ego_behavior(schema::text(j.at("selected"), path + "/selected"), r.selected))
        throw SchemaError(path + "/selected", "unknown ego behavior");
    if (!j.at("max_threat").is_null()) {
        MaxThreat mt;
        const json& jm = j.at("max_threat");
        mt.object_id = schema::text(jm.at("object"), path + "/max_threat/object");
        if (!parse_object_behavior(schema::text(jm.at("behavior"), path + "/max_threat/behavior"),
                                   mt.behavior))
            throw SchemaError(path + "/max_threat/behavior", "unknown behavior");
        mt.theta = schema::number(jm.at("theta"), path + "/max_threat/theta");
        r.max_threat = mt;
    }
    r.resolved = threat_keys_from_json(j.at("resolved"), path + "/resolved");
    r.unresolved = threat_keys_from_json(j.at("unresolved"), path + "/unresolved");
    for (std::size_t i = 0; i < schema::array(j.at("candidates_tried"), path).size(); ++i) {
        EgoBehavior b;
        if (!parse_ego_behavior(j.at("candidates_tried")[i].get<std::string>(), b))
            throw SchemaError(path + "/candidates_tried", "unknown ego behavior");
        r.candidates_tried.push_back(b);
    }
    return r;
}

inline json tick_to_json(const TickRecord& r) {
    json j;
    j["tick"] = r.tick;
    j["clock"] = r.clock;
    j["ego"] = schema::state_to_json(r.ego);
    json jp;
    for (const auto& [id, state] : r.participants) jp[id] = schema::state_to_json(state);
    j["participants"] = std::move(jp);
    json jthreats = json::array();
    for (const auto& e : r.threats.entries) jthreats.push_back(threat_entry_to_json(e));
    j["threats"] = std::move(jthreats);
    j["arbitration"] = arbitration_to_json(r.arbitration);
    json jrecords = json::array();
    for (const auto& rec : r.arbitration.description.records) jrecords.push_back(rec.text);
    j["description"] = json{{"records", std::move(jrecords)},
                            {"summary", r.arbitration.description.summary}};
    return j;
}

inline TickRecord tick_from_json(const json& j, const TimeHorizon& horizon,
                                 const std::string& path) {
    TickRecord r;
    r.tick = schema::uinteger(j.at("tick"), path + "/tick");
    r.clock = schema::number(j.at("clock"), path + "/clock");
    r.ego = schema::state(j.at("ego"), path + "/ego");
    for (const auto& [id, js] : j.at("participants").items())
        r.participants[id] = schema::state(js, path + "/participants/" + id);
    r.threats.horizon = horizon;
    const json& jthreats = schema::array(j.at("threats"), path + "/threats");
    for (std::size_t i = 0; i < jthreats.size(); ++i)
        r.threats.entries.push_back(
            threat_entry_from_json(jthreats[i], path + "/threats/" + std::to_string(i)));
    r.arbitration = arbitration_from_json(j.at("arbitration"), path + "/arbitration");
    const json& jd = j.at("description");
    for (const auto& line : jd.at("records")) {
        Explanation ex;
        ex.text = line.get<std::string>();
        r.arbitration.description.records.push_back(std::move(ex));
    }
    r.arbitration.description.summary = jd.at("summary").get<std::string>();
    return r;
}

}  // namespace detail

/// Line-delimited trace: a header line (scenario, config hash, seed) followed
/// by one record per tick.
inline std::string trace_to_jsonl(const TraceLog& trace) {
    std::string out;
    json header;
    header["schema_version"] = 1;
    header["scenario_name"] = trace.scenario.name;
    header["config_hash"] = trace.config_hash;
    header["seed"] = trace.scenario.seed;
    header["scenario"] = trace.scenario.to_json();
    out += header.dump();
    out += '\n';
    for (const auto& tick : trace.ticks) {
        out += detail::tick_to_json(tick).dump();
        out += '\n';
    }
    return out;
}

inline TraceLog parse_trace(const std::string& text) {
    TraceLog trace;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("/", "empty trace");
    json header;
    try {
        header = json::parse(line);
    } catch (const json::parse_error& e) {
        throw SchemaError("/header", e.what());
    }
    trace.scenario = parse_scenario(header.at("scenario").dump());
    trace.config_hash = schema::text(header.at("config_hash"), "/header/config_hash");

    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError("/tick/" + std::to_string(n), e.what());
        }
        trace.ticks.push_back(
            detail::tick_from_json(j, trace.scenario.horizon, "/tick/" + std::to_string(n)));
        if (trace.ticks.size() > 1 &&
            trace.ticks.back().tick <= trace.ticks[trace.ticks.size() - 2].tick)
            throw SemanticError("/tick/" + std::to_string(n), "tick numbers must increase");
        ++n;
    }
    return trace;
}

inline TraceLog load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_trace(buf.str());
}

/// Write the trace, one occupancy-grid snapshot per tick, and a tab-separated
/// plot table (tick, max threat, selected behavior, per-object threat).
/// Returns the written paths; file contents carry no timestamps, so repeated
/// runs with identical inputs produce identical bytes.
inline std::vector<std::string> emit_outputs(const TraceLog& trace, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError(out_dir);

    std::vector<std::string> written;

    const std::string trace_path = out_dir + "/" + trace.scenario.name + ".trace.jsonl";
    {
        std::ofstream out(trace_path, std::ios::binary);
        if (!out) throw IoError(trace_path);
        out << trace_to_jsonl(trace);
        if (!out) throw IoError(trace_path);
    }
    written.push_back(trace_path);

    WorldState world = world_from_scenario(trace.scenario);
    for (const auto& tick : trace.ticks) {
        world.ego = tick.ego;
        world.clock = tick.clock;
        for (const auto& [id, state] : tick.participants) {
            auto it = world.participants.find(id);
            if (it != world.participants.end()) it->second.state = state;
        }
        const OccupancyGrid grid = render_grid(world, trace.scenario.grid);
        char name[32];
        std::snprintf(name, sizeof name, "grid_%06zu.pgm", tick.tick);
        const std::string grid_path = out_dir + "/" + name;
        write_pgm(grid, grid_path);
        written.push_back(grid_path);
    }

    const std::string plot_path = out_dir + "/plot.tsv";
    {
        std::ofstream out(plot_path, std::ios::binary);
        if (!out) throw IoError(plot_path);

        std::vector<std::string> object_ids;
        for (const auto& p : trace.scenario.participants) object_ids.push_back(p.id);
        std::sort(object_ids.begin(), object_ids.end());

        out << "tick\tclock\ttheta_max\tselected";
        for (const auto& id : object_ids) out << "\ttheta:" << id;
        out << "\n";

        char buf[64];
        for (const auto& tick : trace.ticks) {
            out << tick.tick;
            std::snprintf(buf, sizeof buf, "\t%.3f", tick.clock);
            out << buf;
            const double theta_max =
                tick.arbitration.max_threat ? tick.arbitration.max_threat->theta : 0.0;
            std::snprintf(buf, sizeof buf, "\t%.6f", theta_max);
            out << buf << "\t" << to_string(tick.arbitration.selected);
            for (const auto& id : object_ids) {
                double theta = 0.0;
                for (const auto& e : tick.threats.entries)
                    if (e.object_id == id) theta = std::max(theta, e.theta);
                std::snprintf(buf, sizeof buf, "\t%.6f", theta);
                out << buf;
            }
            out << "\n";
        }
        if (!out) throw IoError(plot_path);
    }
    written.push_back(plot_path);
    return written;
}

}  // namespace arbsim
