#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arbsim/arbiter.hpp"
#include "arbsim/errors.hpp"
#include "arbsim/grid.hpp"
#include "arbsim/links.hpp"
#include "arbsim/random.hpp"
#include "arbsim/scene.hpp"
#include "arbsim/threat.hpp"
#include "arbsim/world.hpp"

namespace arbsim {

using json = nlohmann::ordered_json;

enum class ScenarioMode { GoldenFixture, ClosedLoop };

inline const char* to_string(ScenarioMode m) {
    return m == ScenarioMode::GoldenFixture ? "golden_fixture" : "closed_loop";
}

/// Scripted ground-truth motion of a participant during closed-loop episodes.
enum class MotionPolicy { LaneFollow, Stop, LaneChangeLeft, LaneChangeRight, Sampled };

inline const char* to_string(MotionPolicy m) {
    switch (m) {
        case MotionPolicy::LaneFollow: return "lane_follow";
        case MotionPolicy::Stop: return "stop";
        case MotionPolicy::LaneChangeLeft: return "lane_change_left";
        case MotionPolicy::LaneChangeRight: return "lane_change_right";
        case MotionPolicy::Sampled: return "sampled";
    }
    return "?";
}

struct ScenarioParticipant {
    std::string id;
    std::string kind = "TrafficCar";
    KinematicState state;
    std::optional<int> lane;
    double length = 4.5;
    double width = 2.0;
    std::map<std::string, std::string> annotations;
    MotionPolicy motion = MotionPolicy::LaneFollow;
    std::optional<PinnedThreat> pinned;
};

struct MapGeometry {
    double lane_width = 3.5;
    std::vector<LaneGeometry> lanes;
    std::vector<BuildingGeometry> buildings;

    bool has_lane(int index) const {
        for (const auto& l : lanes)
            if (l.index == index) return true;
        return false;
    }

    const LaneGeometry* lane(int index) const {
        for (const auto& l : lanes)
            if (l.index == index) return &l;
        return nullptr;
    }
};

struct EgoSetup {
    KinematicState state;
    std::optional<int> lane;
    double length = 4.5;
    double width = 2.0;
    TaskTrajectory task;
};

/// One file fully determines an episode.
struct Scenario {
    int schema_version = 1;
    std::string name;
    ScenarioMode mode = ScenarioMode::ClosedLoop;
    std::uint64_t seed = 0;
    std::size_t ticks = 1;
    double s_min = 0.05;
    double near_threshold = 30.0;
    MapGeometry map;
    EgoSetup ego;
    std::vector<ScenarioParticipant> participants;
    SignificanceRubric rubric = SignificanceRubric::standard();
    ArbiterConfig arbiter;
    TimeHorizon horizon;
    GridSpec grid;
    KindRegistry kinds = KindRegistry::standard();
    ControlBounds bounds;

    json to_json() const;
    std::string serialize() const { return to_json().dump(2) + "\n"; }

    SceneConfig scene_config() const { return {near_threshold, map.lane_width}; }

    ThreatSimConfig threat_config() const {
        ThreatSimConfig cfg;
        cfg.lane_width = map.lane_width;
        cfg.lane_count = static_cast<int>(map.lanes.size());
        cfg.reduce_speed_decel = ego.task.comfort_accel;
        cfg.ego_length = ego.length;
        cfg.ego_width = ego.width;
        cfg.max_steer = bounds.max_steer;
        cfg.emergency_decel = bounds.max_accel;
        return cfg;
    }
};

// ---------------------------------------------------------------------------
// Strict schema helpers. Unknown keys fail the parse; every accessor carries
// a JSON-pointer-ish path for the error message.

namespace schema {

inline void check_keys(const json& node, const std::string& path,
                       const std::set<std::string>& allowed,
                       const std::set<std::string>& required) {
    if (!node.is_object()) throw SchemaError(path, "expected an object");
    for (const auto& [key, value] : node.items())
        if (!allowed.count(key))
            throw SchemaError(path == "/" ? "/" + key : path + "/" + key, "unknown key");
    for (const auto& key : required)
        if (!node.contains(key)) throw SchemaError(path, "missing required key '" + key + "'");
}

inline double number(const json& node, const std::string& path) {
    if (!node.is_number()) throw SchemaError(path, "expected a number");
    const double v = node.get<double>();
    if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
    return v;
}

inline int integer(const json& node, const std::string& path) {
    if (!node.is_number_integer()) throw SchemaError(path, "expected an integer");
    return node.get<int>();
}

inline std::uint64_t uinteger(const json& node, const std::string& path) {
    if (!node.is_number_unsigned()) throw SchemaError(path, "expected a non-negative integer");
    return node.get<std::uint64_t>();
}

inline std::string text(const json& node, const std::string& path) {
    if (!node.is_string()) throw SchemaError(path, "expected a string");
    return node.get<std::string>();
}

inline bool boolean(const json& node, const std::string& path) {
    if (!node.is_boolean()) throw SchemaError(path, "expected a boolean");
    return node.get<bool>();
}

inline const json& array(const json& node, const std::string& path) {
    if (!node.is_array()) throw SchemaError(path, "expected an array");
    return node;
}

inline Vec2 point(const json& node, const std::string& path) {
    if (!node.is_array() || node.size() != 2) throw SchemaError(path, "expected [x, y]");
    return {number(node[0], path + "/0"), number(node[1], path + "/1")};
}

inline std::vector<Vec2> points(const json& node, const std::string& path) {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < array(node, path).size(); ++i)
        out.push_back(point(node[i], path + "/" + std::to_string(i)));
    return out;
}

inline Relation relation(const json& node, const std::string& path) {
    const std::string s = text(node, path);
    for (const Relation r : {Relation::SameLaneAhead, Relation::SameLaneBehind,
                             Relation::LeftAdjacent, Relation::RightAdjacent, Relation::Crossing,
                             Relation::OffRoad})
        if (s == to_string(r)) return r;
    throw SchemaError(path, "unknown relation '" + s + "'");
}

inline RangeBand band(const json& node, const std::string& path) {
    const std::string s = text(node, path);
    if (s == "near") return RangeBand::Near;
    if (s == "far") return RangeBand::Far;
    throw SchemaError(path, "unknown range band '" + s + "'");
}

inline KinematicState state(const json& node, const std::string& path) {
    check_keys(node, path, {"x", "y", "heading", "speed", "wheelbase"},
               {"x", "y", "heading", "speed"});
    KinematicState s;
    s.x = number(node.at("x"), path + "/x");
    s.y = number(node.at("y"), path + "/y");
    s.heading = number(node.at("heading"), path + "/heading");
    s.speed = number(node.at("speed"), path + "/speed");
    if (node.contains("wheelbase")) s.wheelbase = number(node.at("wheelbase"), path + "/wheelbase");
    if (s.heading < -kPi || s.heading >= kPi)
        throw SemanticError(path + "/heading", "heading outside [-pi, pi)");
    if (s.speed < 0.0) throw SemanticError(path + "/speed", "speed must be >= 0");
    if (s.wheelbase <= 0.0) throw SemanticError(path + "/wheelbase", "wheelbase must be > 0");
    return s;
}

inline json state_to_json(const KinematicState& s) {
    return json{{"x", s.x}, {"y", s.y}, {"heading", s.heading}, {"speed", s.speed},
                {"wheelbase", s.wheelbase}};
}

inline json points_to_json(const std::vector<Vec2>& pts) {
    json arr = json::array();
    for (const Vec2& p : pts) arr.push_back(json::array({p.x, p.y}));
    return arr;
}

}  // namespace schema

namespace detail {

inline BehaviorDistribution parse_probability_row(const json& node, const std::string& path) {
    schema::check_keys(node, path, {"LaneFollow", "LaneChangeRight", "LaneChangeLeft", "Stop"},
                       {"LaneFollow", "LaneChangeRight", "LaneChangeLeft", "Stop"});
    BehaviorDistribution d;
    for (const ObjectBehavior b : kObjectBehaviors) {
        const double p = schema::number(node.at(to_string(b)), path + "/" + to_string(b));
        if (p < 0.0 || p > 1.0)
            throw SemanticError(path + "/" + to_string(b), "probability outside [0, 1]");
        d[b] = p;
    }
    if (!d.normalized()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "probabilities sum to %.2f", d.sum());
        throw SemanticError(path, buf);
    }
    return d;
}

inline std::array<double, 4> parse_impact_row(const json& node, const std::string& path) {
    schema::check_keys(node, path, {"LaneFollow", "LaneChangeRight", "LaneChangeLeft", "Stop"},
                       {"LaneFollow", "LaneChangeRight", "LaneChangeLeft", "Stop"});
    std::array<double, 4> out{};
    for (const ObjectBehavior b : kObjectBehaviors) {
        const std::string p = path + "/" + to_string(b);
        const json& v = node.at(to_string(b));
        if (v.is_null()) {
            out[static_cast<std::size_t>(b)] = kInfiniteTime;
        } else {
            const double tau = schema::number(v, p);
            if (tau <= 0.0) throw SemanticError(p, "impact time must be > 0 (null = no impact)");
            out[static_cast<std::size_t>(b)] = tau;
        }
    }
    return out;
}

inline SignificanceRubric parse_rubric(const json& node, const std::string& path) {
    schema::check_keys(node, path,
                       {"rules", "fallback", "fallback_tag", "external_occupancy",
                        "full_external_mesh", "external_pair"},
                       {"rules"});
    SignificanceRubric r;
    r.rules.clear();
    const json& rules = schema::array(node.at("rules"), path + "/rules");
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const std::string rp = path + "/rules/" + std::to_string(i);
        schema::check_keys(rules[i], rp, {"kind", "relation", "band", "significance", "tag"},
                           {"significance", "tag"});
        SignificanceRule rule;
        if (rules[i].contains("kind")) rule.kind = schema::text(rules[i].at("kind"), rp + "/kind");
        if (rules[i].contains("relation"))
            rule.relation = schema::relation(rules[i].at("relation"), rp + "/relation");
        if (rules[i].contains("band")) rule.band = schema::band(rules[i].at("band"), rp + "/band");
        rule.significance = schema::number(rules[i].at("significance"), rp + "/significance");
        if (rule.significance < 0.0 || rule.significance > 1.0)
            throw SemanticError(rp + "/significance", "significance outside [0, 1]");
        rule.tag = schema::text(rules[i].at("tag"), rp + "/tag");
        r.rules.push_back(std::move(rule));
    }
    if (node.contains("fallback"))
        r.fallback = schema::number(node.at("fallback"), path + "/fallback");
    if (node.contains("fallback_tag"))
        r.fallback_tag = schema::text(node.at("fallback_tag"), path + "/fallback_tag");
    if (node.contains("external_occupancy"))
        r.external_occupancy =
            schema::number(node.at("external_occupancy"), path + "/external_occupancy");
    if (node.contains("full_external_mesh"))
        r.full_external_mesh =
            schema::boolean(node.at("full_external_mesh"), path + "/full_external_mesh");
    if (node.contains("external_pair"))
        r.external_pair = schema::number(node.at("external_pair"), path + "/external_pair");
    return r;
}

inline json rubric_to_json(const SignificanceRubric& r) {
    json rules = json::array();
    for (const auto& rule : r.rules) {
        json jr;
        if (rule.kind) jr["kind"] = *rule.kind;
        if (rule.relation) jr["relation"] = to_string(*rule.relation);
        if (rule.band) jr["band"] = to_string(*rule.band);
        jr["significance"] = rule.significance;
        jr["tag"] = rule.tag;
        rules.push_back(std::move(jr));
    }
    return json{{"rules", std::move(rules)},
                {"fallback", r.fallback},
                {"fallback_tag", r.fallback_tag},
                {"external_occupancy", r.external_occupancy},
                {"full_external_mesh", r.full_external_mesh},
                {"external_pair", r.external_pair}};
}

}  // namespace detail

/// Parse and validate a scenario from UTF-8 text. Structural violations raise
/// SchemaError, domain violations SemanticError; unknown keys are rejected.
inline Scenario parse_scenario(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("/", e.what());
    }

    schema::check_keys(root, "/",
                       {"schema_version", "name", "mode", "seed", "ticks", "s_min",
                        "near_threshold", "map", "ego", "participants", "rubric", "arbiter",
                        "horizon", "grid", "kinds", "bounds"},
                       {"schema_version", "name", "mode", "map", "ego", "participants"});

    Scenario s;
    s.schema_version = schema::integer(root.at("schema_version"), "/schema_version");
    if (s.schema_version != 1)
        throw SchemaError("/schema_version", "unsupported schema version");
    s.name = schema::text(root.at("name"), "/name");

    const std::string mode = schema::text(root.at("mode"), "/mode");
    if (mode == "golden_fixture")
        s.mode = ScenarioMode::GoldenFixture;
    else if (mode == "closed_loop")
        s.mode = ScenarioMode::ClosedLoop;
    else
        throw SchemaError("/mode", "expected 'golden_fixture' or 'closed_loop'");

    if (root.contains("seed")) s.seed = schema::uinteger(root.at("seed"), "/seed");
    if (root.contains("ticks")) {
        const int t = schema::integer(root.at("ticks"), "/ticks");
        if (t < 1) throw SemanticError("/ticks", "must be >= 1");
        s.ticks = static_cast<std::size_t>(t);
    }
    if (root.contains("s_min")) {
        s.s_min = schema::number(root.at("s_min"), "/s_min");
        if (s.s_min < 0.0 || s.s_min > 1.0) throw SemanticError("/s_min", "must be in [0, 1]");
    }
    if (root.contains("near_threshold")) {
        s.near_threshold = schema::number(root.at("near_threshold"), "/near_threshold");
        if (s.near_threshold <= 0.0) throw SemanticError("/near_threshold", "must be > 0");
    }

    // --- map ---
    const json& jmap = root.at("map");
    schema::check_keys(jmap, "/map", {"lane_width", "lanes", "buildings"}, {"lanes"});
    if (jmap.contains("lane_width")) {
        s.map.lane_width = schema::number(jmap.at("lane_width"), "/map/lane_width");
        if (s.map.lane_width <= 0.0) throw SemanticError("/map/lane_width", "must be > 0");
    }
    const json& jlanes = schema::array(jmap.at("lanes"), "/map/lanes");
    for (std::size_t i = 0; i < jlanes.size(); ++i) {
        const std::string path = "/map/lanes/" + std::to_string(i);
        schema::check_keys(jlanes[i], path, {"index", "centerline", "width"},
                           {"index", "centerline"});
        LaneGeometry lane;
        lane.index = schema::integer(jlanes[i].at("index"), path + "/index");
        lane.centerline = schema::points(jlanes[i].at("centerline"), path + "/centerline");
        lane.width = jlanes[i].contains("width")
                         ? schema::number(jlanes[i].at("width"), path + "/width")
                         : s.map.lane_width;
        if (lane.centerline.size() < 2)
            throw SemanticError(path + "/centerline", "need at least 2 points");
        if (lane.width <= 0.0) throw SemanticError(path + "/width", "must be > 0");
        if (s.map.has_lane(lane.index))
            throw SemanticError(path + "/index", "duplicate lane index");
        s.map.lanes.push_back(std::move(lane));
    }
    if (jmap.contains("buildings")) {
        const json& jb = schema::array(jmap.at("buildings"), "/map/buildings");
        for (std::size_t i = 0; i < jb.size(); ++i) {
            const std::string path = "/map/buildings/" + std::to_string(i);
            schema::check_keys(jb[i], path, {"id", "polygon"}, {"id", "polygon"});
            BuildingGeometry b;
            b.id = schema::text(jb[i].at("id"), path + "/id");
            b.polygon = schema::points(jb[i].at("polygon"), path + "/polygon");
            if (b.polygon.size() < 3) throw SemanticError(path + "/polygon", "need >= 3 points");
            s.map.buildings.push_back(std::move(b));
        }
    }

    // --- kinds (registry extensions over the standard set) ---
    if (root.contains("kinds")) {
        const json& jk = root.at("kinds");
        if (!jk.is_object()) throw SchemaError("/kinds", "expected an object");
        for (const auto& [name, info] : jk.items()) {
            const std::string path = "/kinds/" + name;
            schema::check_keys(info, path, {"dynamic", "properties"}, {"dynamic"});
            KindInfo ki;
            ki.dynamic = schema::boolean(info.at("dynamic"), path + "/dynamic");
            if (info.contains("properties")) {
                const json& props = info.at("properties");
                if (!props.is_object()) throw SchemaError(path + "/properties", "expected an object");
                for (const auto& [key, value] : props.items()) {
                    if (value.is_boolean())
                        ki.default_properties[key] = PropertyValue{value.get<bool>()};
                    else if (value.is_number())
                        ki.default_properties[key] = PropertyValue{value.get<double>()};
                    else if (value.is_string())
                        ki.default_properties[key] = PropertyValue{value.get<std::string>()};
                    else
                        throw SchemaError(path + "/properties/" + key,
                                          "expected bool, number or string");
                }
            }
            s.kinds.kinds[name] = std::move(ki);
        }
    }

    // --- ego ---
    const json& jego = root.at("ego");
    schema::check_keys(jego, "/ego", {"state", "lane", "length", "width", "task"},
                       {"state", "task"});
    s.ego.state = schema::state(jego.at("state"), "/ego/state");
    if (jego.contains("lane")) s.ego.lane = schema::integer(jego.at("lane"), "/ego/lane");
    if (jego.contains("length")) s.ego.length = schema::number(jego.at("length"), "/ego/length");
    if (jego.contains("width")) s.ego.width = schema::number(jego.at("width"), "/ego/width");
    if (s.ego.length <= 0.0 || s.ego.width <= 0.0)
        throw SemanticError("/ego", "extent must be strictly positive");

    const json& jtask = jego.at("task");
    schema::check_keys(jtask, "/ego/task",
                       {"waypoints", "target_lane", "destination", "desired_speed",
                        "comfort_accel"},
                       {"waypoints", "target_lane", "desired_speed"});
    s.ego.task.waypoints = schema::points(jtask.at("waypoints"), "/ego/task/waypoints");
    s.ego.task.target_lane = schema::integer(jtask.at("target_lane"), "/ego/task/target_lane");
    if (jtask.contains("destination"))
        s.ego.task.destination = schema::text(jtask.at("destination"), "/ego/task/destination");
    s.ego.task.desired_speed =
        schema::number(jtask.at("desired_speed"), "/ego/task/desired_speed");
    if (jtask.contains("comfort_accel"))
        s.ego.task.comfort_accel =
            schema::number(jtask.at("comfort_accel"), "/ego/task/comfort_accel");
    try {
        s.ego.task.validate();
    } catch (const SemanticError& e) {
        throw SemanticError("/ego/" + e.path, e.reason);
    }
    if (!s.map.has_lane(s.ego.task.target_lane))
        throw SemanticError("/ego/task/target_lane", "dangling lane index");
    if (s.ego.lane && !s.map.has_lane(*s.ego.lane))
        throw SemanticError("/ego/lane", "dangling lane index");

    // --- participants ---
    const json& jparts = schema::array(root.at("participants"), "/participants");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < jparts.size(); ++i) {
        const std::string path = "/participants/" + std::to_string(i);
        schema::check_keys(jparts[i], path,
                           {"id", "kind", "state", "lane", "length", "width", "annotations",
                            "motion", "pinned"},
                           {"id", "kind", "state"});
        ScenarioParticipant p;
        p.id = schema::text(jparts[i].at("id"), path + "/id");
        if (p.id.empty()) throw SemanticError(path + "/id", "id must be non-empty");
        if (p.id == kEgoId) throw SemanticError(path + "/id", "'ego' is reserved");
        if (!ids.insert(p.id).second) throw SemanticError(path + "/id", "duplicate id");
        p.kind = schema::text(jparts[i].at("kind"), path + "/kind");
        if (!s.kinds.contains(p.kind))
            throw SemanticError(path + "/kind", "unknown kind '" + p.kind + "'");
        p.state = schema::state(jparts[i].at("state"), path + "/state");
        if (jparts[i].contains("lane")) {
            p.lane = schema::integer(jparts[i].at("lane"), path + "/lane");
            if (!s.map.has_lane(*p.lane)) throw SemanticError(path + "/lane", "dangling lane index");
        }
        if (jparts[i].contains("length"))
            p.length = schema::number(jparts[i].at("length"), path + "/length");
        if (jparts[i].contains("width"))
            p.width = schema::number(jparts[i].at("width"), path + "/width");
        if (p.length <= 0.0 || p.width <= 0.0)
            throw SemanticError(path, "extent must be strictly positive");
        if (jparts[i].contains("annotations")) {
            const json& ja = jparts[i].at("annotations");
            if (!ja.is_object()) throw SchemaError(path + "/annotations", "expected an object");
            for (const auto& [key, value] : ja.items())
                p.annotations[key] = schema::text(value, path + "/annotations/" + key);
        }
        if (jparts[i].contains("motion")) {
            const std::string m = schema::text(jparts[i].at("motion"), path + "/motion");
            bool found = false;
            for (const MotionPolicy mp :
                 {MotionPolicy::LaneFollow, MotionPolicy::Stop, MotionPolicy::LaneChangeLeft,
                  MotionPolicy::LaneChangeRight, MotionPolicy::Sampled})
                if (m == to_string(mp)) {
                    p.motion = mp;
                    found = true;
                }
            if (!found) throw SchemaError(path + "/motion", "unknown motion policy '" + m + "'");
        }
        if (jparts[i].contains("pinned")) {
            const json& jp = jparts[i].at("pinned");
            schema::check_keys(jp, path + "/pinned", {"probabilities", "impact_times"},
                               {"probabilities", "impact_times"});
            PinnedThreat pin;
            pin.probabilities =
                detail::parse_probability_row(jp.at("probabilities"), path + "/pinned/probabilities");
            pin.impact_times =
                detail::parse_impact_row(jp.at("impact_times"), path + "/pinned/impact_times");
            p.pinned = pin;
        }
        s.participants.push_back(std::move(p));
    }
    if (s.mode == ScenarioMode::GoldenFixture)
        for (const auto& p : s.participants)
            if (!p.pinned)
                throw SemanticError("/participants",
                                    "golden_fixture mode requires pinned tables for '" + p.id + "'");

    // --- optional config blocks ---
    if (root.contains("rubric")) s.rubric = detail::parse_rubric(root.at("rubric"), "/rubric");
    else s.rubric = SignificanceRubric::standard();

    if (root.contains("arbiter")) {
        const json& ja = root.at("arbiter");
        schema::check_keys(ja, "/arbiter", {"theta_accept", "tie_break"}, {});
        if (ja.contains("theta_accept")) {
            s.arbiter.theta_accept = schema::number(ja.at("theta_accept"), "/arbiter/theta_accept");
            if (s.arbiter.theta_accept < 0.0 || s.arbiter.theta_accept > 1.0)
                throw SemanticError("/arbiter/theta_accept", "must be in [0, 1]");
        }
        if (ja.contains("tie_break")) {
            const json& jt = schema::array(ja.at("tie_break"), "/arbiter/tie_break");
            s.arbiter.tie_break.clear();
            for (std::size_t i = 0; i < jt.size(); ++i) {
                EgoBehavior b;
                const std::string name =
                    schema::text(jt[i], "/arbiter/tie_break/" + std::to_string(i));
                if (!parse_ego_behavior(name, b))
                    throw SchemaError("/arbiter/tie_break/" + std::to_string(i),
                                      "unknown ego behavior '" + name + "'");
                s.arbiter.tie_break.push_back(b);
            }
        }
        try {
            s.arbiter.validate();
        } catch (const SemanticError&) {
            throw SemanticError("/arbiter/tie_break", "must be a total order over ego behaviors");
        }
    }

    if (root.contains("horizon")) {
        const json& jh = root.at("horizon");
        schema::check_keys(jh, "/horizon", {"t_c", "delta", "dt"}, {});
        if (jh.contains("t_c")) s.horizon.t_c = schema::number(jh.at("t_c"), "/horizon/t_c");
        if (jh.contains("delta")) s.horizon.delta = schema::number(jh.at("delta"), "/horizon/delta");
        if (jh.contains("dt")) s.horizon.dt = schema::number(jh.at("dt"), "/horizon/dt");
        s.horizon.validate();
    }

    if (root.contains("grid")) {
        const json& jg = root.at("grid");
        schema::check_keys(jg, "/grid",
                           {"width", "height", "resolution", "range", "fov_half_angle_deg"}, {});
        if (jg.contains("width"))
            s.grid.width = static_cast<std::size_t>(schema::integer(jg.at("width"), "/grid/width"));
        if (jg.contains("height"))
            s.grid.height =
                static_cast<std::size_t>(schema::integer(jg.at("height"), "/grid/height"));
        if (jg.contains("resolution"))
            s.grid.resolution = schema::number(jg.at("resolution"), "/grid/resolution");
        if (jg.contains("range")) s.grid.range = schema::number(jg.at("range"), "/grid/range");
        if (jg.contains("fov_half_angle_deg"))
            s.grid.fov_half_angle_deg =
                schema::number(jg.at("fov_half_angle_deg"), "/grid/fov_half_angle_deg");
        s.grid.validate();
    }

    if (root.contains("bounds")) {
        const json& jb = root.at("bounds");
        schema::check_keys(jb, "/bounds",
                           {"steer_rate", "speed", "max_steer", "max_accel"}, {});
        if (jb.contains("steer_rate")) {
            const Vec2 r = schema::point(jb.at("steer_rate"), "/bounds/steer_rate");
            s.bounds.steer_rate_min = r.x;
            s.bounds.steer_rate_max = r.y;
        }
        if (jb.contains("speed")) {
            const Vec2 r = schema::point(jb.at("speed"), "/bounds/speed");
            s.bounds.speed_min = r.x;
            s.bounds.speed_max = r.y;
        }
        if (jb.contains("max_steer"))
            s.bounds.max_steer = schema::number(jb.at("max_steer"), "/bounds/max_steer");
        if (jb.contains("max_accel"))
            s.bounds.max_accel = schema::number(jb.at("max_accel"), "/bounds/max_accel");
        if (s.bounds.steer_rate_min > s.bounds.steer_rate_max)
            throw SemanticError("/bounds/steer_rate", "min exceeds max");
        if (s.bounds.speed_min > s.bounds.speed_max || s.bounds.speed_min < 0.0)
            throw SemanticError("/bounds/speed", "need 0 <= min <= max");
    }

    return s;
}

inline Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

inline json Scenario::to_json() const {
    json root;
    root["schema_version"] = schema_version;
    root["name"] = name;
    root["mode"] = to_string(mode);
    root["seed"] = seed;
    root["ticks"] = ticks;
    root["s_min"] = s_min;
    root["near_threshold"] = near_threshold;

    json jlanes = json::array();
    for (const auto& l : map.lanes)
        jlanes.push_back(json{{"index", l.index},
                              {"centerline", schema::points_to_json(l.centerline)},
                              {"width", l.width}});
    json jbuildings = json::array();
    for (const auto& b : map.buildings)
        jbuildings.push_back(json{{"id", b.id}, {"polygon", schema::points_to_json(b.polygon)}});
    root["map"] = json{{"lane_width", map.lane_width},
                       {"lanes", std::move(jlanes)},
                       {"buildings", std::move(jbuildings)}};

    json jego;
    jego["state"] = schema::state_to_json(ego.state);
    if (ego.lane) jego["lane"] = *ego.lane;
    jego["length"] = ego.length;
    jego["width"] = ego.width;
    jego["task"] = json{{"waypoints", schema::points_to_json(ego.task.waypoints)},
                        {"target_lane", ego.task.target_lane},
                        {"destination", ego.task.destination},
                        {"desired_speed", ego.task.desired_speed},
                        {"comfort_accel", ego.task.comfort_accel}};
    root["ego"] = std::move(jego);

    json jparts = json::array();
    for (const auto& p : participants) {
        json jp;
        jp["id"] = p.id;
        jp["kind"] = p.kind;
        jp["state"] = schema::state_to_json(p.state);
        if (p.lane) jp["lane"] = *p.lane;
        jp["length"] = p.length;
        jp["width"] = p.width;
        if (!p.annotations.empty()) {
            json ja;
            for (const auto& [k, v] : p.annotations) ja[k] = v;
            jp["annotations"] = std::move(ja);
        }
        jp["motion"] = to_string(p.motion);
        if (p.pinned) {
            json probs, taus;
            for (const ObjectBehavior b : kObjectBehaviors) {
                probs[to_string(b)] = p.pinned->probabilities[b];
                const double tau = p.pinned->impact_times[static_cast<std::size_t>(b)];
                taus[to_string(b)] = std::isfinite(tau) ? json(tau) : json(nullptr);
            }
            jp["pinned"] = json{{"probabilities", std::move(probs)},
                                {"impact_times", std::move(taus)}};
        }
        jparts.push_back(std::move(jp));
    }
    root["participants"] = std::move(jparts);

    root["rubric"] = detail::rubric_to_json(rubric);

    json jtie = json::array();
    for (const EgoBehavior b : arbiter.tie_break) jtie.push_back(to_string(b));
    root["arbiter"] = json{{"theta_accept", arbiter.theta_accept}, {"tie_break", std::move(jtie)}};
    root["horizon"] = json{{"t_c", horizon.t_c}, {"delta", horizon.delta}, {"dt", horizon.dt}};
    root["grid"] = json{{"width", grid.width},
                        {"height", grid.height},
                        {"resolution", grid.resolution},
                        {"range", grid.range},
                        {"fov_half_angle_deg", grid.fov_half_angle_deg}};

    json jkinds;
    for (const auto& [name, info] : kinds.kinds) {
        json jk;
        jk["dynamic"] = info.dynamic;
        if (!info.default_properties.empty()) {
            json props;
            for (const auto& [key, value] : info.default_properties) {
                if (const bool* b = std::get_if<bool>(&value)) props[key] = *b;
                else if (const double* d = std::get_if<double>(&value)) props[key] = *d;
                else props[key] = std::get<std::string>(value);
            }
            jk["properties"] = std::move(props);
        }
        jkinds[name] = std::move(jk);
    }
    root["kinds"] = std::move(jkinds);

    root["bounds"] = json{{"steer_rate", json::array({bounds.steer_rate_min, bounds.steer_rate_max})},
                          {"speed", json::array({bounds.speed_min, bounds.speed_max})},
                          {"max_steer", bounds.max_steer},
                          {"max_accel", bounds.max_accel}};
    return root;
}

/// 16-hex-digit hash of the canonical scenario serialization.
inline std::string config_hash(const Scenario& s) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(s.to_json().dump())));
    return buf;
}

}  // namespace arbsim
