#pragma once

#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "arbsim/errors.hpp"
#include "arbsim/geometry.hpp"
#include "arbsim/kinematics.hpp"

namespace arbsim {

/// Object property value: number, text, or flag.
using PropertyValue = std::variant<double, std::string, bool>;
using PropertyMap = std::map<std::string, PropertyValue>;

/// Raw entity record of a perceived scene, before classification.
struct PerceivedEntity {
    std::string id;
    std::string kind_tag;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // rad in [-pi, pi)
    double length = 0.0;   // m, extent along heading
    double width = 0.0;    // m
    std::map<std::string, std::string> annotations;  // e.g. "turn_signal" -> "right"
};

struct PerceivedScene {
    std::vector<PerceivedEntity> entities;

    /// Entity ids unique, extents strictly positive, headings in [-pi, pi).
    void validate() const {
        std::set<std::string> ids;
        for (const auto& e : entities) {
            if (!ids.insert(e.id).second)
                throw SemanticError("scene/" + e.id, "duplicate entity id");
            if (e.length <= 0.0 || e.width <= 0.0)
                throw SemanticError("scene/" + e.id, "extent must be strictly positive");
            if (e.heading < -kPi || e.heading >= kPi)
                throw SemanticError("scene/" + e.id, "heading outside [-pi, pi)");
        }
    }
};

/// Per-kind classification data. The kind set is extensible config, not an
/// enum: the a-priori class collection differs per deployment.
struct KindInfo {
    bool dynamic = false;
    PropertyMap default_properties;
};

struct KindRegistry {
    std::map<std::string, KindInfo> kinds;

    bool contains(const std::string& kind) const { return kinds.count(kind) != 0; }
    bool is_dynamic(const std::string& kind) const { return kinds.at(kind).dynamic; }

    /// Registry with the stock kinds: TrafficCar, Pedestrian, Lane,
    /// TrafficSign, Building.
    static KindRegistry standard() {
        KindRegistry r;
        r.kinds["TrafficCar"] = {true, {}};
        r.kinds["Pedestrian"] = {true, {{"crossing_intent", PropertyValue{false}}}};
        r.kinds["Lane"] = {false, {}};
        r.kinds["TrafficSign"] = {false, {}};
        r.kinds["Building"] = {false, {}};
        return r;
    }
};

/// Optional per-entity measurements refining the perceived scene.
struct Measurement {
    std::optional<double> speed;    // m/s
    std::optional<double> range;    // m, to ego
    std::optional<double> bearing;  // rad, in ego frame
    std::optional<int> lane;        // 1 = rightmost
    std::optional<double> length;   // m
    std::optional<double> width;    // m
};

struct MeasurementSet {
    std::map<std::string, Measurement> by_id;

    void validate() const {
        for (const auto& [id, m] : by_id)
            if (m.range && *m.range < 0.0)
                throw SemanticError("measurements/" + id, "range must be >= 0");
    }
};

enum class Relation { SameLaneAhead, SameLaneBehind, LeftAdjacent, RightAdjacent, Crossing, OffRoad };
enum class RangeBand { Near, Far };

inline const char* to_string(Relation r) {
    switch (r) {
        case Relation::SameLaneAhead: return "ahead";
        case Relation::SameLaneBehind: return "behind";
        case Relation::LeftAdjacent: return "left";
        case Relation::RightAdjacent: return "right";
        case Relation::Crossing: return "crossing";
        case Relation::OffRoad: return "off-road";
    }
    return "?";
}

inline const char* to_string(RangeBand b) { return b == RangeBand::Near ? "near" : "far"; }

struct SceneConfig {
    double near_threshold = 30.0;  // m; Near iff range <= near_threshold
    double lane_width = 3.5;       // m, used by the geometric relation check
};

/// A classified scene object. Relation and band stay unset until
/// measurements are attached.
struct SceneObject {
    std::string id;
    std::string kind;
    bool dynamic = false;
    KinematicState state;
    std::optional<int> lane;
    PropertyMap properties;
    std::optional<Relation> relation;
    std::optional<RangeBand> band;

    double length() const { return number_property("length", 4.5); }
    double width() const { return number_property("width", 2.0); }

    OrientedRect footprint() const {
        return {{state.x, state.y}, state.heading, length(), width()};
    }

    bool flag_property(const std::string& key) const {
        auto it = properties.find(key);
        if (it == properties.end()) return false;
        if (const bool* b = std::get_if<bool>(&it->second)) return *b;
        return false;
    }

    std::optional<std::string> text_property(const std::string& key) const {
        auto it = properties.find(key);
        if (it == properties.end()) return std::nullopt;
        if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
        return std::nullopt;
    }

    double number_property(const std::string& key, double fallback) const {
        auto it = properties.find(key);
        if (it == properties.end()) return fallback;
        if (const double* d = std::get_if<double>(&it->second)) return *d;
        return fallback;
    }
};

struct ObjectSet {
    std::map<std::string, SceneObject> objects;

    std::size_t size() const { return objects.size(); }
    bool empty() const { return objects.empty(); }
    bool contains(const std::string& id) const { return objects.count(id) != 0; }
    const SceneObject& at(const std::string& id) const { return objects.at(id); }
    SceneObject& at(const std::string& id) { return objects.at(id); }
    void insert(SceneObject obj) { objects[obj.id] = std::move(obj); }
};

namespace detail {

/// Annotation strings become typed properties: flags for "true"/"false",
/// numbers when fully numeric, text otherwise.
inline PropertyValue coerce_annotation(const std::string& value) {
    if (value == "true") return PropertyValue{true};
    if (value == "false") return PropertyValue{false};
    char* end = nullptr;
    const double d = std::strtod(value.c_str(), &end);
    if (end && *end == '\0' && end != value.c_str()) return PropertyValue{d};
    return PropertyValue{value};
}

}  // namespace detail

/// Transform a perceived scene into the typed object set. One object per
/// entity, classified against the registry; relation and band remain unset.
inline ObjectSet generate_objects(const PerceivedScene& scene, const KindRegistry& registry) {
    scene.validate();
    ObjectSet out;
    for (const auto& e : scene.entities) {
        if (!registry.contains(e.kind_tag)) throw UnknownKindError(e.id, e.kind_tag);
        SceneObject obj;
        obj.id = e.id;
        obj.kind = e.kind_tag;
        obj.dynamic = registry.is_dynamic(e.kind_tag);
        obj.state.x = e.x;
        obj.state.y = e.y;
        obj.state.heading = e.heading;
        obj.state.speed = 0.0;
        obj.properties = registry.kinds.at(e.kind_tag).default_properties;
        obj.properties["length"] = PropertyValue{e.length};
        obj.properties["width"] = PropertyValue{e.width};
        for (const auto& [key, value] : e.annotations)
            obj.properties[key] = detail::coerce_annotation(value);
        out.insert(std::move(obj));
    }
    return out;
}

/// Relation of an object to the ego, from the ego-frame pose. Lane membership
/// is discretized by lateral offset in whole lane widths; transverse-moving
/// dynamic objects and pedestrians with crossing intent classify as Crossing.
inline Relation relation_to_ego(const SceneObject& obj, const KinematicState& ego,
                                const SceneConfig& cfg) {
    const Vec2 local = to_body_frame({obj.state.x, obj.state.y}, {ego.x, ego.y}, ego.heading);

    if (obj.dynamic) {
        const double rel_heading = std::abs(wrap_angle(obj.state.heading - ego.heading));
        const bool transverse = rel_heading > kPi / 4.0 && rel_heading < 3.0 * kPi / 4.0;
        if (obj.flag_property("crossing_intent") || (transverse && obj.state.speed > 0.0))
            return Relation::Crossing;
    }

    const double half = 0.5 * cfg.lane_width;
    if (std::abs(local.y) <= half)
        return local.x >= 0.0 ? Relation::SameLaneAhead : Relation::SameLaneBehind;
    if (local.y > half && local.y <= 3.0 * half) return Relation::LeftAdjacent;
    if (local.y < -half && local.y >= -3.0 * half) return Relation::RightAdjacent;
    return Relation::OffRoad;
}

/// Attach measurements: kinematics, lane index, relation to ego and range
/// band. Objects without measurements keep speed 0 and get their relation
/// from pose alone. Idempotent for a fixed measurement set.
inline ObjectSet attach_measurements(const ObjectSet& objects, const MeasurementSet& m,
                                     const KinematicState& ego, const SceneConfig& cfg = {}) {
    m.validate();
    for (const auto& [id, meas] : m.by_id)
        if (!objects.contains(id)) throw DanglingMeasurementError(id);

    ObjectSet out = objects;
    for (auto& [id, obj] : out.objects) {
        double range = (obj.state.position() - Vec2{ego.x, ego.y}).norm();
        auto it = m.by_id.find(id);
        if (it != m.by_id.end()) {
            const Measurement& meas = it->second;
            if (meas.speed) obj.state.speed = *meas.speed;
            if (meas.range) range = *meas.range;
            if (meas.lane) obj.lane = *meas.lane;
            if (meas.length) obj.properties["length"] = PropertyValue{*meas.length};
            if (meas.width) obj.properties["width"] = PropertyValue{*meas.width};
        }
        obj.relation = relation_to_ego(obj, ego, cfg);
        obj.band = range <= cfg.near_threshold ? RangeBand::Near : RangeBand::Far;
    }
    return out;
}

/// Split into (static, dynamic) by the registry flag carried on each object.
inline std::pair<ObjectSet, ObjectSet> partition_static_dynamic(const ObjectSet& objects) {
    std::pair<ObjectSet, ObjectSet> out;
    for (const auto& [id, obj] : objects.objects)
        (obj.dynamic ? out.second : out.first).insert(obj);
    return out;
}

}  // namespace arbsim
