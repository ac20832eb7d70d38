#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arbsim/behavior.hpp"
#include "arbsim/links.hpp"
#include "arbsim/threat.hpp"

namespace arbsim {

struct ArbiterConfig {
    double theta_accept = 0.05;  // maximum accepted threat level
    // Preference order used for tie breaks: least laterally disruptive first.
    std::vector<EgoBehavior> tie_break = {EgoBehavior::ReduceSpeed, EgoBehavior::KeepLane,
                                          EgoBehavior::LaneChangeRight, EgoBehavior::LaneChangeLeft,
                                          EgoBehavior::EmergencyStop};

    void validate() const {
        // theta_accept carries no upper bound here: the argmax is invariant
        // under positive scaling of thetas and threshold together, and scaled
        // thresholds may exceed 1. The scenario schema pins [0, 1] for files.
        if (theta_accept < 0.0)
            throw SemanticError("arbiter/theta_accept", "must be >= 0");
        if (tie_break.size() != kEgoBehaviors.size())
            throw SemanticError("arbiter/tie_break", "must be a total order over ego behaviors");
        for (const EgoBehavior b : kEgoBehaviors)
            if (std::count(tie_break.begin(), tie_break.end(), b) != 1)
                throw SemanticError("arbiter/tie_break", "must list every ego behavior once");
    }

    std::size_t rank(EgoBehavior b) const {
        for (std::size_t i = 0; i < tie_break.size(); ++i)
            if (tie_break[i] == b) return i;
        return tie_break.size();
    }
};

using ThreatKey = std::pair<std::string, ObjectBehavior>;

/// Per-object explanation record of the scene description.
struct Explanation {
    std::string object_id;
    Relation relation = Relation::OffRoad;
    RangeBand band = RangeBand::Far;
    double significance = 0.0;
    ObjectBehavior dominant = ObjectBehavior::LaneFollow;
    double probability = 0.0;
    double impact_time = kInfiniteTime;
    std::optional<EgoBehavior> mitigation;  // absent when nothing to mitigate
    std::string text;
};

struct Description {
    std::vector<Explanation> records;  // exactly one per significant object
    std::string summary;

    std::size_t n_significant() const { return records.size(); }

    std::string text() const {
        std::string out;
        for (const auto& r : records) {
            out += r.text;
            out += '\n';
        }
        out += summary;
        out += '\n';
        return out;
    }
};

struct MaxThreat {
    std::string object_id;
    ObjectBehavior behavior = ObjectBehavior::LaneFollow;
    double theta = 0.0;
};

struct ArbitrationResult {
    EgoBehavior selected = EgoBehavior::KeepLane;
    std::optional<MaxThreat> max_threat;
    std::vector<ThreatKey> resolved;
    std::vector<ThreatKey> unresolved;
    std::vector<EgoBehavior> candidates_tried;
    Description description;  // filled by describe()
};

/// Recomputed impact time of one threat cell while the ego executes a
/// candidate behavior.
using ResimulateFn = std::function<double(EgoBehavior, const ThreatEntry&)>;

namespace detail {

inline std::string format_explanation(const Explanation& e) {
    char buf[256];
    if (e.mitigation) {
        std::snprintf(buf, sizeof buf,
                      "%s (%s, %s; significance %.2f): %s p=%.2f, impact %.1f s; mitigated by %s",
                      e.object_id.c_str(), to_string(e.relation), to_string(e.band),
                      e.significance, to_string(e.dominant), e.probability, e.impact_time,
                      to_string(*e.mitigation));
    } else {
        std::snprintf(buf, sizeof buf,
                      "%s (%s, %s; significance %.2f): %s p=%.2f, no impact within horizon",
                      e.object_id.c_str(), to_string(e.relation), to_string(e.band),
                      e.significance, to_string(e.dominant), e.probability);
    }
    return buf;
}

}  // namespace detail

/// Select the ego behavior resolving the maximal threat. Cells above
/// theta_accept form the active set A; the counter behavior of the argmax
/// cell is verified against all of A by re-simulation, and further proposed
/// counters are tried in descending threat order. When nothing resolves all
/// of A the candidate with the smallest unresolved threat sum is selected --
/// the vehicle always receives a behavior.
inline ArbitrationResult select_optimal(const ThreatMatrix& threats, const ArbiterConfig& cfg,
                                        const ResimulateFn& resimulate) {
    cfg.validate();
    ArbitrationResult result;

    std::vector<const ThreatEntry*> above;
    for (const auto& e : threats.entries)
        if (e.theta > cfg.theta_accept) above.push_back(&e);

    if (above.empty()) {
        result.selected = EgoBehavior::KeepLane;
        return result;
    }

    // Canonical order: theta desc, significance desc, counter preference,
    // object id, behavior index.
    std::sort(above.begin(), above.end(), [&cfg](const ThreatEntry* a, const ThreatEntry* b) {
        if (a->theta != b->theta) return a->theta > b->theta;
        if (a->significance != b->significance) return a->significance > b->significance;
        const auto ra = cfg.rank(a->counter), rb = cfg.rank(b->counter);
        if (ra != rb) return ra < rb;
        if (a->object_id != b->object_id) return a->object_id < b->object_id;
        return static_cast<int>(a->behavior) < static_cast<int>(b->behavior);
    });

    result.max_threat = MaxThreat{above.front()->object_id, above.front()->behavior,
                                  above.front()->theta};

    std::vector<EgoBehavior> candidates;
    for (const ThreatEntry* e : above)
        if (std::find(candidates.begin(), candidates.end(), e->counter) == candidates.end())
            candidates.push_back(e->counter);

    struct Outcome {
        EgoBehavior candidate;
        std::vector<ThreatKey> resolved;
        std::vector<ThreatKey> unresolved;
        double residual = 0.0;
    };

    std::optional<Outcome> best;
    for (const EgoBehavior candidate : candidates) {
        result.candidates_tried.push_back(candidate);
        Outcome outcome{candidate, {}, {}, 0.0};
        for (const ThreatEntry* e : above) {
            const double tau = resimulate(candidate, *e);
            if (!std::isfinite(tau) || tau > threats.horizon.delta) {
                outcome.resolved.push_back({e->object_id, e->behavior});
            } else {
                outcome.unresolved.push_back({e->object_id, e->behavior});
                outcome.residual += e->theta;
            }
        }
        if (outcome.unresolved.empty()) {
            best = std::move(outcome);
            break;
        }
        if (!best || outcome.residual < best->residual) best = std::move(outcome);
    }

    result.selected = best->candidate;
    result.resolved = std::move(best->resolved);
    result.unresolved = std::move(best->unresolved);
    std::sort(result.resolved.begin(), result.resolved.end());
    std::sort(result.unresolved.begin(), result.unresolved.end());
    return result;
}

/// Render the natural-language description: one templated record per
/// significant object plus a summary line naming the selected behavior and
/// the dominant threat. Identical inputs produce identical bytes.
inline Description describe(const LinkSet& links, const ArbitrationResult& result,
                            const ThreatMatrix& threats) {
    (void)links;  // significances already travel on the threat entries
    Description desc;

    for (const std::string& id : threats.object_ids()) {
        const ThreatEntry* dominant = nullptr;
        for (const auto& e : threats.entries) {
            if (e.object_id != id) continue;
            if (!dominant || e.theta > dominant->theta ||
                (e.theta == dominant->theta && e.probability > dominant->probability))
                dominant = &e;
        }
        Explanation ex;
        ex.object_id = id;
        ex.relation = dominant->relation;
        ex.band = dominant->band;
        ex.significance = dominant->significance;
        ex.dominant = dominant->behavior;
        ex.probability = dominant->probability;
        ex.impact_time = dominant->impact_time;
        if (dominant->active) ex.mitigation = dominant->counter;
        ex.text = detail::format_explanation(ex);
        desc.records.push_back(std::move(ex));
    }

    const std::size_t n = result.resolved.size();
    const std::size_t m = n + result.unresolved.size();
    if (result.max_threat) {
        char buf[192];
        std::snprintf(buf, sizeof buf,
                      "Selected %s: resolves %zu of %zu active threats; "
                      "dominant threat %s/%s (Θ=%.2f)",
                      to_string(result.selected), n, m, result.max_threat->object_id.c_str(),
                      to_string(result.max_threat->behavior), result.max_threat->theta);
        desc.summary = buf;
    } else {
        desc.summary = "No active threats; KeepLane";
    }
    return desc;
}

}  // namespace arbsim
