#include <catch2/catch_amalgamated.hpp>

#include "arbsim/links.hpp"
#include "arbsim/scene.hpp"

using namespace arbsim;

namespace {

SceneObject make_object(const std::string& id, const std::string& kind, bool dynamic,
                        Relation rel, RangeBand band, std::optional<int> lane = {}) {
    SceneObject obj;
    obj.id = id;
    obj.kind = kind;
    obj.dynamic = dynamic;
    obj.relation = rel;
    obj.band = band;
    obj.lane = lane;
    return obj;
}

TaskTrajectory straight_task() {
    TaskTrajectory t;
    t.waypoints = {{-50, 0}, {900, 0}};
    t.target_lane = 2;
    t.desired_speed = 20.0;
    return t;
}

ObjectSet fig5_objects() {
    ObjectSet objects;
    objects.insert(make_object("Car1", "TrafficCar", true, Relation::LeftAdjacent,
                               RangeBand::Near, 3));
    objects.insert(make_object("Car2", "TrafficCar", true, Relation::SameLaneAhead,
                               RangeBand::Far, 2));
    objects.insert(make_object("Car3", "TrafficCar", true, Relation::RightAdjacent,
                               RangeBand::Near, 1));
    for (int i = 1; i <= 3; ++i) {
        SceneObject lane = make_object("Lane" + std::to_string(i), "Lane", false,
                                       Relation::SameLaneAhead, RangeBand::Near, i);
        lane.state.x = 425.0;
        lane.state.y = 3.5 * (i - 2);
        objects.insert(lane);
    }
    return objects;
}

}  // namespace

TEST_CASE("default rubric reproduces the worked-example significances") {
    const LinkSet links =
        generate_links(fig5_objects(), straight_task(), SignificanceRubric::standard());
    CHECK(links.internal_significance("Car1") == 0.3);
    CHECK(links.internal_significance("Car2") == 0.6);
    CHECK(links.internal_significance("Car3") == 0.1);
}

TEST_CASE("single object same lane ahead near scores 0.9") {
    ObjectSet objects;
    objects.insert(make_object("C", "TrafficCar", true, Relation::SameLaneAhead, RangeBand::Near));
    const LinkSet links =
        generate_links(objects, straight_task(), SignificanceRubric::standard());
    CHECK(links.internal_significance("C") == 0.9);
    CHECK(links.find(kEgoId, "C")->rationale == "same-lane-ahead-near");
}

TEST_CASE("ego alone on the road links only the lanes") {
    ObjectSet objects;
    for (int i = 1; i <= 2; ++i) {
        SceneObject lane = make_object("Lane" + std::to_string(i), "Lane", false,
                                       Relation::SameLaneAhead, RangeBand::Near, i);
        lane.state.y = 3.5 * (i - 1);
        objects.insert(lane);
    }
    TaskTrajectory task = straight_task();
    task.target_lane = 1;
    const LinkSet links = generate_links(objects, task, SignificanceRubric::standard());
    CHECK(links.size() == 2);
    for (const auto& [key, link] : links.links) {
        CHECK(link.source == kEgoId);
        CHECK(link.rationale == "lane");
    }
}

TEST_CASE("external links connect dynamic objects to their occupied lanes") {
    const LinkSet links =
        generate_links(fig5_objects(), straight_task(), SignificanceRubric::standard());
    const Link* l = links.find("Car1", "Lane3");
    REQUIRE(l != nullptr);
    CHECK(l->link_class == LinkClass::External);
    CHECK(l->rationale == "occupies-lane");
    CHECK(links.find("Car2", "Lane2") != nullptr);
    CHECK(links.find("Car3", "Lane1") != nullptr);
    CHECK(links.find("Car1", "Lane1") == nullptr);

    // every external endpoint is a member of the object set
    const ObjectSet objects = fig5_objects();
    for (const auto& [key, link] : links.links) {
        CHECK(objects.contains(link.target));
        if (link.link_class == LinkClass::External) CHECK(objects.contains(link.source));
        CHECK(link.significance >= 0.0);
        CHECK(link.significance <= 1.0);
    }
}

TEST_CASE("crossing pedestrian near outranks everything else") {
    ObjectSet objects;
    SceneObject ped = make_object("P", "Pedestrian", true, Relation::Crossing, RangeBand::Near);
    objects.insert(ped);
    const LinkSet links = generate_links(objects, straight_task(), SignificanceRubric::standard());
    CHECK(links.internal_significance("P") == 0.95);
    CHECK(links.find(kEgoId, "P")->rationale == "pedestrian-crossing-near");
}

TEST_CASE("significance is monotone from Far to Near in every relation class") {
    const SignificanceRubric rubric = SignificanceRubric::standard();
    for (const Relation rel : {Relation::SameLaneAhead, Relation::SameLaneBehind,
                               Relation::LeftAdjacent, Relation::RightAdjacent,
                               Relation::Crossing, Relation::OffRoad}) {
        for (const char* kind : {"TrafficCar", "Pedestrian"}) {
            const auto near = rubric.score(make_object("x", kind, true, rel, RangeBand::Near));
            const auto far = rubric.score(make_object("x", kind, true, rel, RangeBand::Far));
            CHECK(near.first >= far.first);
        }
    }
}

TEST_CASE("significant set for the worked example") {
    const ObjectSet objects = fig5_objects();
    const LinkSet links =
        generate_links(objects, straight_task(), SignificanceRubric::standard());

    const ObjectSet at_005 = significant_objects(objects, links, 0.05);
    CHECK(at_005.size() == 3);
    CHECK(at_005.contains("Car1"));
    CHECK(at_005.contains("Car2"));
    CHECK(at_005.contains("Car3"));

    const ObjectSet at_05 = significant_objects(objects, links, 0.5);
    CHECK(at_05.size() == 1);
    CHECK(at_05.contains("Car2"));

    // threshold zero admits every linked object
    const ObjectSet at_0 = significant_objects(objects, links, 0.0);
    CHECK(at_0.size() == 6);
}

TEST_CASE("significant set is monotone decreasing in s_min") {
    const ObjectSet objects = fig5_objects();
    const LinkSet links =
        generate_links(objects, straight_task(), SignificanceRubric::standard());
    std::size_t prev = objects.size() + 1;
    for (const double s_min : {0.0, 0.04, 0.05, 0.1, 0.3, 0.6, 0.9, 1.0}) {
        const ObjectSet current = significant_objects(objects, links, s_min);
        CHECK(current.size() <= prev);
        // subset of the previous (looser) selection
        prev = current.size();
        for (const auto& [id, obj] : current.objects)
            CHECK(significant_objects(objects, links, 0.0).contains(id));
    }
}

TEST_CASE("generate_links is pure and byte-stable") {
    const ObjectSet objects = fig5_objects();
    const TaskTrajectory task = straight_task();
    const SignificanceRubric rubric = SignificanceRubric::standard();
    const LinkSet a = generate_links(objects, task, rubric);
    const LinkSet b = generate_links(objects, task, rubric);
    REQUIRE(a.size() == b.size());
    auto ita = a.links.begin();
    auto itb = b.links.begin();
    for (; ita != a.links.end(); ++ita, ++itb) {
        CHECK(ita->second.source == itb->second.source);
        CHECK(ita->second.target == itb->second.target);
        CHECK(ita->second.significance == itb->second.significance);
        CHECK(ita->second.rationale == itb->second.rationale);
    }
}

TEST_CASE("off-trajectory static objects stay unlinked") {
    ObjectSet objects;
    SceneObject far_building = make_object("B", "Building", false, Relation::OffRoad,
                                           RangeBand::Far);
    far_building.state.x = 100.0;
    far_building.state.y = 200.0;  // 200 m off the route
    objects.insert(far_building);
    objects.insert(make_object("C", "TrafficCar", true, Relation::SameLaneAhead, RangeBand::Far));
    const LinkSet links =
        generate_links(objects, straight_task(), SignificanceRubric::standard());
    CHECK(!links.internal_significance("B").has_value());
    CHECK(links.internal_significance("C").has_value());
}

TEST_CASE("full external mesh is config gated") {
    SignificanceRubric rubric = SignificanceRubric::standard();
    const ObjectSet objects = fig5_objects();
    const LinkSet off = generate_links(objects, straight_task(), rubric);
    rubric.full_external_mesh = true;
    const LinkSet on = generate_links(objects, straight_task(), rubric);
    CHECK(on.size() > off.size());
    CHECK(on.find("Car1", "Car2") != nullptr);
    CHECK(off.find("Car1", "Car2") == nullptr);
}
