#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "arbsim/scenario.hpp"

using namespace arbsim;

namespace {

std::string read_file(const std::string& name) {
    const std::string path = std::string(ARBSIM_SCENARIO_DIR) + "/" + name;
    std::ifstream in(path);
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json fixture_json() { return json::parse(read_file("fig5_three_car.json")); }

}  // namespace

TEST_CASE("the bundled worked-example fixture parses") {
    const Scenario s = parse_scenario(read_file("fig5_three_car.json"));
    CHECK(s.name == "fig5_three_car");
    CHECK(s.mode == ScenarioMode::GoldenFixture);
    REQUIRE(s.participants.size() == 3);
    CHECK(s.map.lanes.size() == 3);
    CHECK(s.ticks == 1);
    for (const auto& p : s.participants) {
        REQUIRE(p.pinned.has_value());
        CHECK(p.pinned->probabilities.normalized());
    }
    CHECK(s.participants[0].pinned->probabilities[ObjectBehavior::LaneChangeRight] == 0.59);
    CHECK(s.participants[0].pinned->impact_times[1] == 20.0);
    CHECK(std::isinf(s.participants[0].pinned->impact_times[0]));
    // default rubric is the worked-example calibration
    CHECK(s.rubric.rules.size() == SignificanceRubric::standard().rules.size());
    CHECK(s.horizon.delta == 40.0);
    CHECK(s.horizon.dt == 0.1);
    CHECK(s.arbiter.theta_accept == 0.05);
}

TEST_CASE("an ego-only scenario with no participants is valid") {
    const Scenario s = parse_scenario(read_file("ego_only.json"));
    CHECK(s.participants.empty());
    CHECK(s.mode == ScenarioMode::ClosedLoop);
}

TEST_CASE("a pinned probability row that does not sum to one is rejected") {
    json j = fixture_json();
    j["participants"][0]["pinned"]["probabilities"]["Stop"] = 0.3;  // 0.2+0.59+0.01+0.3
    try {
        parse_scenario(j.dump());
        FAIL("expected SemanticError");
    } catch (const SemanticError& e) {
        CHECK(std::string(e.what()).find("1.10") != std::string::npos);
        CHECK(e.path.find("probabilities") != std::string::npos);
    }
}

TEST_CASE("unknown keys fail the strict schema") {
    json j = fixture_json();
    j["turbo_mode"] = true;
    CHECK_THROWS_AS(parse_scenario(j.dump()), SchemaError);

    json nested = fixture_json();
    nested["ego"]["spoiler"] = "none";
    CHECK_THROWS_AS(parse_scenario(nested.dump()), SchemaError);

    json participant = fixture_json();
    participant["participants"][1]["color"] = "red";
    CHECK_THROWS_AS(parse_scenario(participant.dump()), SchemaError);
}

TEST_CASE("missing required keys fail the schema") {
    json j = fixture_json();
    j.erase("ego");
    CHECK_THROWS_AS(parse_scenario(j.dump()), SchemaError);

    json no_mode = fixture_json();
    no_mode.erase("mode");
    CHECK_THROWS_AS(parse_scenario(no_mode.dump()), SchemaError);
}

TEST_CASE("malformed JSON reports a schema error with location") {
    try {
        parse_scenario("{\"schema_version\": 1,, }");
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("parse error") != std::string::npos);
    }
}

TEST_CASE("golden-fixture mode requires pinned tables for every participant") {
    json j = fixture_json();
    j["participants"][2].erase("pinned");
    CHECK_THROWS_AS(parse_scenario(j.dump()), SemanticError);
}

TEST_CASE("semantic checks on identifiers and references") {
    json dup = fixture_json();
    dup["participants"][1]["id"] = "Car1";
    CHECK_THROWS_AS(parse_scenario(dup.dump()), SemanticError);

    json ego_name = fixture_json();
    ego_name["participants"][0]["id"] = "ego";
    CHECK_THROWS_AS(parse_scenario(ego_name.dump()), SemanticError);

    json dangling = fixture_json();
    dangling["participants"][0]["lane"] = 9;
    CHECK_THROWS_AS(parse_scenario(dangling.dump()), SemanticError);

    json bad_target = fixture_json();
    bad_target["ego"]["task"]["target_lane"] = 7;
    CHECK_THROWS_AS(parse_scenario(bad_target.dump()), SemanticError);

    json bad_heading = fixture_json();
    bad_heading["participants"][0]["state"]["heading"] = 3.5;
    CHECK_THROWS_AS(parse_scenario(bad_heading.dump()), SemanticError);

    json negative_tau = fixture_json();
    negative_tau["participants"][0]["pinned"]["impact_times"]["LaneChangeRight"] = -2.0;
    CHECK_THROWS_AS(parse_scenario(negative_tau.dump()), SemanticError);

    json bad_ticks = fixture_json();
    bad_ticks["ticks"] = 0;
    CHECK_THROWS_AS(parse_scenario(bad_ticks.dump()), SemanticError);

    json bad_tie = fixture_json();
    bad_tie["arbiter"]["tie_break"] = json::array({"KeepLane", "KeepLane", "ReduceSpeed",
                                                   "LaneChangeLeft", "LaneChangeRight"});
    CHECK_THROWS_AS(parse_scenario(bad_tie.dump()), SemanticError);
}

TEST_CASE("parse and serialize round-trip every bundled scenario") {
    for (const char* name :
         {"fig5_three_car.json", "fig5_three_car_closed_loop.json", "ego_only.json",
          "pedestrian_crossing.json", "sampled_traffic.json"}) {
        const Scenario first = parse_scenario(read_file(name));
        const Scenario second = parse_scenario(first.serialize());
        REQUIRE(second.to_json() == first.to_json());
        CHECK(config_hash(second) == config_hash(first));
    }
}

TEST_CASE("config hash tracks effective configuration changes") {
    const Scenario base = parse_scenario(read_file("fig5_three_car.json"));
    Scenario reseeded = base;
    reseeded.seed = base.seed + 1;
    CHECK(config_hash(base) != config_hash(reseeded));
    CHECK(config_hash(base) == config_hash(base));
}

TEST_CASE("registry extensions declare new kinds") {
    json j = fixture_json();
    j["kinds"] = json{{"HorseCart", json{{"dynamic", true}}}};
    j["participants"][0]["kind"] = "HorseCart";
    const Scenario s = parse_scenario(j.dump());
    CHECK(s.kinds.contains("HorseCart"));
    CHECK(s.kinds.is_dynamic("HorseCart"));

    json unknown = fixture_json();
    unknown["participants"][0]["kind"] = "HorseCart";
    CHECK_THROWS_AS(parse_scenario(unknown.dump()), SemanticError);
}

TEST_CASE("rubric overrides replace the default table") {
    json j = fixture_json();
    j["rubric"] = json{{"rules", json::array({json{{"relation", "ahead"},
                                                   {"significance", 0.8},
                                                   {"tag", "custom-ahead"}}})}};
    const Scenario s = parse_scenario(j.dump());
    REQUIRE(s.rubric.rules.size() == 1);
    CHECK(s.rubric.rules[0].tag == "custom-ahead");
    CHECK(!s.rubric.rules[0].band.has_value());

    json bad = fixture_json();
    bad["rubric"] = json{{"rules", json::array({json{{"relation", "sideways"},
                                                     {"significance", 0.8},
                                                     {"tag", "x"}}})}};
    CHECK_THROWS_AS(parse_scenario(bad.dump()), SchemaError);
}
