#include "bridgenav/config.hpp"
#include "bridgenav/error.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace bridgenav;
using Json = nlohmann::ordered_json;

namespace {

// Message of the InvalidConfig raised by parsing `text`, or "" if it parses.
std::string config_error(const std::string& text)
{
    try {
        config_from_json(Json::parse(text));
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidConfig);
        return e.what();
    }
    return {};
}

} // namespace

TEST_SUITE("config")
{
    TEST_CASE("empty object gives the defaults")
    {
        const PipelineConfig c = config_from_json(Json::object());
        CHECK(c.schema_version == kSchemaVersion);
        CHECK(c.seed == 1);
        CHECK(c.synthetic.shape == Shape::L);
        CHECK_FALSE(c.boundary.alpha_s.has_value());
        CHECK(c.segmentation.n_cmax == 6);
    }

    TEST_CASE("defaults survive a json round trip")
    {
        const Json j = config_to_json(PipelineConfig{});
        CHECK(j.begin().key() == "schema_version");
        const PipelineConfig back = config_from_json(j);
        CHECK(config_to_json(back).dump() == j.dump());
    }

    TEST_CASE("set values survive a json round trip")
    {
        PipelineConfig c;
        c.seed = 42;
        c.input = "scan.ply";
        c.input_format = CloudFormat::PlyAscii;
        c.synthetic.shape = Shape::Cross;
        c.boundary.alpha_s = 0.01;
        c.route.v_s = 3;
        c.cloud.camera_to_base = RigidTransform::translation({0, 0, -0.07});
        c.cloud.passthrough.push_back({Axis::X, -1.0, 2.0});
        c.cloud.voxel_leaf = 0.005;
        c.boundary.inside_rule = InsideRule::Any;
        const PipelineConfig back = config_from_json(config_to_json(c));
        CHECK(back.seed == 42);
        CHECK(back.input == c.input);
        CHECK(back.synthetic.shape == Shape::Cross);
        CHECK(back.boundary.alpha_s == 0.01);
        CHECK(back.route.v_s == 3);
        CHECK(back.cloud.passthrough.size() == 1);
        CHECK(back.cloud.camera_to_base.translation().z() == -0.07);
        CHECK(back.boundary.inside_rule == InsideRule::Any);
        CHECK(config_to_json(back).dump() == config_to_json(c).dump());
    }

    TEST_CASE("unknown keys are named")
    {
        CHECK(config_error(R"({"sed": 3})").find("sed: unknown key") != std::string::npos);
        CHECK(config_error(R"({"planner": {"stepp": 0.1}})").find("planner.stepp") != std::string::npos);
    }

    TEST_CASE("wrong types are rejected")
    {
        CHECK(config_error(R"({"seed": "one"})").find("seed") != std::string::npos);
        CHECK(config_error(R"({"seed": -1})").find("seed") != std::string::npos);
        CHECK(config_error(R"({"footprint": 3})").find("footprint") != std::string::npos);
        CHECK(config_error(R"({"synthetic": {"shape": "z"}})").find("synthetic.shape") != std::string::npos);
        CHECK(config_error(R"({"planner": {"max_iters": 1.5}})").find("planner.max_iters") != std::string::npos);
    }

    TEST_CASE("out of range values are rejected")
    {
        CHECK(config_error(R"({"schema_version": 2})").find("schema_version") != std::string::npos);
        CHECK(config_error(R"({"segmentation": {"n_cmin": 5, "n_cmax": 3}})").find("segmentation") != std::string::npos);
        CHECK(config_error(R"({"footprint": {"width": 0}})").find("footprint.width") != std::string::npos);
        CHECK(config_error(R"({"boundary": {"alpha_s": -0.1}})").find("boundary.alpha_s") != std::string::npos);
        CHECK(config_error(R"({"planner": {"goal_bias": 2}})").find("planner.goal_bias") != std::string::npos);
        CHECK_FALSE(config_error(R"({"cloud": {"camera_to_base": {"rotation": [[2,0,0],[0,1,0],[0,0,1]]}}})").empty());
    }

    TEST_CASE("null resets an optional")
    {
        const PipelineConfig c = config_from_json(Json::parse(R"({"boundary": {"alpha_s": null}})"));
        CHECK_FALSE(c.boundary.alpha_s.has_value());
    }

    TEST_CASE("loading from disk")
    {
        testutil::TempFile ok("ok.json", R"({"seed": 9})");
        CHECK(load_config(ok.path()).seed == 9);
        testutil::TempFile broken("broken.json", "{ not json");
        try {
            load_config(broken.path());
            FAIL("expected InvalidConfig");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::InvalidConfig);
        }
        try {
            load_config("/nonexistent/config.json");
            FAIL("expected IOError");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::IOError);
        }
    }
}
