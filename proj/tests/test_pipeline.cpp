#include "bridgenav/error.hpp"
#include "bridgenav/pipeline.hpp"
#include "bridgenav/svg.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

using namespace bridgenav;

namespace {

std::map<std::string, std::string> by_name(const RunOutput& out)
{
    std::map<std::string, std::string> m;
    for (const auto& a : out.artifacts)
        m[a.name] = a.content;
    return m;
}

std::string stage_of(const PipelineConfig& c)
{
    try {
        run_navigation(c);
    } catch (const StageError& e) {
        return e.stage();
    }
    return {};
}

} // namespace

TEST_SUITE("pipeline")
{
    TEST_CASE("navigation on the default L writes every artifact twice identically")
    {
        const PipelineConfig c;
        const Navigation nav = run_navigation(c);
        CHECK(nav.complete());
        const RunOutput a = navigation_artifacts(nav, c);
        CHECK(a.exit_code == kExitOk);
        const auto files = by_name(a);
        for (const char* stem : {"cloud", "segmentation", "boundaries_graph", "route", "motion_paths"}) {
            CAPTURE(stem);
            REQUIRE(files.count(std::string(stem) + ".json") == 1);
            REQUIRE(files.count(std::string(stem) + ".svg") == 1);
            const Json j = Json::parse(files.at(std::string(stem) + ".json"));
            CHECK(j.begin().key() == "schema_version");
            CHECK(j["schema_version"] == kSchemaVersion);
        }
        CHECK(files.count("failures.json") == 0);

        const RunOutput b = navigation_artifacts(run_navigation(c), c);
        CHECK(by_name(b) == files);
    }

    TEST_CASE("svg files are views of their json")
    {
        const PipelineConfig c;
        const auto files = by_name(navigation_artifacts(run_navigation(c), c));
        auto j = [&](const std::string& n) { return Json::parse(files.at(n + ".json")); };
        CHECK(render_cloud_svg(j("cloud")) == files.at("cloud.svg"));
        CHECK(render_segmentation_svg(j("segmentation")) == files.at("segmentation.svg"));
        CHECK(render_boundaries_graph_svg(j("boundaries_graph")) == files.at("boundaries_graph.svg"));
        CHECK(render_route_svg(j("route")) == files.at("route.svg"));
        CHECK(render_motion_svg(j("motion_paths")) == files.at("motion_paths.svg"));
    }

    TEST_CASE("route artifact starts at the resolved start vertex")
    {
        const PipelineConfig c;
        const Navigation nav = run_navigation(c);
        const Json r = Json::parse(by_name(navigation_artifacts(nav, c)).at("route.json"));
        CHECK(r["walk"].front() == nav.params.v_s);
        CHECK(r["walk"].back() == nav.params.v_t);
        CHECK(r["covers_all_edges"] == true);
        CHECK(nav.graph.vertices[static_cast<std::size_t>(nav.params.v_s)].kind == VertexKind::BarEnd);
    }

    TEST_CASE("stage errors name the stage")
    {
        testutil::TempFile empty("empty.csv", "");
        PipelineConfig c;
        c.input = empty.path().string();
        CHECK(stage_of(c) == "segmentation");

        PipelineConfig bad_vertex;
        bad_vertex.synthetic.density = 5000;
        bad_vertex.route.v_s = 999;
        CHECK(stage_of(bad_vertex) == "route");

        PipelineConfig missing;
        missing.input = "/nonexistent/cloud.csv";
        CHECK(stage_of(missing) == "ingest");
    }

    TEST_CASE("switching modes")
    {
        PipelineConfig c;
        CHECK(run_switching(c).decision.mode == Mode::Mobile);
        c.plane.height = -0.07;
        CHECK(run_switching(c).decision.mode == Mode::Inchworm);
        PipelineConfig small;
        small.plane.size_x = small.plane.size_y = 0.25;
        CHECK(run_switching(small).decision.mode == Mode::Stop);

        testutil::TempFile empty("empty.csv", "");
        PipelineConfig none;
        none.input = empty.path().string();
        const Switching sw = run_switching(none);
        CHECK(sw.decision.mode == Mode::Stop);
        CHECK_FALSE(sw.plane.has_value());

        const auto files = by_name(switching_artifacts(run_switching(PipelineConfig{}), PipelineConfig{}));
        const Json j = Json::parse(files.at("switching.json"));
        CHECK(j["mode"] == "mobile");
        CHECK(render_switching_svg(j) == files.at("switching.svg"));
    }

    TEST_CASE("solve on a triangle file")
    {
        testutil::TempFile tri("tri.txt", "A B 1\nB C 1\nC A 1\n");
        const SolveResult r = solve_graph(tri.path(), "A", "B", true);
        CHECK(r.route.total_length == 4.0);
        REQUIRE(r.oracle.has_value());
        CHECK(r.oracle->total_length == 4.0);
        const Json j = solve_json(r, "A", "B");
        CHECK(j["schema_version"] == kSchemaVersion);
        CHECK(j["oracle"]["gap"] == 0.0);
        CHECK_THROWS_AS(solve_graph(tri.path(), "A", "Z", false), Error);
    }

    TEST_CASE("synth writes a cloud and its ground truth")
    {
        PipelineConfig c;
        c.synthetic.density = 2000;
        const auto files = by_name(synth_artifacts(c, false));
        REQUIRE(files.count("cloud.csv") == 1);
        const Json gt = Json::parse(files.at("ground_truth.json"));
        CHECK(gt["schema_version"] == kSchemaVersion);
        std::size_t lines = 0;
        for (char ch : files.at("cloud.csv"))
            lines += ch == '\n';
        CHECK(gt["labels"].size() + 1 == lines);
        CHECK(by_name(synth_artifacts(c, false)) == files);
    }

    TEST_CASE("artifacts are written below a new directory")
    {
        const auto dir = std::filesystem::temp_directory_path() / "bridgenav_test_write" / "nested";
        std::filesystem::remove_all(dir.parent_path());
        RunOutput out;
        out.artifacts.push_back({"a.json", "{}\n"});
        write_artifacts(out, dir);
        std::ifstream in(dir / "a.json");
        std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(s == "{}\n");
        std::filesystem::remove_all(dir.parent_path());
    }
}
