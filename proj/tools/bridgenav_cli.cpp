#include "bridgenav/config.hpp"
#include "bridgenav/error.hpp"
#include "bridgenav/pipeline.hpp"
#include "bridgenav/synth.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

using namespace bridgenav;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::string shape;
    bool oracle = false;
    std::string edge_list;
    std::string from;
    std::string to;
};

PipelineConfig resolve(const Options& o, bool allow_plane_shape)
{
    PipelineConfig c = o.config.empty() ? PipelineConfig{} : load_config(o.config);
    if (o.seed)
        c.seed = *o.seed;
    if (!o.shape.empty() && !(allow_plane_shape && o.shape == "plane")) {
        const auto s = parse_shape(o.shape);
        if (!s)
            throw Error(Errc::InvalidConfig, "--shape: unknown shape \"" + o.shape + "\"");
        c.synthetic.shape = *s;
    }
    c.validate();
    return c;
}

int cmd_init(const Options& o, bool to_stdout)
{
    const std::string text = config_to_json(PipelineConfig{}).dump(2) + "\n";
    if (to_stdout) {
        std::cout << text;
        return kExitOk;
    }
    write_artifacts({kExitOk, {{"config.json", text}}}, o.out);
    std::cout << "wrote " << (std::filesystem::path(o.out) / "config.json").string() << "\n";
    return kExitOk;
}

int cmd_navigate(const Options& o)
{
    const PipelineConfig c = resolve(o, false);
    const Navigation nav = run_navigation(c);
    const RunOutput out = navigation_artifacts(nav, c);
    write_artifacts(out, o.out);
    std::cout << "clusters " << nav.clusters.size() << ", graph " << nav.graph.vertices.size() << " vertices "
              << nav.graph.edges.size() << " edges, route " << nav.route.edge_sequence.size() << " steps length "
              << nav.route.total_length << " m, plans " << nav.motion.paths.size() << " ok "
              << nav.motion.failures.size() << " failed\n";
    for (const auto& f : nav.motion.failures)
        std::cerr << "step " << f.step << " (" << f.u << " -> " << f.v << "): " << f.message << "\n";
    return out.exit_code;
}

int cmd_switching(const Options& o)
{
    const PipelineConfig c = resolve(o, false);
    const Switching sw = run_switching(c);
    const RunOutput out = switching_artifacts(sw, c);
    write_artifacts(out, o.out);
    std::cout << "S_pa " << sw.decision.s_pa << " S_am " << sw.decision.s_am << " S_hc " << sw.decision.s_hc
              << " -> " << to_string(sw.decision.mode) << "\n";
    return out.exit_code;
}

int cmd_solve(const Options& o, bool write)
{
    const SolveResult r = solve_graph(o.edge_list, o.from, o.to, o.oracle);
    const Json j = solve_json(r, o.from, o.to);
    const std::string text = j.dump(1) + "\n";
    if (write)
        write_artifacts({kExitOk, {{"route.json", text}}}, o.out);
    std::cout << text;
    if (o.oracle && !r.oracle) {
        std::cerr << "oracle skipped: " << r.oracle_message << "\n";
        return kExitPartial;
    }
    return kExitOk;
}

int cmd_synth(const Options& o)
{
    const PipelineConfig c = resolve(o, true);
    const RunOutput out = synth_artifacts(c, o.shape == "plane");
    write_artifacts(out, o.out);
    std::cout << "wrote " << (std::filesystem::path(o.out) / "cloud.csv").string() << "\n";
    return out.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Point-cloud navigation for steel bridge structures"};
    app.require_subcommand(1);
    Options o;

    auto* init = app.add_subcommand("init", "Write the default configuration template");
    auto* init_out = init->add_option("--out", o.out, "Directory for config.json (stdout when omitted)");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Pipeline configuration (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Override the configured seed");
        sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    };

    auto* navigate = app.add_subcommand("navigate", "Segment, build the graph, route and plan");
    add_common(navigate);
    navigate->add_option("--shape", o.shape, "Synthetic shape: cross, k, l, t, i");

    auto* switching = app.add_subcommand("switching", "Plane, area and height checks on a surface");
    add_common(switching);

    auto* solve = app.add_subcommand("solve", "Open postman route on an edge-list file");
    solve->add_option("edges", o.edge_list, "Edge list: one \"u v w\" per line")->required()->check(CLI::ExistingFile);
    solve->add_option("from", o.from, "Start vertex name")->required();
    solve->add_option("to", o.to, "End vertex name")->required();
    solve->add_flag("--oracle", o.oracle, "Compare with the exhaustive optimum (at most 14 edges)");
    auto* solve_out = solve->add_option("--out", o.out, "Also write route.json to this directory");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic cloud with ground truth");
    add_common(synth);
    synth->add_option("--shape", o.shape, "cross, k, l, t, i or plane");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitError;
    }

    try {
        if (init->parsed())
            return cmd_init(o, init_out->count() == 0);
        if (navigate->parsed())
            return cmd_navigate(o);
        if (switching->parsed())
            return cmd_switching(o);
        if (solve->parsed())
            return cmd_solve(o, solve_out->count() > 0);
        if (synth->parsed())
            return cmd_synth(o);
    } catch (const StageError& e) {
        std::cerr << "error in stage " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
