// Command-line front end: scenario generation, pipeline execution,
// evaluation and plot emission.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crosstrack/config.hpp"
#include "crosstrack/eval.hpp"
#include "crosstrack/io.hpp"
#include "crosstrack/pipeline.hpp"
#include "crosstrack/plot.hpp"
#include "crosstrack/sim.hpp"

namespace fs = std::filesystem;
using namespace crosstrack;

namespace {

struct CommonOpts {
    std::string config_path;
    int64_t seed = -1;
    bool fast = false;
    std::vector<std::string> ablations;
};

RunConfig resolve_config(const CommonOpts& opts) {
    RunConfig cfg = opts.config_path.empty() ? default_run_config(1)
                                             : load_run_config(opts.config_path);
    if (opts.seed >= 0) {
        cfg.scenario.seed = static_cast<uint64_t>(opts.seed);
        cfg.pipeline.seed = static_cast<uint64_t>(opts.seed);
    }
    if (opts.fast || cfg.fast_mode) apply_fast_mode(cfg.scenario);
    for (const std::string& spec : opts.ablations) {
        const size_t eq = spec.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig("--ablation expects name=on|off, got: " + spec);
        const std::string name = spec.substr(0, eq);
        const std::string value = spec.substr(eq + 1);
        if (value != "on" && value != "off")
            throw InvalidConfig("--ablation value must be on or off: " + spec);
        const bool on = value == "on";
        if (name == "heading_correction")
            cfg.pipeline.ablations.heading_correction = on;
        else if (name == "lane_weighting")
            cfg.pipeline.ablations.lane_weighting = on;
        else if (name == "semantic_clustering")
            cfg.pipeline.ablations.semantic_clustering = on;
        else
            throw InvalidConfig("unknown ablation: " + name);
    }
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--seed", opts.seed, "override the scenario/pipeline seed");
    cmd->add_flag("--fast", opts.fast, "low-resolution render (256x192)");
    cmd->add_option("--ablation", opts.ablations,
                    "toggle a switch, e.g. heading_correction=off (repeatable)");
}

int cmd_generate(const CommonOpts& opts, const std::string& out_dir) {
    RunConfig cfg = resolve_config(opts);
    const DigitalMap map = build_intersection(cfg.scenario);
    Simulator sim(cfg.scenario, map);
    write_dataset(out_dir, cfg.scenario, map, sim);
    std::cout << "dataset written to " << out_dir << " (" << sim.frame_count() << " frames)\n";
    return 0;
}

int cmd_run(const CommonOpts& opts, const std::string& data_dir, const std::string& out_dir) {
    RunConfig cfg = resolve_config(opts);
    const DatasetMeta meta = read_dataset_meta(data_dir);
    const DigitalMap map = load_map((fs::path(data_dir) / "map.txt").string());
    const auto sensors = read_sensor_log((fs::path(data_dir) / "sensors.csv").string());
    const auto flow = read_flow_log((fs::path(data_dir) / "flow.csv").string());

    cfg.pipeline.tracking.model.dt = 1.0 / meta.frame_rate;
    Pipeline pipeline(cfg.pipeline, meta.camera, map);
    if (!cfg.pipeline.stixels_from_file.empty())
        pipeline.set_external_stixels(read_stixel_log(cfg.pipeline.stixels_from_file));

    std::vector<TrackRecord> records;
    std::vector<EgoPose> ego_estimates;
    for (int i = 0; i < meta.frames; ++i) {
        const SensorFrame frame = read_dataset_frame(data_dir, meta, i, sensors, flow);
        try {
            const FrameOutput out = pipeline.run_frame(frame);
            records.insert(records.end(), out.track_records.begin(), out.track_records.end());
            ego_estimates.push_back(out.ego_estimate);
        } catch (const Error& e) {
            std::cerr << "frame " << i << " skipped: " << e.what() << '\n';
        }
    }
    fs::create_directories(out_dir);
    write_track_log((fs::path(out_dir) / "tracks.csv").string(), records);
    write_ego_log((fs::path(out_dir) / "ego_estimate.csv").string(), ego_estimates);
    std::cout << "tracks written to " << (fs::path(out_dir) / "tracks.csv").string() << " ("
              << records.size() << " records)\n";
    return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& data_dir, const std::string& tracks_path,
             const std::string& out_dir) {
    RunConfig cfg = resolve_config(opts);
    const auto tracks = read_track_log(tracks_path);
    const auto truth = read_truth_log((fs::path(data_dir) / "truth_actors.csv").string());
    const DatasetMeta meta = read_dataset_meta(data_dir);
    EvalParams params;
    params.match_radius = cfg.eval_match_radius;
    // the visibility floor is calibrated for the full-resolution rig
    params.min_visible_cols =
        std::max(4, static_cast<int>(params.min_visible_cols * meta.camera.width / 1024.0));
    const EvalReport report = evaluate(tracks, truth, params);

    fs::create_directories(out_dir);
    const std::string table = render_report_table(report);
    std::ofstream((fs::path(out_dir) / "report.txt").string()) << table;
    std::ofstream((fs::path(out_dir) / "report.kv").string()) << render_report_kv(report);
    std::cout << table;
    return 0;
}

int cmd_plot(const std::string& data_dir, const std::string& tracks_path,
             const std::string& out_dir) {
    const DigitalMap map = load_map((fs::path(data_dir) / "map.txt").string());
    const auto tracks = read_track_log(tracks_path);
    const auto ego = read_ego_log((fs::path(data_dir) / "truth_ego.csv").string());
    emit_plots(out_dir, map, tracks, ego);
    std::cout << "plots written to " << out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"urban-intersection scene understanding pipeline"};
    app.require_subcommand(1);

    CommonOpts gen_opts, run_opts, eval_opts, e2e_opts;
    std::string gen_out, run_data, run_out, eval_data, eval_tracks, eval_out;
    std::string plot_data, plot_tracks, plot_out, e2e_out;

    CLI::App* gen = app.add_subcommand("generate", "simulate a scenario into a dataset directory");
    add_common(gen, gen_opts);
    gen->add_option("--out", gen_out, "output dataset directory")->required();

    CLI::App* run = app.add_subcommand("run", "run the pipeline over a dataset");
    add_common(run, run_opts);
    run->add_option("--data", run_data, "dataset directory")->required();
    run->add_option("--out", run_out, "output directory for tracks")->required();

    CLI::App* ev = app.add_subcommand("eval", "score a track log against ground truth");
    add_common(ev, eval_opts);
    ev->add_option("--data", eval_data, "dataset directory (for truth)")->required();
    ev->add_option("--tracks", eval_tracks, "track log to score")->required();
    ev->add_option("--out", eval_out, "output directory for reports")->required();

    CLI::App* plot = app.add_subcommand("plot", "emit trajectory and velocity plots");
    plot->add_option("--data", plot_data, "dataset directory")->required();
    plot->add_option("--tracks", plot_tracks, "track log to draw")->required();
    plot->add_option("--out", plot_out, "output directory for SVG files")->required();

    CLI::App* e2e = app.add_subcommand("e2e", "generate, run, eval and plot in one go");
    add_common(e2e, e2e_opts);
    e2e->add_option("--out", e2e_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(gen_opts, gen_out);
        if (run->parsed()) return cmd_run(run_opts, run_data, run_out);
        if (ev->parsed()) return cmd_eval(eval_opts, eval_data, eval_tracks, eval_out);
        if (plot->parsed()) return cmd_plot(plot_data, plot_tracks, plot_out);
        if (e2e->parsed()) {
            const std::string data_dir = (fs::path(e2e_out) / "dataset").string();
            const std::string run_dir = (fs::path(e2e_out) / "run").string();
            int rc = cmd_generate(e2e_opts, data_dir);
            if (rc == 0) rc = cmd_run(e2e_opts, data_dir, run_dir);
            if (rc == 0)
                rc = cmd_eval(e2e_opts, data_dir, (fs::path(run_dir) / "tracks.csv").string(),
                              run_dir);
            if (rc == 0)
                rc = cmd_plot(data_dir, (fs::path(run_dir) / "tracks.csv").string(), run_dir);
            return rc;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
