#pragma once

#include <string>

#include "crosstrack/pipeline.hpp"
#include "crosstrack/sim.hpp"

namespace crosstrack {

// JSON config with one section per module (camera, stixel, dbscan,
// localization, ndt, tracking, ablations, scenario, evaluation). Every field
// is optional and overrides the built-in default. Angles are given in
// degrees in the file and converted here.
struct RunConfig {
    ScenarioConfig scenario;
    PipelineParams pipeline;
    double eval_match_radius = 2.0;
    bool fast_mode = false;
};

RunConfig default_run_config(uint64_t seed = 1);
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

}  // namespace crosstrack
