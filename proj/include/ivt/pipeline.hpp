#ifndef IVT_PIPELINE_HPP
#define IVT_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <string>

#include "ivt/cmt.hpp"
#include "ivt/grid.hpp"
#include "ivt/wavesim.hpp"

namespace ivt {

// Everything one experiment run needs. Zeros mean "derive a default".
struct RunConfig {
    std::string experiment = "interior";  // interior | ext-int | ext-invisible |
                                          // ivpa | ivus-born | ivus-wave
    std::string geom_preset = "paper";    // paper | desk | small
    AcquisitionGeometry geom{0.0, 0.0, 0, 0};  // zeros: filled by the preset
    InvertParams invert;
    double noise = 0.0;
    double contrast = 0.01;  // peak of m for the ivus experiments
    uint64_t seed = 1;
    std::string out_dir = "out";
    std::string phantom_file;  // optional JSON phantom spec; overrides the preset

    int img_n = 0;             // reconstruction grid
    double img_half_width = 0.0;
    int forward_grid_n = 0;    // phantom raster feeding forward_cmt
    int n_arc = 0;             // arc quadrature points (0 = 4 n_phi)

    int wave_grid_n = 0;       // FD grid for ivus-wave
    double wave_half_width = 0.0;
    SimConfig sim;
    std::string cache_dir;     // kernel table cache (default <out_dir>/cache)
};

struct RunResult {
    Metrics metrics;
    double imag_ratio = 0.0;
    bool imag_warning = false;
    std::map<std::string, double> stage_timings_ms;
    std::string out_dir;
};

// Fill preset-dependent defaults (geometry sizes, grids, phantom choice).
RunConfig resolve_config(RunConfig cfg);

// Execute the experiment, write the artifact set into cfg.out_dir
// (phantom/data/spectra/reconstruction arrays, PGM images, metrics.json),
// and return the metrics.
RunResult run_experiment(const RunConfig& cfg);

// Parse a config JSON file; missing fields keep their defaults.
RunConfig run_config_from_json(const std::string& json_text);

}  // namespace ivt

#endif
