#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ivt/cmt.hpp"
#include "ivt/io.hpp"
#include "ivt/pipeline.hpp"

namespace {

std::string out_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / "ivt_pipeline_tests" / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

double l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("config JSON parsing and preset resolution") {
    const char* text = R"({
      "experiment": "ext-int",
      "geom_preset": "desk",
      "noise": 0.02,
      "seed": 9,
      "out": "somewhere",
      "geometry": {"n_phi": 128},
      "solver": {"contour_M": 200.0, "cone_margin": 0.05},
      "grid": {"n": 192}
    })";
    ivt::RunConfig cfg = ivt::run_config_from_json(text);
    CHECK(cfg.experiment == "ext-int");
    CHECK(cfg.noise == 0.02);
    CHECK(cfg.seed == 9);
    CHECK(cfg.invert.contour_M == 200.0);
    CHECK(cfg.invert.cone_margin == 0.05);

    cfg = ivt::resolve_config(cfg);
    CHECK(cfg.geom.n_phi == 128);  // explicit value wins over the preset
    CHECK(cfg.geom.n_r == 201);    // desk default fills the rest
    CHECK(cfg.geom.R0 == 0.5);
    CHECK(cfg.img_n == 192);
    CHECK(cfg.img_half_width > ivt::AcquisitionGeometry{}.R1);

    CHECK_THROWS_AS(ivt::resolve_config(ivt::RunConfig{.geom_preset = "huge"}), ivt::ConfigError);
}

TEST_CASE("interior run produces the artifact set and metrics") {
    ivt::RunConfig cfg;
    cfg.experiment = "interior";
    cfg.geom_preset = "small";
    cfg.out_dir = out_dir("interior");
    const auto res = ivt::run_experiment(cfg);

    for (const char* name : {"phantom.bin", "phantom.pgm", "sinogram.bin", "spectra.bin",
                             "recon.bin", "recon.pgm", "metrics.json"})
        CHECK(std::filesystem::exists(cfg.out_dir + "/" + name));

    nlohmann::json m;
    std::ifstream(cfg.out_dir + "/metrics.json") >> m;
    CHECK(m.contains("rel_l2"));
    CHECK(m.contains("stage_timings_ms"));
    CHECK(m["rel_l2"].get<double>() == res.metrics.rel_l2);
    CHECK(res.metrics.ncc > 0.9);
}

TEST_CASE("noise flag perturbs the stored sinogram at exactly the requested level") {
    ivt::RunConfig clean;
    clean.experiment = "interior";
    clean.geom_preset = "small";
    clean.out_dir = out_dir("clean");
    ivt::run_experiment(clean);
    ivt::RunConfig noisy = clean;
    noisy.noise = 0.05;
    noisy.seed = 3;
    noisy.out_dir = out_dir("noisy");
    ivt::run_experiment(noisy);

    const auto a = ivt::load_array(clean.out_dir + "/sinogram.bin");
    const auto b = ivt::load_array(noisy.out_dir + "/sinogram.bin");
    REQUIRE(a.real_data.size() == b.real_data.size());
    std::vector<double> diff(a.real_data.size());
    for (size_t k = 0; k < diff.size(); ++k) diff[k] = b.real_data[k] - a.real_data[k];
    CHECK(l2(diff) / l2(a.real_data) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("ivus contrast scales the perturbation phantom peak") {
    ivt::RunConfig cfg;
    cfg.experiment = "ivus-born";
    cfg.geom_preset = "small";
    cfg.contrast = 0.05;
    cfg.out_dir = out_dir("born");
    ivt::run_experiment(cfg);
    const auto truth = ivt::load_array(cfg.out_dir + "/phantom.bin");
    double peak = 0.0;
    for (double v : truth.real_data) peak = std::max(peak, v);
    CHECK(peak == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(std::filesystem::exists(cfg.out_dir + "/wdata.bin"));
}

TEST_CASE("pipeline restarts from the serialized sinogram") {
    ivt::RunConfig cfg;
    cfg.experiment = "interior";
    cfg.geom_preset = "small";
    cfg.out_dir = out_dir("restart");
    ivt::run_experiment(cfg);

    const auto stored = ivt::load_array(cfg.out_dir + "/sinogram.bin");
    ivt::Sinogram sino;
    sino.geom.R0 = std::stod(stored.meta.at("R0"));
    sino.geom.R1 = std::stod(stored.meta.at("R1"));
    sino.geom.n_phi = std::stoi(stored.meta.at("n_phi"));
    sino.geom.n_r = std::stoi(stored.meta.at("n_r"));
    sino.values = stored.real_data;

    const ivt::RunConfig r = ivt::resolve_config(cfg);
    const auto redo = ivt::invert(sino, r.invert, r.img_n, r.img_half_width);
    const auto recon = ivt::load_array(cfg.out_dir + "/recon.bin");
    CHECK(redo.image.values == recon.real_data);  // bit-identical restart
}

TEST_CASE("unknown experiment is a config error") {
    ivt::RunConfig cfg;
    cfg.experiment = "warp-drive";
    cfg.out_dir = out_dir("bad");
    CHECK_THROWS_AS(ivt::run_experiment(cfg), ivt::ConfigError);
}
