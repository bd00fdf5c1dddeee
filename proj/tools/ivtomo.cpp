// Command-line runner for the reconstruction experiments.
//
//   ivtomo run [config.json] [flags]   run one experiment end to end
//   ivtomo render in.bin out.pgm       render a saved image with a fixed window

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ivt/grid.hpp"
#include "ivt/io.hpp"
#include "ivt/pipeline.hpp"

namespace {

int cmd_run(const std::string& config_path, ivt::RunConfig overrides, bool has_config,
            const std::vector<std::string>& set_flags) {
    ivt::RunConfig cfg;
    if (has_config) {
        std::ifstream f(config_path);
        if (!f) throw ivt::ConfigError("cannot open config: " + config_path);
        std::stringstream ss;
        ss << f.rdbuf();
        cfg = ivt::run_config_from_json(ss.str());
    }
    // flag overrides win over the config file
    auto is_set = [&](const std::string& name) {
        for (const auto& s : set_flags)
            if (s == name) return true;
        return false;
    };
    if (is_set("experiment")) cfg.experiment = overrides.experiment;
    if (is_set("noise")) cfg.noise = overrides.noise;
    if (is_set("contrast")) cfg.contrast = overrides.contrast;
    if (is_set("seed")) cfg.seed = overrides.seed;
    if (is_set("out")) cfg.out_dir = overrides.out_dir;
    if (is_set("geom-preset")) cfg.geom_preset = overrides.geom_preset;
    if (is_set("contour-a")) cfg.invert.contour_a = overrides.invert.contour_a;
    if (is_set("contour-M")) cfg.invert.contour_M = overrides.invert.contour_M;
    if (is_set("cone-margin")) cfg.invert.cone_margin = overrides.invert.cone_margin;
    if (is_set("phantom")) cfg.phantom_file = overrides.phantom_file;

    const ivt::RunResult res = ivt::run_experiment(cfg);
    std::cout << "experiment: " << cfg.experiment << "\n"
              << "out:        " << res.out_dir << "\n"
              << "rel_l2:     " << res.metrics.rel_l2 << "\n"
              << "linf:       " << res.metrics.linf << "\n"
              << "ncc:        " << res.metrics.ncc << "\n"
              << "imag_ratio: " << res.imag_ratio << (res.imag_warning ? "  (WARNING: large)" : "")
              << "\n";
    for (const auto& [k, v] : res.stage_timings_ms)
        std::cout << "t[" << k << "] = " << v << " ms\n";
    return 0;
}

int cmd_render(const std::string& in, const std::string& out, double lo, double hi) {
    const auto arr = ivt::load_array(in);
    if (arr.dtype != "f8" || arr.shape.size() != 2 || arr.shape[0] != arr.shape[1])
        throw ivt::ConfigError("render: expected a square f8 image array");
    ivt::ImageGrid img(static_cast<int>(arr.shape[0]),
                       arr.meta.count("half_width") ? std::stod(arr.meta.at("half_width")) : 1.0);
    img.values = arr.real_data;
    if (lo == 0.0 && hi == 0.0) {
        lo = hi = img.values[0];
        for (double v : img.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!(hi > lo)) hi = lo + 1.0;
    }
    ivt::render_pgm(img, out, lo, hi);
    std::cout << "wrote " << out << " window [" << lo << ", " << hi << "]\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"circular-means tomography experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run an experiment");
    std::string config_path;
    ivt::RunConfig ov;
    run->add_option("config", config_path, "JSON config file");
    run->add_option("--experiment", ov.experiment,
                    "interior | ext-int | ext-invisible | ivpa | ivus-born | ivus-wave");
    run->add_option("--noise", ov.noise, "relative L2 noise level");
    run->add_option("--contrast", ov.contrast, "peak of m for ivus experiments");
    run->add_option("--seed", ov.seed, "noise seed");
    run->add_option("--out", ov.out_dir, "output directory");
    run->add_option("--geom-preset", ov.geom_preset, "paper | desk | small");
    run->add_option("--contour-a", ov.invert.contour_a, "imaginary shift of the contour");
    run->add_option("--contour-M", ov.invert.contour_M, "real extent of the contour");
    run->add_option("--cone-margin", ov.invert.cone_margin, "extra regularization margin");
    run->add_option("--phantom", ov.phantom_file, "phantom spec JSON file");

    auto* render = app.add_subcommand("render", "render a saved image to PGM");
    std::string rin, rout;
    double lo = 0.0, hi = 0.0;
    render->add_option("input", rin, "image .bin path")->required();
    render->add_option("output", rout, "output .pgm path")->required();
    render->add_option("--lo", lo, "window low edge");
    render->add_option("--hi", hi, "window high edge");

    try {
        app.parse(argc, argv);
        if (run->parsed()) {
            std::vector<std::string> set_flags;
            for (const auto* opt : run->get_options())
                if (opt->count() > 0 && opt->get_name().size() > 2)
                    set_flags.push_back(opt->get_name().substr(2));
            return cmd_run(config_path, ov, run->count("config") > 0, set_flags);
        }
        if (render->parsed()) return cmd_render(rin, rout, lo, hi);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ivt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ivt::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
