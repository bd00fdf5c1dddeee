#include "ivt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ivt/io.hpp"
#include "ivt/ivpa.hpp"
#include "ivt/ivus.hpp"
#include "ivt/phantom.hpp"

namespace ivt {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string phantom_name_for(const std::string& experiment) {
    if (experiment == "interior") return "interior";
    if (experiment == "ext-int") return "ext-int";
    if (experiment == "ivpa") return "interior";
    return "ext-invisible";  // ext-invisible, ivus-born, ivus-wave
}

PhantomSpec load_phantom(const RunConfig& cfg) {
    if (!cfg.phantom_file.empty()) {
        std::ifstream f(cfg.phantom_file);
        if (!f) throw ConfigError("cannot open phantom file: " + cfg.phantom_file);
        std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        return phantom_from_json(text);
    }
    return phantom_preset(phantom_name_for(cfg.experiment));
}

MetaMap geom_meta(const AcquisitionGeometry& g) {
    return {{"R0", std::to_string(g.R0)},
            {"R1", std::to_string(g.R1)},
            {"n_phi", std::to_string(g.n_phi)},
            {"n_r", std::to_string(g.n_r)}};
}

void save_image(const ImageGrid& img, const std::string& path, const MetaMap& extra = {}) {
    MetaMap meta = extra;
    meta["n"] = std::to_string(img.n);
    meta["half_width"] = std::to_string(img.half_width);
    save_array(path, img.values, {static_cast<size_t>(img.n), static_cast<size_t>(img.n)}, meta);
}

}  // namespace

RunConfig resolve_config(RunConfig cfg) {
    if (cfg.geom_preset == "paper") {
        if (cfg.geom.n_phi == 0) cfg.geom.n_phi = 256;
        if (cfg.geom.n_r == 0) cfg.geom.n_r = 401;
        if (cfg.forward_grid_n == 0) cfg.forward_grid_n = 2048;
        if (cfg.img_n == 0) cfg.img_n = 256;
    } else if (cfg.geom_preset == "desk") {
        if (cfg.geom.n_phi == 0) cfg.geom.n_phi = 64;
        if (cfg.geom.n_r == 0) cfg.geom.n_r = 201;
        if (cfg.forward_grid_n == 0) cfg.forward_grid_n = 1024;
        if (cfg.img_n == 0) cfg.img_n = 256;
    } else if (cfg.geom_preset == "small") {
        if (cfg.geom.n_phi == 0) cfg.geom.n_phi = 32;
        if (cfg.geom.n_r == 0) cfg.geom.n_r = 101;
        if (cfg.forward_grid_n == 0) cfg.forward_grid_n = 512;
        if (cfg.img_n == 0) cfg.img_n = 128;
    } else {
        throw ConfigError("unknown geometry preset: " + cfg.geom_preset);
    }
    if (cfg.geom.R0 <= 0.0) cfg.geom.R0 = 0.5;
    if (cfg.geom.R1 <= 0.0) cfg.geom.R1 = 1.5;
    cfg.geom.validate();

    if (cfg.img_half_width <= 0.0)
        cfg.img_half_width = (cfg.experiment == "interior" || cfg.experiment == "ivpa")
                                 ? 0.75
                                 : 1.05 * cfg.geom.R1;
    if (cfg.noise > 0.0 && cfg.invert.contour_M <= 0.0) {
        // amplified data noise grows ~ M^{3/2}; a quarter of the Nyquist band
        // keeps the noise term at the level of the regularization blur floor
        cfg.invert.contour_M = 3.14159265358979323846 * cfg.geom.n_r / (4.0 * cfg.geom.r_max());
        if (cfg.invert.n_lambda <= 0) cfg.invert.n_lambda = std::max(64, cfg.geom.n_r / 2);
    }
    if (cfg.n_arc == 0) cfg.n_arc = 4 * cfg.geom.n_phi;
    // FD domain: boundary reflections (two-way from the sponge inner edge)
    // must arrive after the recorded window 2 (R0 + R1)
    if (cfg.wave_grid_n == 0) cfg.wave_grid_n = 448;
    if (cfg.wave_half_width <= 0.0) cfg.wave_half_width = 2.0 * cfg.geom.R0 + cfg.geom.R1 + 0.45;
    if (cfg.cache_dir.empty()) cfg.cache_dir = cfg.out_dir + "/cache";
    return cfg;
}

RunConfig run_config_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    RunConfig cfg;
    cfg.experiment = j.value("experiment", cfg.experiment);
    cfg.geom_preset = j.value("geom_preset", cfg.geom_preset);
    cfg.noise = j.value("noise", cfg.noise);
    cfg.contrast = j.value("contrast", cfg.contrast);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.phantom_file = j.value("phantom_file", cfg.phantom_file);
    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        cfg.geom.R0 = g.value("R0", 0.0);
        cfg.geom.R1 = g.value("R1", 0.0);
        cfg.geom.n_phi = g.value("n_phi", 0);
        cfg.geom.n_r = g.value("n_r", 0);
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        cfg.invert.contour_a = s.value("contour_a", 0.0);
        cfg.invert.contour_M = s.value("contour_M", 0.0);
        cfg.invert.n_lambda = s.value("n_lambda", 0);
        cfg.invert.n_vertical = s.value("n_vertical", 8);
        cfg.invert.cone_margin = s.value("cone_margin", 0.0);
    }
    if (j.contains("grid")) {
        cfg.img_n = j["grid"].value("n", 0);
        cfg.img_half_width = j["grid"].value("half_width", 0.0);
    }
    if (j.contains("wave")) {
        const auto& w = j["wave"];
        cfg.wave_grid_n = w.value("n", 0);
        cfg.wave_half_width = w.value("half_width", 0.0);
        cfg.sim.cfl = w.value("cfl", cfg.sim.cfl);
        cfg.sim.source_width = w.value("source_width", cfg.sim.source_width);
        cfg.sim.sponge_width = w.value("sponge_width", cfg.sim.sponge_width);
        cfg.sim.sponge_strength = w.value("sponge_strength", cfg.sim.sponge_strength);
    }
    cfg.forward_grid_n = j.value("forward_grid_n", 0);
    cfg.n_arc = j.value("n_arc", 0);
    return cfg;
}

RunResult run_experiment(const RunConfig& cfg_in) {
    const RunConfig cfg = resolve_config(cfg_in);
    std::filesystem::create_directories(cfg.out_dir);
    RunResult result;
    result.out_dir = cfg.out_dir;
    auto& timings = result.stage_timings_ms;

    const PhantomSpec spec = load_phantom(cfg);
    const bool is_ivus = cfg.experiment == "ivus-born" || cfg.experiment == "ivus-wave";
    const double truth_scale = is_ivus ? cfg.contrast : 1.0;

    auto t0 = Clock::now();
    ImageGrid truth = make_phantom(spec, cfg.img_n, cfg.img_half_width);
    if (truth_scale != 1.0)
        for (auto& v : truth.values) v *= truth_scale;
    timings["phantom"] = ms_since(t0);
    save_image(truth, cfg.out_dir + "/phantom.bin");

    // shared gray window for the phantom/reconstruction pair
    double lo = truth.values[0], hi = truth.values[0];
    for (double v : truth.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) hi = lo + 1.0;
    render_pgm(truth, cfg.out_dir + "/phantom.pgm", lo, hi);

    InvertResult inv;
    if (cfg.experiment == "interior" || cfg.experiment == "ext-int" ||
        cfg.experiment == "ext-invisible" || cfg.experiment == "ivpa" ||
        cfg.experiment == "ivus-born") {
        t0 = Clock::now();
        const ImageGrid f_fwd = make_phantom(spec, cfg.forward_grid_n, 1.02 * cfg.geom.R1);
        Sinogram sino = forward_cmt(f_fwd, cfg.geom, cfg.n_arc);
        if (truth_scale != 1.0)
            for (auto& v : sino.values) v *= truth_scale;
        timings["forward"] = ms_since(t0);

        if (cfg.experiment == "ivpa") {
            t0 = Clock::now();
            TransducerTraces traces = abel_forward(sino, cfg.geom.dr());
            if (cfg.noise > 0.0) traces.values = add_noise(traces.values, cfg.noise, cfg.seed);
            timings["ivpa_forward"] = ms_since(t0);
            save_array(cfg.out_dir + "/traces.bin", traces.values,
                       {static_cast<size_t>(traces.geom.n_phi), static_cast<size_t>(traces.n_t)},
                       [&] {
                           MetaMap m = geom_meta(cfg.geom);
                           m["dt"] = std::to_string(traces.dt);
                           m["n_t"] = std::to_string(traces.n_t);
                           m["abel_pair_gain"] = std::to_string(abel_pair_gain());
                           return m;
                       }());
            t0 = Clock::now();
            sino = abel_inverse(traces, cfg.geom);
            timings["abel_inverse"] = ms_since(t0);
        } else if (cfg.experiment == "ivus-born") {
            t0 = Clock::now();
            std::vector<double> r_grid, s_grid;
            volterra_grids(cfg.geom, r_grid, s_grid);
            const KernelTable table = kernel_table_cached(r_grid, s_grid, cfg.cache_dir);
            std::vector<MeasurementW> data(cfg.geom.n_phi);
            std::vector<double> M(r_grid.size());
            std::vector<double> flat;
            flat.reserve(static_cast<size_t>(cfg.geom.n_phi) * s_grid.size());
            for (int i = 0; i < cfg.geom.n_phi; ++i) {
                for (size_t j = 0; j < r_grid.size(); ++j)
                    M[j] = sino.at(i, static_cast<int>(j) + 1) / r_grid[j];
                data[i] = volterra_forward(M, table);
                flat.insert(flat.end(), data[i].values.begin(), data[i].values.end());
            }
            if (cfg.noise > 0.0) {
                flat = add_noise(flat, cfg.noise, cfg.seed);
                for (int i = 0; i < cfg.geom.n_phi; ++i)
                    std::copy(flat.begin() + static_cast<long>(i) * static_cast<long>(s_grid.size()),
                              flat.begin() + (i + 1l) * static_cast<long>(s_grid.size()),
                              data[i].values.begin());
            }
            timings["volterra_forward"] = ms_since(t0);
            save_array(cfg.out_dir + "/wdata.bin", flat,
                       {static_cast<size_t>(cfg.geom.n_phi), s_grid.size()}, geom_meta(cfg.geom));
            t0 = Clock::now();
            inv = ivus_reconstruct(data, cfg.geom, table, cfg.invert, cfg.img_n,
                                   cfg.img_half_width);
            timings["ivus_reconstruct"] = ms_since(t0);
        }

        if (cfg.experiment != "ivus-born") {
            if (cfg.noise > 0.0 && cfg.experiment != "ivpa")
                sino.values = add_noise(sino.values, cfg.noise, cfg.seed);
            save_array(cfg.out_dir + "/sinogram.bin", sino.values,
                       {static_cast<size_t>(cfg.geom.n_phi), static_cast<size_t>(cfg.geom.n_r)},
                       geom_meta(cfg.geom));
            t0 = Clock::now();
            inv = invert(sino, cfg.invert, cfg.img_n, cfg.img_half_width);
            timings["invert"] = ms_since(t0);
        }
    } else if (cfg.experiment == "ivus-wave") {
        t0 = Clock::now();
        SpeedField field{make_phantom(spec, cfg.wave_grid_n, cfg.wave_half_width)};
        for (auto& v : field.m.values) v *= cfg.contrast;
        SimConfig sim = cfg.sim;
        {
            SimConfig probe = sim;
            probe.record_time = 1.0;  // placeholder; only dt is needed here
            probe = resolve_sim_config(probe, field);
            // 12 dt pulse: short against every feature, wide enough for the
            // grid to carry it without ringing
            if (sim.source_width <= 0.0) sim.source_width = 12.0 * probe.dt;
            if (sim.record_time <= 0.0)
                sim.record_time = 2.0 * cfg.geom.r_max() + sim.source_width + 8.0 * probe.dt;
        }
        const SimConfig resolved = resolve_sim_config(sim, field);
        std::vector<MeasurementW> raw = acquire_all(field, cfg.geom, sim);
        timings["wavesim"] = ms_since(t0);

        t0 = Clock::now();
        std::vector<double> r_grid, s_grid;
        volterra_grids(cfg.geom, r_grid, s_grid);
        std::vector<MeasurementW> data(cfg.geom.n_phi);
        std::vector<double> flat;
        for (int i = 0; i < cfg.geom.n_phi; ++i) {
            data[i] = resample_measurement(raw[i], s_grid, source_centroid(resolved));
            flat.insert(flat.end(), data[i].values.begin(), data[i].values.end());
        }
        if (cfg.noise > 0.0) {
            flat = add_noise(flat, cfg.noise, cfg.seed);
            for (int i = 0; i < cfg.geom.n_phi; ++i)
                std::copy(flat.begin() + static_cast<long>(i) * static_cast<long>(s_grid.size()),
                          flat.begin() + (i + 1l) * static_cast<long>(s_grid.size()),
                          data[i].values.begin());
        }
        save_array(cfg.out_dir + "/wdata.bin", flat,
                   {static_cast<size_t>(cfg.geom.n_phi), s_grid.size()}, [&] {
                       MetaMap m = geom_meta(cfg.geom);
                       m["dt"] = std::to_string(resolved.dt);
                       m["source_width"] = std::to_string(resolved.source_width);
                       m["contrast"] = std::to_string(cfg.contrast);
                       return m;
                   }());
        const KernelTable table = kernel_table_cached(r_grid, s_grid, cfg.cache_dir);
        inv = ivus_reconstruct(data, cfg.geom, table, cfg.invert, cfg.img_n, cfg.img_half_width);
        timings["ivus_reconstruct"] = ms_since(t0);
    } else {
        throw ConfigError("unknown experiment: " + cfg.experiment);
    }

    // spectra of the regularized division, complex, (2 l_max + 1) x nodes
    save_array(cfg.out_dir + "/spectra.bin", inv.spectra.coeffs,
               {static_cast<size_t>(2 * inv.spectra.l_max + 1),
                static_cast<size_t>(inv.spectra.contour.size())},
               {{"l_max", std::to_string(inv.spectra.l_max)},
                {"contour_a", std::to_string(inv.spectra.contour.a)},
                {"contour_M", std::to_string(inv.spectra.contour.M)}});

    save_image(inv.image, cfg.out_dir + "/recon.bin");
    render_pgm(inv.image, cfg.out_dir + "/recon.pgm", lo, hi);

    result.metrics = compare(inv.image, truth);
    result.imag_ratio = inv.imag_ratio;
    result.imag_warning = inv.imag_warning;

    nlohmann::json mj;
    mj["rel_l2"] = result.metrics.rel_l2;
    mj["linf"] = result.metrics.linf;
    mj["ncc"] = result.metrics.ncc;
    mj["imag_ratio"] = result.imag_ratio;
    mj["window"] = {lo, hi};
    mj["stage_timings_ms"] = nlohmann::json::object();
    for (const auto& [k, v] : timings) mj["stage_timings_ms"][k] = v;
    std::ofstream mf(cfg.out_dir + "/metrics.json");
    mf << mj.dump(2) << "\n";
    return result;
}

}  // namespace ivt
