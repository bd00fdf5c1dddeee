// Acceptance suite: runs the full set of end-to-end checks the toolkit must
// satisfy, one line of output per criterion, exit code = number of failures.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ivt/cmt.hpp"
#include "ivt/ivpa.hpp"
#include "ivt/ivus.hpp"
#include "ivt/phantom.hpp"
#include "ivt/pipeline.hpp"
#include "ivt/specfun.hpp"

using namespace ivt;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kPi = 3.14159265358979323846;
int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double d2 = 0.0, n2 = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        d2 += (a[i] - b[i]) * (a[i] - b[i]);
        n2 += b[i] * b[i];
    }
    return std::sqrt(d2 / n2);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

const AcquisitionGeometry kPaperGeom{0.5, 1.5, 256, 401};

Sinogram paper_forward(const PhantomSpec& spec) {
    const ImageGrid f = make_phantom(spec, 2048, 1.02 * kPaperGeom.R1);
    return forward_cmt(f, kPaperGeom, 4 * kPaperGeom.n_phi);
}

// radial band covering both vessel-wall annuli of the ext presets
ImageGrid annulus_mask(int n, double hw, const PhantomSpec& spec) {
    ImageGrid mask(n, hw);
    for (const auto& f : spec.features) {
        if (f.kind != Feature::Kind::Annulus) continue;
        const double outer = f.radius, inner = f.radius - f.thickness;
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                const double r = std::hypot(mask.coord(ix), mask.coord(iy));
                if (r >= inner && r <= outer) mask.at(ix, iy) = 1.0;
            }
    }
    return mask;
}

std::filesystem::path out_root() {
    auto p = std::filesystem::temp_directory_path() / "ivt_acceptance";
    std::filesystem::create_directories(p);
    return p;
}

// ---------------------------------------------------------------- criteria

void criterion_1_interior() {
    const auto t0 = Clock::now();
    const auto spec = phantom_preset("interior");
    const Sinogram sino = paper_forward(spec);
    const auto res = invert(sino, InvertParams{}, 256, 0.75);
    const ImageGrid truth = make_phantom(spec, 256, 0.75);
    const Metrics m = compare(res.image, truth);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool pass = m.rel_l2 <= 0.10 && m.ncc >= 0.97 && secs <= 300.0;
    report(1, "interior fidelity", pass,
           fmt("rel_l2=%.4f (<=0.10)  ncc=%.5f (>=0.97)  %.1fs (<=300)", m.rel_l2, m.ncc, secs));
}

void criterion_2_ext_int() {
    const auto spec = phantom_preset("ext-int");
    const Sinogram sino = paper_forward(spec);
    const double hw = 1.05 * kPaperGeom.R1;
    const auto res = invert(sino, InvertParams{}, 256, hw);
    const ImageGrid truth = make_phantom(spec, 256, hw);
    const Metrics m = compare(res.image, truth);

    const ImageGrid mask = annulus_mask(256, hw, spec);
    double ring_rec = 0.0, ring_truth = 0.0;
    for (size_t k = 0; k < mask.values.size(); ++k)
        if (mask.values[k] != 0.0) {
            ring_rec += res.image.values[k];
            ring_truth += truth.values[k];
        }
    const double ring_ratio = ring_rec / ring_truth;
    const bool pass =
        m.rel_l2 <= 0.20 && m.ncc >= 0.90 && ring_ratio >= 0.80 && ring_ratio <= 1.20;
    report(2, "visible-wall exterior", pass,
           fmt("rel_l2=%.4f (<=0.20)  ncc=%.4f (>=0.90)  ring=%.3f (in [0.8,1.2])", m.rel_l2,
               m.ncc, ring_ratio));
}

void criterion_3_invisible() {
    const auto spec = phantom_preset("ext-invisible");
    const Sinogram sino = paper_forward(spec);
    const double hw = 1.05 * kPaperGeom.R1;
    const auto res = invert(sino, InvertParams{}, 256, hw);

    // every filtered coefficient (l != 0 inside the cone) must be bit-zero;
    // l = 0 is never filtered (the denominator has no zero on the contour)
    size_t cone_entries = 0;
    bool all_zero = true;
    for (int m = 0; m < res.spectra.contour.size(); ++m) {
        const Complex lambda = res.spectra.contour.nodes[m];
        for (int l = -res.spectra.l_max; l <= res.spectra.l_max; ++l) {
            if (l == 0) continue;
            if (std::abs(l) >= kPaperGeom.R0 * lambda.real()) {
                ++cone_entries;
                if (res.spectra.at(l, m) != Complex(0.0, 0.0)) all_zero = false;
            }
        }
    }

    const ImageGrid truth = make_phantom(spec, 256, hw);
    const ImageGrid mask = annulus_mask(256, hw, spec);
    const Metrics ring = compare_masked(res.image, truth, mask);
    const bool pass = all_zero && cone_entries > 0 && ring.ncc >= 0.85;
    report(3, "invisible-cone behavior", pass,
           fmt("cone entries=%.0f  ring ncc=%.4f (>=0.85)", static_cast<double>(cone_entries),
               ring.ncc) +
               (all_zero ? "  [cone bit-zero]" : "  [NONZERO IN CONE]"));
}

void criterion_4_noise() {
    // same configuration for both runs; the runner's noisy-data default band
    const auto spec = phantom_preset("ext-invisible");
    Sinogram sino = paper_forward(spec);
    InvertParams params;
    params.contour_M = kPi * kPaperGeom.n_r / (4.0 * kPaperGeom.r_max());
    params.n_lambda = kPaperGeom.n_r / 2;
    const double hw = 1.05 * kPaperGeom.R1;
    const ImageGrid truth = make_phantom(spec, 256, hw);

    bool numeric_ok = true;
    double rel0 = 0.0, rel5 = 0.0;
    try {
        rel0 = compare(invert(sino, params, 256, hw).image, truth).rel_l2;
        Sinogram noisy = sino;
        noisy.values = add_noise(sino.values, 0.05, 1);
        rel5 = compare(invert(noisy, params, 256, hw).image, truth).rel_l2;
    } catch (const NumericError&) {
        numeric_ok = false;
    }
    const bool pass = numeric_ok && rel5 <= 2.0 * rel0;
    report(4, "5% noise stability", pass,
           fmt("rel_l2 %.4f -> %.4f  ratio=%.2f (<=2)", rel0, rel5, rel5 / std::max(rel0, 1e-300)) +
               (numeric_ok ? "" : "  [NUMERIC GUARD TRIPPED]"));
}

void criterion_5_abel() {
    auto smooth = [](const AcquisitionGeometry& geom) {
        Sinogram s;
        s.geom = geom;
        s.values.assign(static_cast<size_t>(geom.n_phi) * geom.n_r, 0.0);
        for (int i = 0; i < geom.n_phi; ++i)
            for (int j = 1; j < geom.n_r; ++j) {
                const double u = j * geom.dr() / geom.r_max();
                s.at(i, j) = (1.0 + 0.4 * std::cos(geom.phi(i))) * u * u * (1.0 - u) * (1.0 - u) *
                             std::sin(2.4 * u + 0.3);
            }
        return s;
    };
    const AcquisitionGeometry g1{0.5, 1.5, 4, 401};
    const AcquisitionGeometry g2{0.5, 1.5, 4, 801};
    const Sinogram s1 = smooth(g1), s2 = smooth(g2);
    const double e1 = rel_l2(abel_inverse(abel_forward(s1, g1.dr()), g1).values, s1.values);
    const double e2 = rel_l2(abel_inverse(abel_forward(s2, g2.dr()), g2).values, s2.values);
    const bool pass = e1 <= 0.01 && e1 / e2 >= 3.0;
    report(5, "Abel pair identity", pass,
           fmt("rel_l2=%.5f (<=0.01)  refine ratio=%.2f (>=3)", e1, e1 / e2));
}

void criterion_6_bessel() {
    // recurrence residual over the strip, orders <= 64
    double worst_rec = 0.0;
    for (double x : {0.5, 2.0, 7.0, 15.0, 28.0, 44.0, 63.0, 90.0})
        for (double y : {0.0, 0.3, 0.7, 1.0}) {
            const Complex z(x, y);
            std::vector<Complex> j(67);
            bessel_jn(66, z, j);
            for (int n = 1; n <= 64; ++n) {
                const double resid =
                    std::abs(j[n - 1] + j[n + 1] - 2.0 * static_cast<double>(n) / z * j[n]) /
                    std::max(1.0, std::abs(j[n]));
                worst_rec = std::max(worst_rec, resid);
            }
        }
    // independent series oracle for |z| <= 12
    double worst_series = 0.0;
    for (int n : {0, 1, 3, 8, 15}) {
        for (Complex z : {Complex(0.4, 0.1), Complex(3.0, 0.8), Complex(7.5, 0.2),
                          Complex(11.0, 1.0), Complex(12.0, 0.0)}) {
            Complex term(1.0, 0.0);
            for (int k = 1; k <= n; ++k) term *= 0.5 * z / static_cast<double>(k);
            Complex sum = term;
            const Complex q = -0.25 * z * z;
            for (int k = 1; k <= 60; ++k) {
                term *= q / (static_cast<double>(k) * static_cast<double>(n + k));
                sum += term;
            }
            const double rel =
                std::abs(bessel_j(n, z) - sum) / std::max(std::abs(sum), 1e-300);
            worst_series = std::max(worst_series, rel);
        }
    }
    // |J_n(z)| <= e^{Im z} on the strip
    bool bound_ok = true;
    for (double x = 0.0; x <= 120.0; x += 3.7)
        for (double y : {0.0, 0.4, 1.0, 1.5})
            for (int n : {0, 1, 5, 21, 64})
                if (std::abs(bessel_j(n, Complex(x, y))) > std::exp(y) * (1.0 + 1e-9))
                    bound_ok = false;
    const bool pass = worst_rec <= 1e-9 && worst_series <= 1e-12 && bound_ok;
    report(6, "Bessel suite", pass,
           fmt("recurrence=%.2e (<=1e-9)  series=%.2e (<=1e-12)  ", worst_rec, worst_series) +
               (bound_ok ? "strip bound holds" : "STRIP BOUND VIOLATED"));
}

void criterion_7_kernel_volterra() {
    bool support_ok = ivt::kernel_K(0.5, 0.9) == 0.0 && ivt::kernel_K(0.3, 0.6) == 0.0 &&
                      ivt::kernel_K(0.3, 0.6 + 1e-9) > 0.0;
    double jump_err = 0.0;
    for (double r : {0.25, 0.5, 1.0}) {
        const double v = 4.0 * kPi * kPi * kernel_K(r, 2.0 * r * (1.0 + 1e-6));
        jump_err = std::max(jump_err, std::abs(v - kPi / (2.0 * r)));
    }
    // integral-term decay exponent at the jump
    auto tail = [](double r, double eps) {
        const double s = 2.0 * (r + eps);
        return std::abs(4.0 * kPi * kPi * kernel_K(r, s) - kPi / std::sqrt(2.0 * r * s));
    };
    const double expo = std::log(tail(0.4, 0.02) / tail(0.4, 0.01)) / std::log(2.0);

    // brute-force convolution oracle at 5 points
    auto oracle = [](double r, double s) {
        const int n = 20000;
        const double wmax = std::sqrt(0.5 * s - r);
        const double h = wmax / n;
        double acc = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double w = k * h;
            const double t = r + w * w;
            const double f = 2.0 / (std::sqrt(t + r) * std::sqrt((s - t) * (s - t) - r * r));
            acc += (k == 0 || k == n) ? 0.5 * f : f;
        }
        return 2.0 * acc * h / (4.0 * kPi * kPi);
    };
    double conv_err = 0.0;
    const double pts[5][2] = {{0.3, 1.0}, {0.5, 1.2}, {0.25, 0.8}, {0.8, 2.0}, {1.0, 2.5}};
    for (const auto& p : pts)
        conv_err = std::max(conv_err,
                            std::abs(kernel_K(p[0], p[1]) / oracle(p[0], p[1]) - 1.0));

    // round trip at n = 256
    const int n = 256;
    std::vector<double> r_grid(n), s_grid(n);
    for (int j = 0; j < n; ++j) {
        r_grid[j] = 2.0 * (j + 1) / n;
        s_grid[j] = 2.0 * r_grid[j];
    }
    const KernelTable table = build_kernel_table(r_grid, s_grid);
    std::vector<double> M_true(n, 0.0);
    for (int j = 0; j < n; ++j) {
        const double u = (r_grid[j] - 1.0) / 0.5;
        if (std::abs(u) < 1.0) M_true[j] = (1.0 - u * u) * (1.0 - u * u);
    }
    const MeasurementW W = volterra_forward(M_true, table);
    const auto Mi = solve_volterra_iter(W, table, 300, 1e-12, nullptr);
    const auto Mt = solve_volterra_triangular(W, table);
    const double round = rel_l2(Mt, M_true);
    const double agree = rel_l2(Mi, Mt);

    const bool pass = support_ok && jump_err <= 1e-4 && expo >= 1.9 && conv_err <= 1e-5 &&
                      round <= 0.02 && agree <= 1e-3;
    report(7, "kernel / Volterra", pass,
           fmt("jump=%.1e (<=1e-4)  conv=%.1e (<=1e-5)  round=%.4f (<=0.02)", jump_err, conv_err,
               round) +
               fmt("  agree=%.1e (<=1e-3)  expo=%.2f (>=1.9)", agree, expo));
}

void criterion_8_contour_proxy() {
    // band-limited interior phantom: radially smooth AND with angular content
    // well inside the visibility cone (rho_max << R0), so both contour
    // heights regularize away nothing; the two integrals must then agree
    PhantomSpec spec;
    Feature f;
    f.kind = Feature::Kind::Disk;
    f.cx = 0.05;
    f.cy = 0.03;
    f.radius = 0.22;
    f.smoothing_width = 0.1;
    spec.features.push_back(f);
    const AcquisitionGeometry geom{0.5, 1.5, 64, 401};
    const ImageGrid fi = make_phantom(spec, 1024, 1.02 * geom.R1);
    const Sinogram sino = forward_cmt(fi, geom, 4 * geom.n_phi);

    InvertParams base;
    const auto r1 = invert(sino, base, 128, 0.75);
    InvertParams doubled = base;
    doubled.contour_a = 2.0 / geom.R1;  // a x2, nodes rescaled with the segment
    const auto r2 = invert(sino, doubled, 128, 0.75);
    const double diff = rel_l2(r2.image.values, r1.image.values);
    report(8, "contour-deformation proxy", diff <= 0.01, fmt("image diff=%.5f (<=0.01)", diff));
}

void criterion_9_ivus_wave() {
    const auto t0 = Clock::now();
    RunConfig cfg;
    cfg.experiment = "ivus-wave";
    cfg.geom_preset = "desk";  // 64 transducers, reduced grid per the budget
    cfg.contrast = 0.01;
    cfg.out_dir = (out_root() / "ivus_wave_1pct").string();
    const RunResult r1 = run_experiment(cfg);
    cfg.contrast = 0.05;
    cfg.out_dir = (out_root() / "ivus_wave_5pct").string();
    const RunResult r5 = run_experiment(cfg);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool pass =
        r1.metrics.ncc >= 0.8 && r5.metrics.ncc >= 0.6 && r5.metrics.ncc < r1.metrics.ncc &&
        secs <= 1800.0;
    report(9, "IVUS wave end-to-end", pass,
           fmt("ncc@1%%=%.4f (>=0.8)  ncc@5%%=%.4f (>=0.6, degraded)  %.0fs (<=1800)",
               r1.metrics.ncc, r5.metrics.ncc, secs));
}

void criterion_10_determinism() {
    auto run_to = [&](const std::string& dir) {
        RunConfig cfg;
        cfg.experiment = "interior";
        cfg.geom_preset = "small";
        cfg.noise = 0.05;
        cfg.seed = 11;
        cfg.out_dir = dir;
        return run_experiment(cfg);
    };
    const std::string d1 = (out_root() / "det_a").string();
    const std::string d2 = (out_root() / "det_b").string();
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
    run_to(d1);
    run_to(d2);

    auto slurp = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        return std::vector<char>((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
    };
    bool same = true;
    std::string bad;
    for (const char* name :
         {"phantom.bin", "phantom.bin.json", "phantom.pgm", "sinogram.bin", "sinogram.bin.json",
          "spectra.bin", "spectra.bin.json", "recon.bin", "recon.bin.json", "recon.pgm"}) {
        const auto a = slurp(d1 + "/" + name), b = slurp(d2 + "/" + name);
        if (a.empty() || a != b) {
            same = false;
            bad = name;
        }
    }
    // metrics.json carries wall-clock stage timings; every numeric result
    // field must still match exactly
    nlohmann::json ma, mb;
    std::ifstream(d1 + "/metrics.json") >> ma;
    std::ifstream(d2 + "/metrics.json") >> mb;
    for (const char* key : {"rel_l2", "linf", "ncc", "imag_ratio"})
        if (ma.at(key).get<double>() != mb.at(key).get<double>()) {
            same = false;
            bad = std::string("metrics:") + key;
        }
    if (ma.at("window") != mb.at("window")) {
        same = false;
        bad = "metrics:window";
    }
    report(10, "determinism", same,
           same ? "reruns bit-identical (timings excluded)" : "MISMATCH in " + bad);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1_interior();
    criterion_2_ext_int();
    criterion_3_invisible();
    criterion_4_noise();
    criterion_5_abel();
    criterion_6_bessel();
    criterion_7_kernel_volterra();
    criterion_8_contour_proxy();
    criterion_9_ivus_wave();
    criterion_10_determinism();
    std::printf("%d of 10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
