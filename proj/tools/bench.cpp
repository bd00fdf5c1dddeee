// Timing comparison of the OpenMP kernels against the serial reference
// drivers on a representative mid-size problem.

#include <chrono>
#include <cstdio>

#include "ivt/cmt.hpp"
#include "ivt/phantom.hpp"
#include "ivt/reference.hpp"
#include "ivt/wavesim.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
double timed(F&& f) {
    const auto t0 = Clock::now();
    f();
    return seconds(t0);
}

}  // namespace

int main() {
    const ivt::AcquisitionGeometry geom{0.5, 1.5, 64, 201};
    const ivt::PhantomSpec spec = ivt::phantom_preset("ext-int");
    const ivt::ImageGrid f = ivt::make_phantom(spec, 512, 1.02 * geom.R1);
    const ivt::InvertParams params;

    std::printf("%-18s %10s %10s %8s\n", "kernel", "serial(s)", "openmp(s)", "speedup");

    ivt::Sinogram sino_p, sino_s;
    double ts = timed([&] { sino_s = ivt::ref::forward_cmt(f, geom, 4 * geom.n_phi); });
    double tp = timed([&] { sino_p = ivt::forward_cmt(f, geom, 4 * geom.n_phi); });
    std::printf("%-18s %10.3f %10.3f %8.2f  %s\n", "forward_cmt", ts, tp, ts / tp,
                sino_p.values == sino_s.values ? "bit-identical" : "MISMATCH");

    const ivt::Contour contour = ivt::default_contour(geom, params);
    std::vector<ivt::Complex> gh_s, gh_p;
    ts = timed([&] { gh_s = ivt::ref::hankel_data(sino_s, contour); });
    tp = timed([&] { gh_p = ivt::hankel_data(sino_p, contour); });
    std::printf("%-18s %10.3f %10.3f %8.2f  %s\n", "hankel_data", ts, tp, ts / tp,
                gh_s == gh_p ? "bit-identical" : "MISMATCH");

    const auto gl = ivt::angular_fourier(gh_p, geom.n_phi, contour);
    const auto fl = ivt::spectral_divide_regularize(gl, geom, 0.0);
    const auto radii = ivt::radii_grid(geom);
    ivt::ModeProfiles mp_s, mp_p;
    ts = timed([&] { mp_s = ivt::ref::inverse_contour(fl, radii); });
    tp = timed([&] { mp_p = ivt::inverse_contour(fl, radii); });
    std::printf("%-18s %10.3f %10.3f %8.2f  %s\n", "inverse_contour", ts, tp, ts / tp,
                mp_s.values == mp_p.values ? "bit-identical" : "MISMATCH");

    ivt::AssembleResult as_s, as_p;
    ts = timed([&] { as_s = ivt::ref::assemble_image(mp_s, 256, 1.55); });
    tp = timed([&] { as_p = ivt::assemble_image(mp_p, 256, 1.55); });
    std::printf("%-18s %10.3f %10.3f %8.2f  %s\n", "assemble_image", ts, tp, ts / tp,
                as_s.image.values == as_p.image.values ? "bit-identical" : "MISMATCH");

    ivt::SpeedField field{ivt::make_phantom(spec, 192, 2.6)};
    for (auto& v : field.m.values) v *= 0.01;
    ivt::SimConfig sim;
    sim.sponge_width = 16;
    sim.record_time = 1.0;
    ivt::AcquisitionGeometry wgeom{0.5, 1.5, 8, 51};
    std::vector<ivt::MeasurementW> aw_s, aw_p;
    ts = timed([&] { aw_s = ivt::ref::acquire_all(field, wgeom, sim); });
    tp = timed([&] { aw_p = ivt::acquire_all(field, wgeom, sim); });
    bool same = aw_s.size() == aw_p.size();
    for (size_t i = 0; same && i < aw_s.size(); ++i) same = aw_s[i].values == aw_p[i].values;
    std::printf("%-18s %10.3f %10.3f %8.2f  %s\n", "acquire_all", ts, tp, ts / tp,
                same ? "bit-identical" : "MISMATCH");
    return 0;
}
