#include "ivt/ivpa.hpp"

#include <cmath>
#include <span>

#include "ivt/specfun.hpp"

namespace ivt {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Inner Abel integral of one trace row: A(t) = int_0^t h(r)/sqrt(t^2-r^2) dr
// for every t on the row's own grid.
std::vector<double> abel_all(std::span<const double> h, double grid_max) {
    const int n = static_cast<int>(h.size());
    std::vector<double> out(n, 0.0);
    const double d = grid_max / (n - 1);
    for (int k = 1; k < n; ++k) out[k] = abel_weighted_integral(h, grid_max, k * d);
    return out;
}

}  // namespace

double abel_pair_gain() {
    // d/dt and the weighted integrals lose 1/(4 pi^2) per round trip of the
    // printed pair; verified against the forward map by abel_pair_gain_check.
    return 4.0 * kPi * kPi;
}

double abel_pair_gain_check(int n_r) {
    // reference profile: smooth, vanishing at both ends of [0, 1]
    std::vector<double> g(n_r);
    const double d = 1.0 / (n_r - 1);
    for (int j = 0; j < n_r; ++j) {
        const double r = j * d;
        g[j] = r * r * (1.0 - r) * (1.0 - r);
    }
    // printed forward: u = (1/2pi) d/dt [ (1/2pi) A[g](t) ]
    const auto A = abel_all(g, 1.0);
    std::vector<double> u(n_r, 0.0);
    const double c = 1.0 / (4.0 * kPi * kPi);
    for (int k = 1; k < n_r - 1; ++k) u[k] = c * (A[k + 1] - A[k - 1]) / (2.0 * d);
    u[0] = c * (-3.0 * A[0] + 4.0 * A[1] - A[2]) / (2.0 * d);
    u[n_r - 1] = c * (3.0 * A[n_r - 1] - 4.0 * A[n_r - 2] + A[n_r - 3]) / (2.0 * d);
    // printed inverse, no calibration: g~ = 4r int u/(2pi sqrt(r^2-t^2)) dt
    double num = 0.0, den = 0.0;
    for (int j = n_r / 4; j <= 3 * n_r / 4; ++j) {
        const double r = j * d;
        const double gt = 4.0 * r / (2.0 * kPi) * abel_weighted_integral(u, 1.0, r);
        num += gt * g[j];
        den += gt * gt;
    }
    return num / den;  // factor the printed inverse must be multiplied by
}

TransducerTraces abel_forward(const Sinogram& sino, double dt) {
    const auto& geom = sino.geom;
    geom.validate();
    if (dt <= 0.0) throw ConfigError("abel_forward: dt must be > 0");
    if (dt > geom.dr() * (1.0 + 1e-12))
        throw ConfigError("abel_forward: dt exceeds the radii spacing (undersampled time axis)");

    TransducerTraces tr;
    tr.geom = geom;
    tr.dt = dt;
    // t grid must reach r_max so the inverse can integrate up to the largest radius
    tr.n_t = static_cast<int>(std::ceil(geom.r_max() / dt - 1e-9)) + 1;
    tr.values.assign(static_cast<size_t>(geom.n_phi) * tr.n_t, 0.0);

    const double c = 1.0 / (4.0 * kPi * kPi);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < geom.n_phi; ++i) {
        std::span<const double> g(sino.values.data() + static_cast<size_t>(i) * geom.n_r,
                                  geom.n_r);
        std::vector<double> A(tr.n_t, 0.0);
        for (int k = 1; k < tr.n_t; ++k)
            A[k] = abel_weighted_integral(g, geom.r_max(), k * dt);
        double* u = tr.values.data() + static_cast<size_t>(i) * tr.n_t;
        for (int k = 1; k < tr.n_t - 1; ++k) u[k] = c * (A[k + 1] - A[k - 1]) / (2.0 * dt);
        u[0] = 0.0;  // no signal before any circle is reached
        u[tr.n_t - 1] = c * (3.0 * A[tr.n_t - 1] - 4.0 * A[tr.n_t - 2] + A[tr.n_t - 3]) / (2.0 * dt);
    }
    return tr;
}

Sinogram abel_inverse(const TransducerTraces& traces, const AcquisitionGeometry& geom) {
    geom.validate();
    const double t_max = (traces.n_t - 1) * traces.dt;
    if (t_max < geom.r_max() * (1.0 - 1e-9))
        throw ConfigError("abel_inverse: traces do not cover [0, r_max]");

    Sinogram sino;
    sino.geom = geom;
    sino.values.assign(static_cast<size_t>(geom.n_phi) * geom.n_r, 0.0);
    const double cal = abel_pair_gain();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < geom.n_phi; ++i) {
        std::span<const double> u(traces.values.data() + static_cast<size_t>(i) * traces.n_t,
                                  traces.n_t);
        double* g = sino.values.data() + static_cast<size_t>(i) * geom.n_r;
        for (int j = 1; j < geom.n_r; ++j) {
            const double r = j * geom.dr();
            g[j] = cal * 4.0 * r / (2.0 * kPi) * abel_weighted_integral(u, t_max, r);
        }
    }
    return sino;
}

InvertResult ivpa_reconstruct(const TransducerTraces& traces, const InvertParams& params,
                              int n_img, double half_width) {
    const Sinogram sino = abel_inverse(traces, traces.geom);
    return invert(sino, params, n_img, half_width);
}

}  // namespace ivt
