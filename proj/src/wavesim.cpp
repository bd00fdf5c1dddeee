#include "ivt/wavesim.hpp"

#include <algorithm>
#include <cmath>

namespace ivt {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Smooth compactly supported bump on [0, width] with unit time integral.
// All derivatives vanish at the endpoints, so the injected spectrum decays
// faster than any power and the front stays clean on the grid.
double pulse(double t, double width) {
    if (t <= 0.0 || t >= width) return 0.0;
    const double u = t / width;
    // 1 / int_0^1 exp(-1/(u(1-u))) du
    const double norm = 142.250375777095868;
    return norm / width * std::exp(-1.0 / (u * (1.0 - u)));
}

struct BilinearStencil {
    int ix = 0, iy = 0;
    double w00 = 0, w10 = 0, w01 = 0, w11 = 0;
};

BilinearStencil locate(const ImageGrid& g, double x, double y) {
    const double h = g.dx();
    const double fx = (x + g.half_width) / h - 0.5;
    const double fy = (y + g.half_width) / h - 0.5;
    BilinearStencil s;
    s.ix = static_cast<int>(std::floor(fx));
    s.iy = static_cast<int>(std::floor(fy));
    if (s.ix < 1 || s.iy < 1 || s.ix > g.n - 3 || s.iy > g.n - 3)
        throw ConfigError("wavesim: source/probe too close to the boundary");
    const double tx = fx - s.ix, ty = fy - s.iy;
    s.w00 = (1.0 - tx) * (1.0 - ty);
    s.w10 = tx * (1.0 - ty);
    s.w01 = (1.0 - tx) * ty;
    s.w11 = tx * ty;
    return s;
}

struct Stepper {
    int n;
    double dx, dt;
    const std::vector<double>* c2;  // null = homogeneous
    std::vector<double> damp;
    std::vector<double> u_prev, u_cur, u_next;

    Stepper(int n_, double dx_, double dt_, const std::vector<double>* c2_, int sponge_width,
            double sponge_strength)
        : n(n_), dx(dx_), dt(dt_), c2(c2_) {
        u_prev.assign(static_cast<size_t>(n) * n, 0.0);
        u_cur = u_prev;
        u_next = u_prev;
        damp.assign(static_cast<size_t>(n) * n, 1.0);
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                const int d = std::min(std::min(ix, n - 1 - ix), std::min(iy, n - 1 - iy));
                if (d < sponge_width) {
                    const double a = sponge_strength * (sponge_width - d);
                    damp[static_cast<size_t>(iy) * n + ix] = std::exp(-a * a);
                }
            }
    }

    void step(const BilinearStencil& src, double amp) {
        const double r = dt * dt / (dx * dx);
#pragma omp parallel for schedule(static)
        for (int iy = 1; iy < n - 1; ++iy) {
            const size_t row = static_cast<size_t>(iy) * n;
            for (int ix = 1; ix < n - 1; ++ix) {
                const size_t k = row + ix;
                const double lap =
                    u_cur[k + 1] + u_cur[k - 1] + u_cur[k + n] + u_cur[k - n] - 4.0 * u_cur[k];
                const double cc = c2 ? (*c2)[k] : 1.0;
                u_next[k] = 2.0 * u_cur[k] - u_prev[k] + r * cc * lap;
            }
        }
        // soft source: discrete delta spread over the four enclosing cells
        const double inj = dt * dt / (dx * dx) * amp;
        u_next[static_cast<size_t>(src.iy) * n + src.ix] += inj * src.w00;
        u_next[static_cast<size_t>(src.iy) * n + src.ix + 1] += inj * src.w10;
        u_next[static_cast<size_t>(src.iy + 1) * n + src.ix] += inj * src.w01;
        u_next[static_cast<size_t>(src.iy + 1) * n + src.ix + 1] += inj * src.w11;
#pragma omp parallel for schedule(static)
        for (int iy = 0; iy < n; ++iy) {
            const size_t row = static_cast<size_t>(iy) * n;
            for (int ix = 0; ix < n; ++ix) {
                u_next[row + ix] *= damp[row + ix];
                u_cur[row + ix] *= damp[row + ix];
            }
        }
        std::swap(u_prev, u_cur);
        std::swap(u_cur, u_next);
    }

    double sample(const BilinearStencil& p) const {
        const size_t k = static_cast<size_t>(p.iy) * n + p.ix;
        return p.w00 * u_cur[k] + p.w10 * u_cur[k + 1] + p.w01 * u_cur[k + n] +
               p.w11 * u_cur[k + n + 1];
    }
};

void check_nan(const std::vector<double>& u, int stride) {
    for (size_t k = 0; k < u.size(); k += stride)
        if (!std::isfinite(u[k])) throw NumericError("wavesim: field went unstable (NaN)");
}

}  // namespace

double SpeedField::max_abs_m() const {
    double v = 0.0;
    for (double x : m.values) v = std::max(v, std::abs(x));
    return v;
}

void SpeedField::validate() const {
    if (max_abs_m() >= 0.2) throw ConfigError("SpeedField: |m| must stay below 0.2 (Born regime)");
}

SimConfig resolve_sim_config(const SimConfig& cfg, const SpeedField& field) {
    field.validate();
    SimConfig r = cfg;
    const double dx = field.m.dx();
    const double c_max = std::sqrt(1.0 + field.max_abs_m());
    const double limit = dx / (std::sqrt(2.0) * c_max);
    if (r.dt <= 0.0) {
        if (!(r.cfl > 0.0 && r.cfl <= 1.0)) throw ConfigError("wavesim: cfl must be in (0, 1]");
        r.dt = r.cfl * limit;
    }
    if (r.dt > limit * (1.0 + 1e-12)) throw ConfigError("wavesim: CFL violation, dt too large");
    if (r.source_width <= 0.0) r.source_width = 6.0 * r.dt;
    if (r.sponge_width < 16) throw ConfigError("wavesim: sponge_width must be >= 16");
    if (r.record_time <= 0.0) throw ConfigError("wavesim: record_time must be > 0");
    if (2 * r.sponge_width >= field.m.n) throw ConfigError("wavesim: sponge swallows the grid");
    return r;
}

double source_centroid(const SimConfig& resolved) { return 0.5 * resolved.source_width; }

Trace simulate_difference(const SpeedField& field, double sx, double sy, const SimConfig& cfg0) {
    const SimConfig cfg = resolve_sim_config(cfg0, field);
    const int n = field.m.n;
    const double dx = field.m.dx();
    const int n_steps = static_cast<int>(std::ceil(cfg.record_time / cfg.dt));

    std::vector<double> c2(field.m.values.size());
    for (size_t k = 0; k < c2.size(); ++k) c2[k] = 1.0 + field.m.values[k];

    const BilinearStencil src = locate(field.m, sx, sy);
    Stepper exc(n, dx, cfg.dt, &c2, cfg.sponge_width, cfg.sponge_strength);
    Stepper homo(n, dx, cfg.dt, nullptr, cfg.sponge_width, cfg.sponge_strength);

    Trace w;
    w.dt = cfg.dt;
    w.values.assign(n_steps + 1, 0.0);
    for (int k = 0; k < n_steps; ++k) {
        const double amp = pulse(k * cfg.dt, cfg.source_width);
        exc.step(src, amp);
        homo.step(src, amp);
        w.values[k + 1] = exc.sample(src) - homo.sample(src);
        if ((k & 63) == 0) check_nan(exc.u_cur, 97);
    }
    return w;
}

Trace simulate_homogeneous(int n_grid, double half_width, double sx, double sy, double px,
                           double py, const SimConfig& cfg0) {
    SpeedField empty{ImageGrid(n_grid, half_width)};
    const SimConfig cfg = resolve_sim_config(cfg0, empty);
    const int n_steps = static_cast<int>(std::ceil(cfg.record_time / cfg.dt));
    const BilinearStencil src = locate(empty.m, sx, sy);
    const BilinearStencil probe = locate(empty.m, px, py);
    Stepper homo(n_grid, empty.m.dx(), cfg.dt, nullptr, cfg.sponge_width, cfg.sponge_strength);
    Trace u;
    u.dt = cfg.dt;
    u.values.assign(n_steps + 1, 0.0);
    for (int k = 0; k < n_steps; ++k) {
        homo.step(src, pulse(k * cfg.dt, cfg.source_width));
        u.values[k + 1] = homo.sample(probe);
    }
    return u;
}

std::vector<double> homogeneous_energy(int n_grid, double half_width, double sx, double sy,
                                       const SimConfig& cfg0) {
    SpeedField empty{ImageGrid(n_grid, half_width)};
    const SimConfig cfg = resolve_sim_config(cfg0, empty);
    const int n_steps = static_cast<int>(std::ceil(cfg.record_time / cfg.dt));
    const BilinearStencil src = locate(empty.m, sx, sy);
    const double dx = empty.m.dx();
    Stepper p(n_grid, dx, cfg.dt, nullptr, cfg.sponge_width, cfg.sponge_strength);
    std::vector<double> energy;
    energy.reserve(n_steps);
    const int n = n_grid;
    for (int k = 0; k < n_steps; ++k) {
        p.step(src, pulse(k * cfg.dt, cfg.source_width));
        // leapfrog invariant: kinetic + symmetric gradient cross term
        double kin = 0.0, grad = 0.0;
        for (int iy = 0; iy < n; ++iy) {
            const size_t row = static_cast<size_t>(iy) * n;
            for (int ix = 0; ix < n; ++ix) {
                const size_t q = row + ix;
                const double v = (p.u_cur[q] - p.u_prev[q]) / cfg.dt;
                kin += v * v;
                if (ix + 1 < n)
                    grad += (p.u_cur[q + 1] - p.u_cur[q]) * (p.u_prev[q + 1] - p.u_prev[q]);
                if (iy + 1 < n)
                    grad += (p.u_cur[q + n] - p.u_cur[q]) * (p.u_prev[q + n] - p.u_prev[q]);
            }
        }
        energy.push_back(0.5 * (kin + grad / (dx * dx)) * dx * dx);
    }
    return energy;
}

MeasurementW integrate_trace(const Trace& w) {
    if (w.dt <= 0.0) throw ConfigError("integrate_trace: dt must be > 0");
    MeasurementW out;
    out.s_grid.resize(w.values.size());
    out.values.resize(w.values.size());
    double acc = 0.0;
    out.s_grid[0] = 0.0;
    out.values[0] = 0.0;
    for (size_t k = 1; k < w.values.size(); ++k) {
        acc += 0.5 * (w.values[k - 1] + w.values[k]) * w.dt;
        out.s_grid[k] = k * w.dt;
        out.values[k] = acc;
    }
    return out;
}

MeasurementW resample_measurement(const MeasurementW& w, const std::vector<double>& s_grid,
                                  double shift) {
    MeasurementW out;
    out.s_grid = s_grid;
    out.values.assign(s_grid.size(), 0.0);
    const size_t n = w.s_grid.size();
    const double s0 = w.s_grid.front();
    const double ds = n > 1 ? (w.s_grid.back() - s0) / (n - 1) : 1.0;
    for (size_t j = 0; j < s_grid.size(); ++j) {
        const double s = s_grid[j] + shift;
        const double f = (s - s0) / ds;
        if (f <= 0.0 || f >= static_cast<double>(n - 1)) continue;
        const size_t i = static_cast<size_t>(f);
        const double t = f - i;
        out.values[j] = (1.0 - t) * w.values[i] + t * w.values[i + 1];
    }
    return out;
}

std::vector<MeasurementW> acquire_all(const SpeedField& field, const AcquisitionGeometry& geom,
                                      const SimConfig& cfg) {
    geom.validate();
    std::vector<MeasurementW> out(geom.n_phi);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < geom.n_phi; ++i) {
        const double phi = geom.phi(i);
        const Trace w = simulate_difference(field, geom.R0 * std::cos(phi),
                                            geom.R0 * std::sin(phi), cfg);
        out[i] = integrate_trace(w);
    }
    return out;
}

namespace ref {
std::vector<MeasurementW> acquire_all(const SpeedField& field, const AcquisitionGeometry& geom,
                                      const SimConfig& cfg) {
    geom.validate();
    std::vector<MeasurementW> out(geom.n_phi);
    for (int i = 0; i < geom.n_phi; ++i) {
        const double phi = geom.phi(i);
        const Trace w = simulate_difference(field, geom.R0 * std::cos(phi),
                                            geom.R0 * std::sin(phi), cfg);
        out[i] = integrate_trace(w);
    }
    return out;
}
}  // namespace ref

}  // namespace ivt
