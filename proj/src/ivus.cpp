#include "ivt/ivus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>

#include "ivt/io.hpp"
#include "ivt/specfun.hpp"

namespace ivt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFourPi2 = 4.0 * kPi * kPi;

struct GaussRule {
    std::vector<double> x, w;
};

// Fixed rule on phi in [0, pi/2] for the eta = sin(phi) substitution that
// removes the arcsin endpoint kink.
const GaussRule& phi_rule() {
    static const GaussRule rule = [] {
        GaussRule r;
        gauss_legendre(48, 0.0, 0.5 * kPi, r.x, r.w);
        return r;
    }();
    return rule;
}

// I(r,s)    = int_0^1 eta arcsin(eta) D^{-3/2} d eta
// dI/ds     = -(3/2) int_0^1 eta arcsin(eta) [ (s/2+r) - (s/2-r) eta^2 ] D^{-5/2} d eta
// with D = (s/2+r)^2 - (s/2-r)^2 eta^2, evaluated together.
void eta_integrals(double r, double s, double& I, double& dI_ds) {
    const double p = 0.5 * s + r;
    const double q = 0.5 * s - r;
    const auto& rule = phi_rule();
    double acc0 = 0.0, acc1 = 0.0;
    for (size_t k = 0; k < rule.x.size(); ++k) {
        const double phi = rule.x[k];
        const double eta = std::sin(phi);
        const double base = eta * phi * std::cos(phi);  // eta * arcsin(eta) * d eta
        const double D = p * p - q * q * eta * eta;
        const double D12 = std::sqrt(D);
        const double D32 = D * D12;
        acc0 += rule.w[k] * base / D32;
        acc1 += rule.w[k] * base * (p - q * eta * eta) / (D32 * D);
    }
    I = acc0;
    dI_ds = -1.5 * acc1;
}

}  // namespace

double kernel_K(double r, double s) {
    if (r <= 0.0) throw ConfigError("kernel_K: r must be > 0");
    if (s <= 2.0 * r) return 0.0;
    double I, dI;
    eta_integrals(r, s, I, dI);
    const double q = 0.5 * s - r;
    return (kPi / std::sqrt(2.0 * r * s) - 2.0 * q * q * I) / kFourPi2;
}

double kernel_K1_ds(double r, double s) {
    if (r <= 0.0) throw ConfigError("kernel_K1_ds: r must be > 0");
    if (s < 2.0 * r) return 0.0;
    if (s == 2.0 * r) return -kPi / (8.0 * r * r);  // continuity value
    double I, dI;
    eta_integrals(r, s, I, dI);
    const double q = 0.5 * s - r;
    return -kPi * r * std::pow(2.0 * r * s, -1.5) - 2.0 * q * I - 2.0 * q * q * dI;
}

KernelTable build_kernel_table(const std::vector<double>& r_grid,
                               const std::vector<double>& s_grid) {
    if (r_grid.size() < 2 || s_grid.size() < 2)
        throw ConfigError("build_kernel_table: grids too small");
    if (r_grid.front() <= 0.0) throw ConfigError("build_kernel_table: r grid must exclude 0");
    KernelTable t;
    t.r_grid = r_grid;
    t.s_grid = s_grid;
    const size_t nr = r_grid.size(), ns = s_grid.size();
    t.K1.assign(nr * ns, 0.0);
    t.dK1_ds.assign(nr * ns, 0.0);
    t.dk1_diag.resize(nr);
#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < static_cast<int>(nr); ++i) {
        const double r = r_grid[i];
        t.dk1_diag[i] = -kPi / (8.0 * r * r);
        for (size_t j = 0; j < ns; ++j) {
            const double s = s_grid[j];
            if (s <= 2.0 * r) continue;  // exact zeros below and on the jump
            const double q = 0.5 * s - r;
            double I, dI;
            eta_integrals(r, s, I, dI);
            t.K1[i * ns + j] = kPi / std::sqrt(2.0 * r * s) - kPi / (2.0 * r) - 2.0 * q * q * I;
            t.dK1_ds[i * ns + j] =
                -kPi * r * std::pow(2.0 * r * s, -1.5) - 2.0 * q * I - 2.0 * q * q * dI;
        }
    }
    return t;
}

KernelTable kernel_table_cached(const std::vector<double>& r_grid,
                                const std::vector<double>& s_grid,
                                const std::string& cache_dir) {
    // FNV-1a over the grid layout
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    mix(static_cast<double>(r_grid.size()));
    mix(static_cast<double>(s_grid.size()));
    mix(r_grid.front());
    mix(r_grid.back());
    mix(s_grid.front());
    mix(s_grid.back());

    std::filesystem::create_directories(cache_dir);
    const std::string base = cache_dir + "/kernel_" + std::to_string(h) + ".bin";
    if (std::filesystem::exists(base) && std::filesystem::exists(base + ".json")) {
        const auto loaded = load_array(base);
        const size_t nr = r_grid.size(), ns = s_grid.size();
        if (loaded.shape == std::vector<size_t>{2 * nr * ns + nr}) {
            KernelTable t;
            t.r_grid = r_grid;
            t.s_grid = s_grid;
            auto it = loaded.real_data.begin();
            t.K1.assign(it, it + nr * ns);
            t.dK1_ds.assign(it + nr * ns, it + 2 * nr * ns);
            t.dk1_diag.assign(it + 2 * nr * ns, loaded.real_data.end());
            return t;
        }
    }
    KernelTable t = build_kernel_table(r_grid, s_grid);
    std::vector<double> flat;
    flat.reserve(t.K1.size() + t.dK1_ds.size() + t.dk1_diag.size());
    flat.insert(flat.end(), t.K1.begin(), t.K1.end());
    flat.insert(flat.end(), t.dK1_ds.begin(), t.dK1_ds.end());
    flat.insert(flat.end(), t.dk1_diag.begin(), t.dk1_diag.end());
    save_array(base, flat, {flat.size()},
               {{"kind", "ivus kernel table"},
                {"n_r", std::to_string(t.r_grid.size())},
                {"n_s", std::to_string(t.s_grid.size())},
                {"r_max", std::to_string(t.r_grid.back())}});
    return t;
}

double volterra_jump_coefficient() {
    // int r M(r) (1/8 pi r) delta(s - 2r) dr = M(s/2) / (16 pi)
    return 1.0 / (16.0 * kPi);
}

namespace {

// Quadrature of (1/4pi^2) int_0^{s_j/2} r M(r) dK1/ds(r, s_j) dr on the
// table grids (s_j = 2 r_j). Trapezoid with the continuity value at the
// moving endpoint r = s_j/2; include_diag = false drops the endpoint term
// (the triangular solve moves it onto the diagonal).
double volterra_row_integral(const KernelTable& t, const std::vector<double>& M, int j,
                             bool include_diag) {
    const double dr = t.r_grid.size() > 1 ? t.r_grid[1] - t.r_grid[0] : 0.0;
    double acc = 0.0;
    for (int i = 0; i < j; ++i) acc += t.r_grid[i] * M[i] * t.dk1(i, j);
    acc *= dr;  // interior nodes; the r = 0 endpoint vanishes with the factor r
    if (include_diag) acc += 0.5 * dr * t.r_grid[j] * M[j] * t.dk1_diag[j];
    return acc / kFourPi2;
}

void check_grids(const MeasurementW& W, const KernelTable& t) {
    if (W.s_grid.size() != t.s_grid.size() || W.values.size() != t.s_grid.size())
        throw ConfigError("volterra: measurement grid does not match the kernel table");
    if (std::abs(W.s_grid.front() - t.s_grid.front()) > 1e-12 ||
        std::abs(W.s_grid.back() - t.s_grid.back()) > 1e-12)
        throw ConfigError("volterra: measurement grid does not match the kernel table");
}

}  // namespace

MeasurementW volterra_forward(const std::vector<double>& M, const KernelTable& table) {
    if (M.size() != table.r_grid.size())
        throw ConfigError("volterra_forward: M must live on the table r grid");
    MeasurementW W;
    W.s_grid = table.s_grid;
    W.values.assign(table.s_grid.size(), 0.0);
    const double c = volterra_jump_coefficient();
    for (size_t j = 0; j < table.s_grid.size(); ++j)
        W.values[j] = c * M[j] + volterra_row_integral(table, M, static_cast<int>(j), true);
    return W;
}

std::vector<double> solve_volterra_iter(const MeasurementW& W, const KernelTable& table,
                                        int max_iter, double tol,
                                        std::vector<double>* residual_log) {
    check_grids(W, table);
    const size_t n = table.r_grid.size();
    const double c = volterra_jump_coefficient();
    std::vector<double> M(n, 0.0), next(n, 0.0);
    double prev_change = std::numeric_limits<double>::max();
    int growing = 0;
    for (int it = 0; it < max_iter; ++it) {
        for (size_t j = 0; j < n; ++j)
            next[j] = (W.values[j] - volterra_row_integral(table, M, static_cast<int>(j), true)) / c;
        double diff2 = 0.0, norm2 = 0.0;
        for (size_t j = 0; j < n; ++j) {
            const double d = next[j] - M[j];
            diff2 += d * d;
            norm2 += next[j] * next[j];
        }
        M.swap(next);
        const double change = std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-300);
        if (residual_log) residual_log->push_back(change);
        if (change < tol) return M;
        if (change > prev_change) {
            if (++growing >= 5) throw NumericError("solve_volterra_iter: diverging iteration");
        } else {
            growing = 0;
        }
        prev_change = change;
    }
    return M;
}

std::vector<double> solve_volterra_triangular(const MeasurementW& W, const KernelTable& table) {
    check_grids(W, table);
    const size_t n = table.r_grid.size();
    const double dr = table.r_grid[1] - table.r_grid[0];
    const double c = volterra_jump_coefficient();
    std::vector<double> M(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
        const double off = volterra_row_integral(table, M, static_cast<int>(j), false);
        const double diag = c + 0.5 * dr * table.r_grid[j] * table.dk1_diag[j] / kFourPi2;
        M[j] = (W.values[j] - off) / diag;
    }
    return M;
}

void volterra_grids(const AcquisitionGeometry& geom, std::vector<double>& r_grid,
                    std::vector<double>& s_grid) {
    r_grid.resize(geom.n_r - 1);
    s_grid.resize(geom.n_r - 1);
    for (int j = 1; j < geom.n_r; ++j) {
        r_grid[j - 1] = j * geom.dr();
        s_grid[j - 1] = 2.0 * j * geom.dr();
    }
}

InvertResult ivus_reconstruct(const std::vector<MeasurementW>& data,
                              const AcquisitionGeometry& geom, const KernelTable& table,
                              const InvertParams& params, int n_img, double half_width) {
    geom.validate();
    if (static_cast<int>(data.size()) != geom.n_phi)
        throw ConfigError("ivus_reconstruct: need one measurement per transducer");
    if (table.r_grid.size() != static_cast<size_t>(geom.n_r) - 1)
        throw ConfigError("ivus_reconstruct: kernel table does not match the geometry radii");

    Sinogram sino;
    sino.geom = geom;
    sino.values.assign(static_cast<size_t>(geom.n_phi) * geom.n_r, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < geom.n_phi; ++i) {
        const std::vector<double> M = solve_volterra_triangular(data[i], table);
        double* row = sino.values.data() + static_cast<size_t>(i) * geom.n_r;
        row[0] = 0.0;
        for (int j = 1; j < geom.n_r; ++j) row[j] = table.r_grid[j - 1] * M[j - 1];
    }
    return invert(sino, params, n_img, half_width);
}

}  // namespace ivt
