#include "ivt/cmt.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

#include "cmt_kernels.hpp"
#include "ivt/fft.hpp"

namespace ivt {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Exceptions must not cross an OpenMP region boundary; capture and rethrow.
struct ThreadError {
    std::exception_ptr eptr;
    std::mutex mu;

    template <typename F>
    void run(F&& f) noexcept {
        try {
            f();
        } catch (...) {
            const std::lock_guard<std::mutex> lock(mu);
            if (!eptr) eptr = std::current_exception();
        }
    }
    void rethrow() const {
        if (eptr) std::rethrow_exception(eptr);
    }
};
}  // namespace

double AcquisitionGeometry::phi(int i) const { return 2.0 * kPi * i / n_phi; }

void AcquisitionGeometry::validate() const {
    if (!(R0 > 0.0 && R1 > R0)) throw ConfigError("geometry: need 0 < R0 < R1");
    if (!is_pow2(n_phi)) throw ConfigError("geometry: n_phi must be a power of two");
    if (n_r < 8) throw ConfigError("geometry: n_r too small");
}

bool cone_keeps(int l, Complex lambda, double R0, double margin) {
    // The cone degenerates at l = 0: J_0(lambda R0) has no zero on the
    // contour (J_0(0) = 1, I_0 >= 1 on the vertical leg), so the mode is
    // kept everywhere and only |l| >= 1 is filtered.
    if (l == 0) return true;
    return std::abs(l) < R0 * lambda.real() * (1.0 - margin);
}

std::vector<double> radii_grid(const AcquisitionGeometry& geom) {
    std::vector<double> r(geom.n_r);
    for (int j = 0; j < geom.n_r; ++j) r[j] = j * geom.dr();
    return r;
}

Contour default_contour(const AcquisitionGeometry& geom, const InvertParams& params) {
    const double a = params.contour_a > 0.0 ? params.contour_a : 1.0 / geom.R1;
    const double M = params.contour_M > 0.0 ? params.contour_M : kPi * geom.n_r / geom.r_max();
    const int n_h = params.n_lambda > 0 ? params.n_lambda : 2 * geom.n_r;
    return build_contour(a, M, params.n_vertical, n_h);
}

Sinogram forward_cmt(const ImageGrid& f, const AcquisitionGeometry& geom, int n_arc) {
    geom.validate();
    if (n_arc < 16) throw ConfigError("forward_cmt: n_arc must be >= 16");
    std::vector<double> arc_cos(n_arc), arc_sin(n_arc);
    for (int k = 0; k < n_arc; ++k) {
        const double psi = 2.0 * kPi * k / n_arc;
        arc_cos[k] = std::cos(psi);
        arc_sin[k] = std::sin(psi);
    }
    Sinogram sino;
    sino.geom = geom;
    sino.values.assign(static_cast<size_t>(geom.n_phi) * geom.n_r, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < geom.n_phi; ++i)
        kernels::forward_cmt_row(f, geom, n_arc, i, arc_cos, arc_sin,
                                 sino.values.data() + static_cast<size_t>(i) * geom.n_r);
    return sino;
}

std::vector<Complex> hankel_data(const Sinogram& sino, const Contour& contour) {
    const auto& geom = sino.geom;
    const int n_nodes = contour.size();
    const auto radii = radii_grid(geom);

    std::vector<Complex> j0(static_cast<size_t>(n_nodes) * geom.n_r);
    ThreadError err;
#pragma omp parallel for schedule(dynamic, 8)
    for (int m = 0; m < n_nodes; ++m)
        err.run([&, m] {
            kernels::hankel_weight_row(contour.nodes[m], radii,
                                       j0.data() + static_cast<size_t>(m) * geom.n_r);
        });
    err.rethrow();

    std::vector<double> wr(geom.n_r, geom.dr());
    wr.front() = wr.back() = 0.5 * geom.dr();

    std::vector<Complex> ghat(static_cast<size_t>(geom.n_phi) * n_nodes);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < geom.n_phi; ++i)
        kernels::hankel_data_row(sino.values.data() + static_cast<size_t>(i) * geom.n_r, j0, n_nodes,
                                 geom.n_r, wr, ghat.data() + static_cast<size_t>(i) * n_nodes);
    return ghat;
}

SpectralCoefficients angular_fourier(const std::vector<Complex>& ghat, int n_phi,
                                     const Contour& contour) {
    if (!is_pow2(n_phi)) throw ConfigError("angular_fourier: n_phi must be a power of two");
    const int n_nodes = contour.size();
    if (ghat.size() != static_cast<size_t>(n_phi) * n_nodes)
        throw ConfigError("angular_fourier: data shape mismatch");
    SpectralCoefficients out;
    out.contour = contour;
    out.l_max = n_phi / 2 - 1;
    out.coeffs.assign(static_cast<size_t>(2 * out.l_max + 1) * n_nodes, Complex(0.0, 0.0));
#pragma omp parallel
    {
        std::vector<Complex> col(n_phi);
#pragma omp for schedule(static)
        for (int m = 0; m < n_nodes; ++m) {
            for (int i = 0; i < n_phi; ++i) col[i] = ghat[static_cast<size_t>(i) * n_nodes + m];
            fft(col);
            const double scale = 1.0 / n_phi;
            for (int l = -out.l_max; l <= out.l_max; ++l) {
                const int k = l >= 0 ? l : l + n_phi;
                out.at(l, m) = scale * col[k];
            }
        }
    }
    return out;
}

SpectralCoefficients spectral_divide_regularize(const SpectralCoefficients& gl,
                                                const AcquisitionGeometry& geom, double margin) {
    if (margin < 0.0 || margin >= 1.0) throw ConfigError("spectral_divide: margin must be in [0, 1)");
    const int n_nodes = gl.contour.size();
    SpectralCoefficients out;
    out.contour = gl.contour;
    out.l_max = gl.l_max;
    out.coeffs.assign(gl.coeffs.size(), Complex(0.0, 0.0));
    ThreadError err;
#pragma omp parallel
    {
        std::vector<Complex> jl(static_cast<size_t>(gl.l_max) + 1);
#pragma omp for schedule(dynamic, 8)
        for (int m = 0; m < n_nodes; ++m) {
            err.run([&, m] {
                const Complex lambda = gl.contour.nodes[m];
                bessel_jn(gl.l_max, lambda * geom.R0, jl);
                for (int l = -gl.l_max; l <= gl.l_max; ++l) {
                    if (!cone_keeps(l, lambda, geom.R0, margin)) continue;
                    const Complex den = jl[std::abs(l)];
                    if (std::abs(den) < 1e-13)
                        throw NumericError(
                            "spectral_divide: Bessel denominator below floor inside kept cone");
                    out.at(l, m) = gl.at(l, m) / (2.0 * kPi * den);
                }
            });
        }
    }
    err.rethrow();
    return out;
}

ModeProfiles inverse_contour(const SpectralCoefficients& fl, const std::vector<double>& radii) {
    ModeProfiles out;
    out.l_max = fl.l_max;
    out.radii = radii;
    out.values.assign(static_cast<size_t>(2 * fl.l_max + 1) * radii.size(), Complex(0.0, 0.0));

    // Highest mode with a nonzero coefficient per node; -1 skips the node.
    const int n_nodes = fl.contour.size();
    std::vector<int> kept_order(n_nodes, -1);
    for (int m = 0; m < n_nodes; ++m) {
        for (int l = fl.l_max; l >= 0; --l) {
            if (fl.at(l, m) != Complex(0.0, 0.0) || fl.at(-l, m) != Complex(0.0, 0.0)) {
                kept_order[m] = l;
                break;
            }
        }
        if (fl.contour.nodes[m] == Complex(0.0, 0.0)) kept_order[m] = -1;  // weightless node
    }

    const int n_rad = static_cast<int>(radii.size());
    ThreadError err;
#pragma omp parallel
    {
        std::vector<Complex> work(static_cast<size_t>(fl.l_max) + 1);
        std::vector<Complex> col(static_cast<size_t>(2 * fl.l_max + 1));
#pragma omp for schedule(dynamic, 4)
        for (int p = 0; p < n_rad; ++p) {
            err.run([&, p] {
                kernels::inverse_contour_radius(fl, radii[p], kept_order, work, col.data());
                for (int l = -fl.l_max; l <= fl.l_max; ++l) out.at(l, p) = col[l + fl.l_max];
            });
        }
    }
    err.rethrow();
    return out;
}

AssembleResult assemble_image(const ModeProfiles& modes, int n, double half_width) {
    if (modes.radii.size() < 2) throw ConfigError("assemble_image: need at least two radii");
    AssembleResult res;
    res.image = ImageGrid(n, half_width);
    std::vector<double> im2(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < n; ++iy)
        kernels::assemble_row(modes, n, half_width, iy,
                              res.image.values.data() + static_cast<size_t>(iy) * n, &im2[iy]);
    double real2 = 0.0, imag2 = 0.0;
    for (double v : res.image.values) real2 += v * v;
    for (double v : im2) imag2 += v;
    res.imag_ratio = real2 > 0.0 ? std::sqrt(imag2 / real2) : 0.0;
    res.imag_warning = res.imag_ratio > 0.10;
    return res;
}

InvertResult invert(const Sinogram& sino, const InvertParams& params, int n_img,
                    double half_width) {
    sino.geom.validate();
    const Contour contour = default_contour(sino.geom, params);
    const auto ghat = hankel_data(sino, contour);
    const auto gl = angular_fourier(ghat, sino.geom.n_phi, contour);
    auto fl = spectral_divide_regularize(gl, sino.geom, params.cone_margin);
    // profiles evaluated at twice the data density: the integrand is known in
    // closed form at any r, so only the final linear interpolation pays
    std::vector<double> radii(2 * sino.geom.n_r - 1);
    for (size_t p = 0; p < radii.size(); ++p) radii[p] = 0.5 * p * sino.geom.dr();
    const auto modes = inverse_contour(fl, radii);
    auto assembled = assemble_image(modes, n_img, half_width);
    InvertResult res;
    res.image = std::move(assembled.image);
    res.spectra = std::move(fl);
    res.imag_ratio = assembled.imag_ratio;
    res.imag_warning = assembled.imag_warning;
    return res;
}

}  // namespace ivt
