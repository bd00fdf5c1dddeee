// Per-item kernels shared by the OpenMP drivers (cmt.cpp) and the serial
// reference drivers (reference.cpp). Keeping one copy of the arithmetic makes
// the parallel/serial bit-identity contract hold by construction.
#ifndef IVT_CMT_KERNELS_HPP
#define IVT_CMT_KERNELS_HPP

#include <cmath>
#include <vector>

#include "ivt/cmt.hpp"
#include "ivt/grid.hpp"
#include "ivt/specfun.hpp"

namespace ivt::kernels {

// One sinogram row: all circle integrals for the transducer at angle phi_i.
inline void forward_cmt_row(const ImageGrid& f, const AcquisitionGeometry& geom, int n_arc,
                            int i, const std::vector<double>& arc_cos,
                            const std::vector<double>& arc_sin, double* row) {
    const double phi = geom.phi(i);
    const double zx = geom.R0 * std::cos(phi);
    const double zy = geom.R0 * std::sin(phi);
    const double dpsi = 2.0 * 3.14159265358979323846 / n_arc;
    row[0] = 0.0;
    for (int j = 1; j < geom.n_r; ++j) {
        const double r = j * geom.dr();
        double acc = 0.0;
        for (int k = 0; k < n_arc; ++k)
            acc += f.sample(zx + r * arc_cos[k], zy + r * arc_sin[k]);
        row[j] = r * acc * dpsi;
    }
}

// J_0(lambda_m r_j) for one contour node, all radii.
inline void hankel_weight_row(Complex lambda, const std::vector<double>& radii, Complex* row) {
    for (size_t j = 0; j < radii.size(); ++j) row[j] = bessel_j(0, lambda * radii[j]);
}

// Hankel transform of one trace against a precomputed J_0 table
// (j0 is n_nodes x n_r, row-major).
inline void hankel_data_row(const double* g_row, const std::vector<Complex>& j0, int n_nodes,
                            int n_r, const std::vector<double>& wr, Complex* out_row) {
    for (int m = 0; m < n_nodes; ++m) {
        Complex acc(0.0, 0.0);
        const Complex* jrow = j0.data() + static_cast<size_t>(m) * n_r;
        for (int j = 0; j < n_r; ++j) acc += wr[j] * jrow[j] * g_row[j];
        out_row[m] = acc;
    }
}

// Contribution of every contour node to all mode profiles at one radius.
// fl_col receives f_l(r_p) for l = -l_max .. l_max (index l + l_max).
inline void inverse_contour_radius(const SpectralCoefficients& fl, double r,
                                   const std::vector<int>& kept_order, std::vector<Complex>& work,
                                   Complex* fl_col) {
    const int l_max = fl.l_max;
    const int n_nodes = fl.contour.size();
    for (int l = -l_max; l <= l_max; ++l) fl_col[l + l_max] = Complex(0.0, 0.0);
    for (int m = 0; m < n_nodes; ++m) {
        const int top = kept_order[m];
        if (top < 0) continue;
        const Complex lambda = fl.contour.nodes[m];
        const Complex wl = fl.contour.weights[m] * lambda;
        bessel_jn(top, lambda * r, work);
        for (int l = -top; l <= top; ++l) {
            const Complex c = fl.at(l, m);
            if (c == Complex(0.0, 0.0)) continue;
            fl_col[l + l_max] += wl * c * work[std::abs(l)];
        }
    }
}

// One image row of the angular resynthesis f = sum_l f_l(r) e^{i l theta}.
inline void assemble_row(const ModeProfiles& modes, int n, double half_width, int iy,
                         double* out_real, double* out_im2) {
    const int l_max = modes.l_max;
    const int n_rad = static_cast<int>(modes.radii.size());
    const double r_last = modes.radii.back();
    const double drho = r_last / (n_rad - 1);
    const double h = 2.0 * half_width / n;
    const double y = -half_width + (iy + 0.5) * h;
    double im2 = 0.0;
    for (int ix = 0; ix < n; ++ix) {
        const double x = -half_width + (ix + 0.5) * h;
        const double r = std::hypot(x, y);
        if (r > r_last) {
            out_real[ix] = 0.0;
            continue;
        }
        const double fr = r / drho;
        const int p = std::min(static_cast<int>(fr), n_rad - 2);
        const double w = fr - p;
        const double theta = std::atan2(y, x);
        const Complex rot(std::cos(theta), std::sin(theta));
        Complex e_pos(1.0, 0.0);
        Complex acc = (1.0 - w) * modes.at(0, p) + w * modes.at(0, p + 1);
        for (int l = 1; l <= l_max; ++l) {
            e_pos *= rot;
            const Complex fp = (1.0 - w) * modes.at(l, p) + w * modes.at(l, p + 1);
            const Complex fm = (1.0 - w) * modes.at(-l, p) + w * modes.at(-l, p + 1);
            acc += fp * e_pos + fm * std::conj(e_pos);
        }
        out_real[ix] = acc.real();
        im2 += acc.imag() * acc.imag();
    }
    *out_im2 = im2;
}

}  // namespace ivt::kernels

#endif
