#include "ivt/reference.hpp"

#include <cmath>

#include "cmt_kernels.hpp"

namespace ivt::ref {

namespace {
constexpr double kPi = 3.14159265358979323846;
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
    for (int m = 0; m < n_nodes; ++m)
        kernels::hankel_weight_row(contour.nodes[m], radii,
                                   j0.data() + static_cast<size_t>(m) * geom.n_r);

    std::vector<double> wr(geom.n_r, geom.dr());
    wr.front() = wr.back() = 0.5 * geom.dr();

    std::vector<Complex> ghat(static_cast<size_t>(geom.n_phi) * n_nodes);
    for (int i = 0; i < geom.n_phi; ++i)
        kernels::hankel_data_row(sino.values.data() + static_cast<size_t>(i) * geom.n_r, j0, n_nodes,
                                 geom.n_r, wr, ghat.data() + static_cast<size_t>(i) * n_nodes);
    return ghat;
}

ModeProfiles inverse_contour(const SpectralCoefficients& fl, const std::vector<double>& radii) {
    ModeProfiles out;
    out.l_max = fl.l_max;
    out.radii = radii;
    out.values.assign(static_cast<size_t>(2 * fl.l_max + 1) * radii.size(), Complex(0.0, 0.0));

    const int n_nodes = fl.contour.size();
    std::vector<int> kept_order(n_nodes, -1);
    for (int m = 0; m < n_nodes; ++m) {
        for (int l = fl.l_max; l >= 0; --l) {
            if (fl.at(l, m) != Complex(0.0, 0.0) || fl.at(-l, m) != Complex(0.0, 0.0)) {
                kept_order[m] = l;
                break;
            }
        }
        if (fl.contour.nodes[m] == Complex(0.0, 0.0)) kept_order[m] = -1;
    }

    std::vector<Complex> work(static_cast<size_t>(fl.l_max) + 1);
    std::vector<Complex> col(static_cast<size_t>(2 * fl.l_max + 1));
    for (size_t p = 0; p < radii.size(); ++p) {
        kernels::inverse_contour_radius(fl, radii[p], kept_order, work, col.data());
        for (int l = -fl.l_max; l <= fl.l_max; ++l) out.at(l, static_cast<int>(p)) = col[l + fl.l_max];
    }
    return out;
}

AssembleResult assemble_image(const ModeProfiles& modes, int n, double half_width) {
    if (modes.radii.size() < 2) throw ConfigError("assemble_image: need at least two radii");
    AssembleResult res;
    res.image = ImageGrid(n, half_width);
    std::vector<double> im2(n, 0.0);
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

}  // namespace ivt::ref
