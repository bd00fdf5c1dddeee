#ifndef IVT_CMT_HPP
#define IVT_CMT_HPP

#include <vector>

#include "ivt/grid.hpp"
#include "ivt/specfun.hpp"

namespace ivt {

// Transducers on the circle |z| = R0, image supported in |x| < R1.
// Integration-circle radii sample [0, R0 + R1] uniformly.
struct AcquisitionGeometry {
    double R0 = 0.5;
    double R1 = 1.5;
    int n_phi = 256;  // power of two
    int n_r = 401;

    double r_max() const { return R0 + R1; }
    double dr() const { return r_max() / (n_r - 1); }
    double phi(int i) const;
    void validate() const;
};

// g[i * n_r + j] = r_j * (arclength integral of f over the circle of radius
// r_j centered at transducer i).
struct Sinogram {
    AcquisitionGeometry geom;
    std::vector<double> values;

    double& at(int i, int j) { return values[static_cast<size_t>(i) * geom.n_r + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * geom.n_r + j]; }
};

// Angular-mode coefficients on the contour: row l + l_max, column = node.
struct SpectralCoefficients {
    Contour contour;
    int l_max = 0;
    std::vector<Complex> coeffs;

    Complex& at(int l, int j) {
        return coeffs[static_cast<size_t>(l + l_max) * contour.size() + j];
    }
    Complex at(int l, int j) const {
        return coeffs[static_cast<size_t>(l + l_max) * contour.size() + j];
    }
};

// Radial profiles of the angular modes of the reconstruction.
struct ModeProfiles {
    int l_max = 0;
    std::vector<double> radii;
    std::vector<Complex> values;

    Complex& at(int l, int p) {
        return values[static_cast<size_t>(l + l_max) * radii.size() + p];
    }
    Complex at(int l, int p) const {
        return values[static_cast<size_t>(l + l_max) * radii.size() + p];
    }
};

struct InvertParams {
    double contour_a = 0.0;   // 0 = auto: 1 / R1
    double contour_M = 0.0;   // 0 = auto: pi * n_r / r_max
    int n_lambda = 0;         // horizontal nodes; 0 = auto: 2 * n_r
    int n_vertical = 8;
    double cone_margin = 0.0; // widens the zeroed cone
};

struct AssembleResult {
    ImageGrid image;
    double imag_ratio = 0.0;  // ||imag|| / ||real|| before discarding
    bool imag_warning = false;
};

struct InvertResult {
    ImageGrid image;
    SpectralCoefficients spectra;  // regularized F_l on the contour
    double imag_ratio = 0.0;
    bool imag_warning = false;
};

// True when mode l survives regularization at contour node lambda.
bool cone_keeps(int l, Complex lambda, double R0, double margin);

// Discrete circular-integral transform: n_arc-point trapezoid per circle,
// bilinear sampling of f (zero outside its grid).
Sinogram forward_cmt(const ImageGrid& f, const AcquisitionGeometry& geom, int n_arc);

// ghat[i * n_nodes + m] = int_0^{r_max} J_0(lambda_m r) g(z_i, r) dr.
std::vector<Complex> hankel_data(const Sinogram& sino, const Contour& contour);

// Angular Fourier modes ghat_l(lambda_m), |l| <= n_phi/2 - 1.
SpectralCoefficients angular_fourier(const std::vector<Complex>& ghat, int n_phi,
                                     const Contour& contour);

// F_l = ghat_l / (2 pi J_|l|(lambda R0)) inside the visibility cone,
// exactly zero outside it.
SpectralCoefficients spectral_divide_regularize(const SpectralCoefficients& gl,
                                                const AcquisitionGeometry& geom, double margin);

// f_l(r) = int_C F_l(lambda) J_|l|(lambda r) lambda  dlambda.
ModeProfiles inverse_contour(const SpectralCoefficients& fl, const std::vector<double>& radii);

// f(r, theta) = sum_l f_l(r) e^{i l theta} on pixel centers; the imaginary
// residue is measured, then discarded.
AssembleResult assemble_image(const ModeProfiles& modes, int n, double half_width);

// Full pipeline on a measured sinogram.
InvertResult invert(const Sinogram& sino, const InvertParams& params, int n_img,
                    double half_width);

std::vector<double> radii_grid(const AcquisitionGeometry& geom);
Contour default_contour(const AcquisitionGeometry& geom, const InvertParams& params);

}  // namespace ivt

#endif
