#ifndef IVT_REFERENCE_HPP
#define IVT_REFERENCE_HPP

#include "ivt/cmt.hpp"

namespace ivt::ref {

// Serial drivers for the OpenMP kernels. They run the identical per-item
// arithmetic in a plain loop and must produce bit-identical results; the
// tests assert that and the benchmark compares the timings.

Sinogram forward_cmt(const ImageGrid& f, const AcquisitionGeometry& geom, int n_arc);
std::vector<Complex> hankel_data(const Sinogram& sino, const Contour& contour);
ModeProfiles inverse_contour(const SpectralCoefficients& fl, const std::vector<double>& radii);
AssembleResult assemble_image(const ModeProfiles& modes, int n, double half_width);

}  // namespace ivt::ref

#endif
