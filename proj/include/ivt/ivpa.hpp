#ifndef IVT_IVPA_HPP
#define IVT_IVPA_HPP

#include "ivt/cmt.hpp"
#include "ivt/grid.hpp"

namespace ivt {

// Pressure time series per transducer (sound speed 1, so t covers [0, r_max]).
struct TransducerTraces {
    AcquisitionGeometry geom;
    double dt = 0.0;
    int n_t = 0;
    std::vector<double> values;  // n_phi x n_t

    double& at(int i, int k) { return values[static_cast<size_t>(i) * n_t + k]; }
    double at(int i, int k) const { return values[static_cast<size_t>(i) * n_t + k]; }
};

// Trace model u(t,z) = (1/2pi) d/dt int_0^t g(z,r) / (2 pi sqrt(t^2 - r^2)) dr,
// evaluated as printed; the inverse carries the round-trip calibration
// constant below.
TransducerTraces abel_forward(const Sinogram& sino, double dt);

// g(z,r) = cal * 4 r int_0^r u(t,z) / (2 pi sqrt(r^2 - t^2)) dt on the
// geometry's radii grid.
Sinogram abel_inverse(const TransducerTraces& traces, const AcquisitionGeometry& geom);

// The printed transform pair loses a constant factor per round trip; the
// inverse is calibrated against the forward map so that inverse(forward(g))
// returns g. The calibration is verified empirically by abel_pair_gain_check.
double abel_pair_gain();

// Measured round-trip gain of the *uncalibrated* printed pair on a smooth
// reference profile at the given resolution (used by tests).
double abel_pair_gain_check(int n_r);

// abel_inverse followed by cmt::invert.
InvertResult ivpa_reconstruct(const TransducerTraces& traces, const InvertParams& params,
                              int n_img, double half_width);

}  // namespace ivt

#endif
