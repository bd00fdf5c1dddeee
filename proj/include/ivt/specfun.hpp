#ifndef IVT_SPECFUN_HPP
#define IVT_SPECFUN_HPP

#include <complex>
#include <span>
#include <vector>

namespace ivt {

using Complex = std::complex<double>;

// Quadrature contour [0, i*a] followed by [i*a, i*a + M] in the upper half
// plane. Nodes are listed in integration order; the junction i*a appears once
// per segment. Weights are complex line elements, so sum(weights) == i*a + M.
struct Contour {
    double a = 0.0;
    double M = 0.0;
    int n_vertical = 0;    // nodes on [0, i*a]
    int n_horizontal = 0;  // nodes on [i*a, i*a + M]
    std::vector<Complex> nodes;
    std::vector<Complex> weights;

    int size() const { return static_cast<int>(nodes.size()); }
};

// Bessel function of the first kind, integer order n >= 0, complex argument.
// Accurate on the horizontal strip |Im z| of a few units used by the contour
// method; relative error <= ~1e-12 for |z| <= 50 and <= ~1e-9 far beyond.
Complex bessel_j(int n, Complex z);

// All orders 0..n_max at once (one downward/upward recurrence sweep).
// out must have n_max + 1 entries.
void bessel_jn(int n_max, Complex z, std::span<Complex> out);

// Discretize the contour with trapezoid weights carrying Gregory endpoint
// corrections (exact for quadratics once a segment has >= 6 nodes).
Contour build_contour(double a, double M, int n_vertical, int n_horizontal);

// Weakly singular integral I = int_0^r h(t) / sqrt(r^2 - t^2) dt for h given
// as uniform samples on [0, grid_max]; h is interpolated linearly. Uses the
// substitution t = r sin(theta), which removes the endpoint singularity.
double abel_weighted_integral(std::span<const double> h, double grid_max, double r);

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

}  // namespace ivt

#endif
