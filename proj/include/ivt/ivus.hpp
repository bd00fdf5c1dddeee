#ifndef IVT_IVUS_HPP
#define IVT_IVUS_HPP

#include <string>
#include <vector>

#include "ivt/cmt.hpp"
#include "ivt/grid.hpp"

namespace ivt {

// Pulse-echo convolution kernel K(r,s) of the Born model. K vanishes for
// s <= 2r, jumps to (1/4pi^2) * pi/(2r) at s = 2r, and splits as
// 4 pi^2 K = (pi/2r) H(s - 2r) + K1 with K1 continuous through the jump.
double kernel_K(double r, double s);

// d K1 / ds, extended by continuity to s = 2r; zero for s < 2r.
double kernel_K1_ds(double r, double s);

// Tabulated kernels on uniform grids. Entries at s <= 2r are exact zeros;
// the continuity values d K1/ds (r, 2r) sit in dk1_diag.
struct KernelTable {
    std::vector<double> r_grid;  // uniform, excludes r = 0
    std::vector<double> s_grid;  // uniform, s_j = 2 r_j when built for a solve
    std::vector<double> K1;      // r_grid.size() x s_grid.size()
    std::vector<double> dK1_ds;
    std::vector<double> dk1_diag;

    double k1(int i, int j) const { return K1[static_cast<size_t>(i) * s_grid.size() + j]; }
    double dk1(int i, int j) const { return dK1_ds[static_cast<size_t>(i) * s_grid.size() + j]; }
};

KernelTable build_kernel_table(const std::vector<double>& r_grid,
                               const std::vector<double>& s_grid);

// Disk cache wrapper: loads a previously built table when the grids hash to
// the same key, otherwise builds and stores it.
KernelTable kernel_table_cached(const std::vector<double>& r_grid,
                                const std::vector<double>& s_grid,
                                const std::string& cache_dir);

// Integrated difference data of one transducer on the table's s grid.
struct MeasurementW {
    std::vector<double> s_grid;
    std::vector<double> values;
};

// Coefficient multiplying M(s/2) in the Volterra operator; produced by
// integrating the delta part of dK/ds against r M(r).
double volterra_jump_coefficient();

// W(s) = c_jump M(s/2) + (1/4pi^2) int_0^{s/2} r M(r) dK1/ds(r, s) dr.
MeasurementW volterra_forward(const std::vector<double>& M, const KernelTable& table);

// Successive approximations from M_0 = 0; throws NumericError on divergence.
std::vector<double> solve_volterra_iter(const MeasurementW& W, const KernelTable& table,
                                        int max_iter, double tol,
                                        std::vector<double>* residual_log = nullptr);

// Forward substitution on the lower-triangular discretization.
std::vector<double> solve_volterra_triangular(const MeasurementW& W, const KernelTable& table);

// Per-transducer Volterra solves, sinogram assembly g = r M_z(r), CMT
// inversion. One MeasurementW per transducer, all on the table's s grid.
InvertResult ivus_reconstruct(const std::vector<MeasurementW>& data,
                              const AcquisitionGeometry& geom, const KernelTable& table,
                              const InvertParams& params, int n_img, double half_width);

// Table grids matching an acquisition geometry: r = dr..r_max, s = 2r.
void volterra_grids(const AcquisitionGeometry& geom, std::vector<double>& r_grid,
                    std::vector<double>& s_grid);

}  // namespace ivt

#endif
