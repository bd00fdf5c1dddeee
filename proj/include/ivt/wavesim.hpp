#ifndef IVT_WAVESIM_HPP
#define IVT_WAVESIM_HPP

#include <vector>

#include "ivt/cmt.hpp"
#include "ivt/grid.hpp"
#include "ivt/ivus.hpp"

namespace ivt {

// Sound-speed perturbation on the simulation grid: c^2 = 1 + m.
struct SpeedField {
    ImageGrid m;

    double max_abs_m() const;
    void validate() const;  // Born regime guard |m| < 0.2
};

struct SimConfig {
    double dt = 0.0;             // 0 = auto: cfl * dx / (sqrt(2) c_max)
    double cfl = 0.7;            // fraction of the stability limit
    double record_time = 0.0;    // trace length in time units
    double source_width = 0.0;   // temporal width of the excitation; 0 = 6 dt
    int sponge_width = 24;       // absorbing layer, cells
    double sponge_strength = 0.018;
};

struct Trace {
    double dt = 0.0;
    std::vector<double> values;  // sample k is at t = k dt
};

// Fill the auto fields (dt, source_width) and check the CFL bound and the
// sponge width against the field.
SimConfig resolve_sim_config(const SimConfig& cfg, const SpeedField& field);

// Centroid of the excitation pulse; the delta-limit model places the
// impulse there, so measurement readout shifts time by this amount.
double source_centroid(const SimConfig& resolved);

// Two leapfrog runs (c^2 = 1 + m and c^2 = 1) with identical source
// injection; returns the difference sampled at the source position.
Trace simulate_difference(const SpeedField& field, double sx, double sy, const SimConfig& cfg);

// Homogeneous run only, recorded at an arbitrary probe (oracle support).
Trace simulate_homogeneous(int n_grid, double half_width, double sx, double sy, double px,
                           double py, const SimConfig& cfg);

// Discrete leapfrog energy of a homogeneous run after each step.
std::vector<double> homogeneous_energy(int n_grid, double half_width, double sx, double sy,
                                       const SimConfig& cfg);

// Cumulative trapezoid of a trace; W(0) = 0, s grid = the trace's t grid.
MeasurementW integrate_trace(const Trace& w);

// simulate_difference + integrate_trace for every transducer of the geometry.
std::vector<MeasurementW> acquire_all(const SpeedField& field, const AcquisitionGeometry& geom,
                                      const SimConfig& cfg);

// Linear resampling of W onto a new s grid, reading W(s + shift); zero
// outside the measured window.
MeasurementW resample_measurement(const MeasurementW& w, const std::vector<double>& s_grid,
                                  double shift);

namespace ref {
// Serial source loop (the OpenMP driver maps over sources).
std::vector<MeasurementW> acquire_all(const SpeedField& field, const AcquisitionGeometry& geom,
                                      const SimConfig& cfg);
}  // namespace ref

}  // namespace ivt

#endif
