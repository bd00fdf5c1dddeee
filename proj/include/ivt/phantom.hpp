#ifndef IVT_PHANTOM_HPP
#define IVT_PHANTOM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ivt/grid.hpp"

namespace ivt {

// One smooth feature: a filled disk or an annulus (ring of given thickness
// whose outer edge is at `radius`). Edges are C^1 cosine ramps of width
// `smoothing_width`.
struct Feature {
    enum class Kind { Disk, Annulus };
    Kind kind = Kind::Disk;
    double cx = 0.0, cy = 0.0;
    double radius = 0.0;
    double thickness = 0.0;  // annulus only
    double amplitude = 1.0;
    double smoothing_width = 0.02;
};

struct PhantomSpec {
    std::vector<Feature> features;
    double support_radius = 1.5;  // all features must fit strictly inside
};

// Polar resampling of an image: samples[i_r * n_theta + i_theta].
struct PolarSamples {
    int n_r = 0;
    int n_theta = 0;
    double r_max = 0.0;
    std::vector<double> values;
};

// Pointwise feature sum evaluated analytically at (x, y).
double phantom_value(const PhantomSpec& spec, double x, double y);

// Rasterize the feature sum on an n x n grid over [-half_width, half_width]^2.
ImageGrid make_phantom(const PhantomSpec& spec, int n, double half_width);

// Bilinear resampling onto a polar grid r in [0, r_max], theta in [0, 2 pi).
PolarSamples cartesian_to_polar(const ImageGrid& img, int n_r, int n_theta, double r_max);

// Inverse resampling (bilinear in (r, theta)); used for round-trip checks.
ImageGrid polar_to_cartesian(const PolarSamples& polar, int n, double half_width);

// Add white Gaussian noise scaled so that ||noise||_2 = level * ||data||_2.
// Deterministic for a fixed seed. level 0 returns the input unchanged.
std::vector<double> add_noise(const std::vector<double>& data, double level, uint64_t seed);

// rel_l2 = ||rec - truth|| / ||truth||, linf = max abs deviation,
// ncc = centered cosine similarity.
Metrics compare(const ImageGrid& rec, const ImageGrid& truth);

// Like compare but restricted to pixels where mask != 0.
Metrics compare_masked(const ImageGrid& rec, const ImageGrid& truth, const ImageGrid& mask);

// Named phantom presets used by the experiment runner.
//   "interior"       disks clustered inside the transducer circle
//   "ext-int"        interior disks plus two concentric vessel-wall annuli
//   "ext-invisible"  ext-int plus small off-center exterior inclusions
PhantomSpec phantom_preset(const std::string& name);

// Parse a PhantomSpec from a JSON string: {"support_radius": ..,
//  "features": [{"kind": "disk"|"annulus", "center": [x, y], "radius": ..,
//                "thickness": .., "amplitude": .., "smoothing_width": ..}]}
PhantomSpec phantom_from_json(const std::string& json_text);

}  // namespace ivt

#endif
