#ifndef IVT_GRID_HPP
#define IVT_GRID_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ivt {

// Thrown for invalid configuration / parameters (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a numerical guard trips (CLI exit code 3).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Square scalar field on [-half_width, half_width]^2, row-major, n x n.
// Pixel (ix, iy) is centered at x = -half_width + (ix + 0.5) * dx.
struct ImageGrid {
    int n = 0;
    double half_width = 0.0;
    std::vector<double> values;

    ImageGrid() = default;
    ImageGrid(int n_, double half_width_)
        : n(n_), half_width(half_width_), values(static_cast<size_t>(n_) * n_, 0.0) {
        if (n_ < 8) throw ConfigError("ImageGrid: n must be >= 8");
        if (half_width_ <= 0.0) throw ConfigError("ImageGrid: half_width must be > 0");
    }

    double dx() const { return 2.0 * half_width / n; }

    double& at(int ix, int iy) { return values[static_cast<size_t>(iy) * n + ix]; }
    double at(int ix, int iy) const { return values[static_cast<size_t>(iy) * n + ix]; }

    // Coordinate of a pixel center.
    double coord(int i) const { return -half_width + (i + 0.5) * dx(); }

    // Bilinear interpolation at (x, y); zero outside the grid.
    double sample(double x, double y) const {
        const double h = dx();
        const double fx = (x + half_width) / h - 0.5;
        const double fy = (y + half_width) / h - 0.5;
        const int ix = static_cast<int>(fx >= 0.0 ? fx : fx - 1.0);
        const int iy = static_cast<int>(fy >= 0.0 ? fy : fy - 1.0);
        const double tx = fx - ix;
        const double ty = fy - iy;
        auto pix = [&](int i, int j) -> double {
            if (i < 0 || j < 0 || i >= n || j >= n) return 0.0;
            return values[static_cast<size_t>(j) * n + i];
        };
        return (1.0 - tx) * (1.0 - ty) * pix(ix, iy) + tx * (1.0 - ty) * pix(ix + 1, iy) +
               (1.0 - tx) * ty * pix(ix, iy + 1) + tx * ty * pix(ix + 1, iy + 1);
    }
};

// Image comparison metrics.
struct Metrics {
    double rel_l2 = 0.0;
    double linf = 0.0;
    double ncc = 0.0;
};

}  // namespace ivt

#endif
