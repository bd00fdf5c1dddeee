#ifndef IVT_IO_HPP
#define IVT_IO_HPP

#include <map>
#include <string>
#include <vector>

#include "ivt/grid.hpp"
#include "ivt/specfun.hpp"

namespace ivt {

// Raw little-endian arrays with a JSON sidecar:
//   <path>      C row-major float64 ("f8") or interleaved re/im ("c16")
//   <path>.json {"shape": [...], "dtype": "f8"|"c16", "meta": {...}}
// meta values are stored as strings.
using MetaMap = std::map<std::string, std::string>;

void save_array(const std::string& path, const std::vector<double>& data,
                const std::vector<size_t>& shape, const MetaMap& meta = {});
void save_array(const std::string& path, const std::vector<Complex>& data,
                const std::vector<size_t>& shape, const MetaMap& meta = {});

struct LoadedArray {
    std::vector<size_t> shape;
    std::string dtype;  // "f8" or "c16"
    std::vector<double> real_data;
    std::vector<Complex> complex_data;
    MetaMap meta;
};

LoadedArray load_array(const std::string& path);

// 8-bit binary PGM with a fixed linear window [lo, hi]; values outside the
// window clamp to 0 / 255.
void render_pgm(const ImageGrid& img, const std::string& path, double lo, double hi);

}  // namespace ivt

#endif
