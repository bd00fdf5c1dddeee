#include "ivt/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "array files are little-endian; big-endian hosts are not supported");

namespace ivt {

namespace {

void write_sidecar(const std::string& path, const std::vector<size_t>& shape,
                   const std::string& dtype, const MetaMap& meta) {
    nlohmann::json j;
    j["shape"] = shape;
    j["dtype"] = dtype;
    j["meta"] = nlohmann::json::object();
    for (const auto& [k, v] : meta) j["meta"][k] = v;
    std::ofstream f(path + ".json");
    if (!f) throw ConfigError("cannot write sidecar: " + path + ".json");
    f << j.dump(2) << "\n";
}

size_t shape_size(const std::vector<size_t>& shape) {
    size_t n = 1;
    for (size_t s : shape) n *= s;
    return n;
}

void write_raw(const std::string& path, const void* data, size_t bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write array file: " + path);
    f.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!f) throw ConfigError("short write: " + path);
}

}  // namespace

void save_array(const std::string& path, const std::vector<double>& data,
                const std::vector<size_t>& shape, const MetaMap& meta) {
    if (shape_size(shape) != data.size()) throw ConfigError("save_array: shape does not match data");
    write_raw(path, data.data(), data.size() * sizeof(double));
    write_sidecar(path, shape, "f8", meta);
}

void save_array(const std::string& path, const std::vector<Complex>& data,
                const std::vector<size_t>& shape, const MetaMap& meta) {
    if (shape_size(shape) != data.size()) throw ConfigError("save_array: shape does not match data");
    write_raw(path, data.data(), data.size() * sizeof(Complex));
    write_sidecar(path, shape, "c16", meta);
}

LoadedArray load_array(const std::string& path) {
    std::ifstream sc(path + ".json");
    if (!sc) throw ConfigError("missing sidecar: " + path + ".json");
    nlohmann::json j;
    sc >> j;
    LoadedArray out;
    out.shape = j.at("shape").get<std::vector<size_t>>();
    out.dtype = j.at("dtype").get<std::string>();
    if (j.contains("meta"))
        for (auto& [k, v] : j["meta"].items()) out.meta[k] = v.get<std::string>();

    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("missing array file: " + path);
    const size_t n = shape_size(out.shape);
    if (out.dtype == "f8") {
        out.real_data.resize(n);
        f.read(reinterpret_cast<char*>(out.real_data.data()),
               static_cast<std::streamsize>(n * sizeof(double)));
    } else if (out.dtype == "c16") {
        out.complex_data.resize(n);
        f.read(reinterpret_cast<char*>(out.complex_data.data()),
               static_cast<std::streamsize>(n * sizeof(Complex)));
    } else {
        throw ConfigError("load_array: unknown dtype " + out.dtype);
    }
    if (!f) throw ConfigError("short read: " + path);
    return out;
}

void render_pgm(const ImageGrid& img, const std::string& path, double lo, double hi) {
    if (!(hi > lo)) throw ConfigError("render_pgm: window must satisfy hi > lo");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write PGM: " + path);
    f << "P5\n" << img.n << " " << img.n << "\n255\n";
    std::vector<uint8_t> row(img.n);
    const double scale = 255.0 / (hi - lo);
    for (int iy = 0; iy < img.n; ++iy) {
        for (int ix = 0; ix < img.n; ++ix) {
            const double v = (img.at(ix, iy) - lo) * scale;
            row[ix] = static_cast<uint8_t>(std::clamp(v, 0.0, 255.0) + 0.5);
        }
        f.write(reinterpret_cast<const char*>(row.data()), img.n);
    }
}

}  // namespace ivt
