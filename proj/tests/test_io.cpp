#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ivt/io.hpp"

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("ivt_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<char> slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    return std::vector<char>((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("f8 array round trip with metadata") {
    TempDir dir;
    std::vector<double> data{1.0, -2.5, 3.25, 0.0, 1e-300, 4.0};
    ivt::save_array(dir.file("a.bin"), data, {2, 3}, {{"kind", "test"}, {"n", "6"}});
    const auto back = ivt::load_array(dir.file("a.bin"));
    CHECK(back.dtype == "f8");
    CHECK(back.shape == std::vector<size_t>{2, 3});
    CHECK(back.real_data == data);
    CHECK(back.meta.at("kind") == "test");
}

TEST_CASE("c16 array round trip") {
    TempDir dir;
    std::vector<ivt::Complex> data{{1.0, 2.0}, {-0.5, 0.25}, {0.0, -1e-10}};
    ivt::save_array(dir.file("c.bin"), data, {3});
    const auto back = ivt::load_array(dir.file("c.bin"));
    CHECK(back.dtype == "c16");
    CHECK(back.complex_data == data);
}

TEST_CASE("shape mismatch is rejected") {
    TempDir dir;
    std::vector<double> data(5, 1.0);
    CHECK_THROWS_AS(ivt::save_array(dir.file("bad.bin"), data, {2, 3}), ivt::ConfigError);
}

TEST_CASE("save-load-save produces bit-identical files") {
    TempDir dir;
    std::vector<double> data(1000);
    for (size_t i = 0; i < data.size(); ++i) data[i] = std::sin(static_cast<double>(i)) * 1e-7;
    ivt::save_array(dir.file("x.bin"), data, {1000}, {{"seed", "1"}});
    const auto loaded = ivt::load_array(dir.file("x.bin"));
    ivt::save_array(dir.file("y.bin"), loaded.real_data, loaded.shape, loaded.meta);
    CHECK(slurp(dir.file("x.bin")) == slurp(dir.file("y.bin")));
    CHECK(slurp(dir.file("x.bin.json")) == slurp(dir.file("y.bin.json")));
}

TEST_CASE("PGM rendering") {
    TempDir dir;
    ivt::ImageGrid img(16, 1.0);

    SUBCASE("constant image fills with one gray value") {
        for (auto& v : img.values) v = 0.5;
        ivt::render_pgm(img, dir.file("c.pgm"), 0.0, 1.0);
        const auto bytes = slurp(dir.file("c.pgm"));
        // header P5 16 16 255 then 256 pixels
        REQUIRE(bytes.size() > 256);
        const size_t start = bytes.size() - 256;
        for (size_t i = start; i < bytes.size(); ++i)
            CHECK(static_cast<unsigned char>(bytes[i]) == 128);
    }
    SUBCASE("window edges map to 0 and 255") {
        img.values.assign(img.values.size(), -1.0);
        img.at(3, 2) = 2.0;   // hi
        img.at(5, 7) = 9.0;   // above hi clamps
        ivt::render_pgm(img, dir.file("w.pgm"), -1.0, 2.0);
        const auto bytes = slurp(dir.file("w.pgm"));
        const size_t start = bytes.size() - 256;
        CHECK(static_cast<unsigned char>(bytes[start]) == 0);
        CHECK(static_cast<unsigned char>(bytes[start + 2 * 16 + 3]) == 255);
        CHECK(static_cast<unsigned char>(bytes[start + 7 * 16 + 5]) == 255);
    }
    SUBCASE("re-rendering is bit-identical") {
        for (size_t i = 0; i < img.values.size(); ++i) img.values[i] = std::cos(0.1 * i);
        ivt::render_pgm(img, dir.file("r1.pgm"), -1.0, 1.0);
        ivt::render_pgm(img, dir.file("r2.pgm"), -1.0, 1.0);
        CHECK(slurp(dir.file("r1.pgm")) == slurp(dir.file("r2.pgm")));
    }
    SUBCASE("degenerate window is rejected") {
        CHECK_THROWS_AS(ivt::render_pgm(img, dir.file("z.pgm"), 1.0, 1.0), ivt::ConfigError);
    }
}
