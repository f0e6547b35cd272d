#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "ireg/error.hpp"
#include "ireg/io.hpp"
#include "support.hpp"

using namespace ireg;

namespace {

std::filesystem::path scratch(const char *name) {
    const auto dir = std::filesystem::temp_directory_path() / "ireg_test_io";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("IGRD round trip is bit exact") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Grid2D g(5 + seed, 3 + 2 * seed, -1.5, 2.25, -static_cast<double>(seed) - 1.0, 7.0);
        ScalarImage img = ireg::testing::random_image(g, seed, -1e6, 1e6);
        img.values[0] = -0.0;
        img.values[1] = std::numeric_limits<double>::denorm_min();
        const auto bytes = io::encode_igrd(img);
        CHECK(bytes.size() == 5 + 8 + 32 + 8 * g.size());
        const ScalarImage back = io::decode_igrd(bytes);
        CHECK(back.grid == g);
        CHECK(std::memcmp(back.values.data(), img.values.data(), 8 * g.size()) == 0);
    }
    const ScalarImage img = ireg::testing::random_image(Grid2D::square(7), 3);
    const auto path = scratch("a.igrd");
    io::write_igrd(path, img);
    CHECK(io::read_igrd(path).values == img.values);
}

TEST_CASE("IGRD layout is little-endian with a version byte") {
    const ScalarImage img(Grid2D(2, 3, 0, 1, 0, 1), 1.0);
    const auto b = io::encode_igrd(img);
    CHECK(std::string(b.begin(), b.begin() + 4) == "IGRD");
    CHECK(b[4] == 1);
    CHECK(b[5] == 2);
    CHECK(b[9] == 3);
    // 1.0 = 0x3FF0000000000000, last byte first in little-endian order
    CHECK(b[45 + 7] == 0x3F);
    CHECK(b[45 + 6] == 0xF0);
}

TEST_CASE("corrupt files are rejected") {
    const auto good = io::encode_igrd(ScalarImage(Grid2D::square(4), 0.5));
    auto truncated = good;
    truncated.pop_back();
    CHECK_THROWS_AS(io::decode_igrd(truncated), IoError);
    auto trailing = good;
    trailing.push_back(0);
    CHECK_THROWS_AS(io::decode_igrd(trailing), IoError);
    auto magic = good;
    magic[0] = 'X';
    CHECK_THROWS_AS(io::decode_igrd(magic), IoError);
    auto version = good;
    version[4] = 9;
    CHECK_THROWS_AS(io::decode_igrd(version), IoError);
    CHECK_THROWS_AS(io::decode_isin(good), IoError);
    CHECK_THROWS_AS(io::read_igrd(scratch("does-not-exist.igrd")), IoError);
}

TEST_CASE("ISIN round trip and grid reattachment") {
    const Grid2D g = Grid2D::square(32);
    const SinogramGeometry geom = SinogramGeometry::for_grid(g, 6, 48);
    const Sinogram sino = ray_transform(ireg::testing::gaussian_blob(g, 1, 2, 3), geom);
    const auto path = scratch("a.isin");
    io::write_isin(path, sino);
    const Sinogram back = io::read_isin(path);
    CHECK(back.values == sino.values);
    CHECK(back.geometry.n_angles == 6);
    CHECK(back.geometry.s_max == sino.geometry.s_max);
    const Sinogram attached = io::attach_grid(back, g);
    CHECK(attached.geometry == geom);
    CHECK_THROWS_AS(io::attach_grid(back, Grid2D::square(32, 10.0)), ConfigError);
}

TEST_CASE("16-bit PGM preview") {
    ScalarImage img(Grid2D(3, 2, 0, 3, 0, 2));
    img.at(0, 1) = 1.0; // top-left in the file
    img.at(2, 0) = 0.5;
    img.at(1, 0) = 7.0; // clamped
    const auto path = scratch("a.pgm");
    io::write_pgm16(path, img);
    std::ifstream in(path, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string header = "P5\n3 2\n65535\n";
    REQUIRE(bytes.size() == header.size() + 12);
    CHECK(bytes.substr(0, header.size()) == header);
    auto px = [&](int k) {
        return (static_cast<unsigned char>(bytes[header.size() + 2 * k]) << 8) |
               static_cast<unsigned char>(bytes[header.size() + 2 * k + 1]);
    };
    CHECK(px(0) == 65535);
    CHECK(px(4) == 65535);
    CHECK(px(5) == 32768);
    CHECK(px(3) == 0);
}

TEST_CASE("CSV quoting and number formatting") {
    CHECK(io::csv_field("plain") == "plain");
    CHECK(io::csv_field("a,b") == "\"a,b\"");
    CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(io::csv_field("two\nlines") == "\"two\nlines\"");
    for (double v : {0.1, 1e-7, 26.96, -3.0, 1.0 / 3.0}) {
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(INFINITY) == "inf");
    CHECK(io::format_double(NAN) == "nan");
}
