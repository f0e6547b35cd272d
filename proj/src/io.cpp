#include "ireg/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ireg/error.hpp"

namespace ireg::io {

namespace {

void put_u32(std::vector<unsigned char> &out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) {
        out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xffu));
    }
}

void put_f64(std::vector<unsigned char> &out, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int b = 0; b < 8; ++b) {
        out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xffu));
    }
}

class Reader {
  public:
    explicit Reader(const std::vector<unsigned char> &b) : bytes_(b) {}

    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) {
            throw IoError("truncated file");
        }
    }
    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b) {
            v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * b);
        }
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) {
            v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * b);
        }
        return std::bit_cast<double>(v);
    }
    void magic(const char *m) {
        need(4);
        if (std::memcmp(bytes_.data() + pos_, m, 4) != 0) {
            throw IoError(std::string("bad magic, expected ") + m);
        }
        pos_ += 4;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

  private:
    const std::vector<unsigned char> &bytes_;
    std::size_t pos_ = 0;
};

std::vector<unsigned char> slurp(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path &path, const std::vector<unsigned char> &bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

} // namespace

std::vector<unsigned char> encode_igrd(const ScalarImage &img) {
    std::vector<unsigned char> out{'I', 'G', 'R', 'D', 1};
    out.reserve(5 + 8 + 32 + 8 * img.values.size());
    put_u32(out, static_cast<std::uint32_t>(img.grid.nx));
    put_u32(out, static_cast<std::uint32_t>(img.grid.ny));
    put_f64(out, img.grid.x_min);
    put_f64(out, img.grid.x_max);
    put_f64(out, img.grid.y_min);
    put_f64(out, img.grid.y_max);
    for (double v : img.values) {
        put_f64(out, v);
    }
    return out;
}

ScalarImage decode_igrd(const std::vector<unsigned char> &bytes) {
    Reader r(bytes);
    r.magic("IGRD");
    if (r.u8() != 1) {
        throw IoError("unsupported IGRD version");
    }
    const std::uint32_t nx = r.u32();
    const std::uint32_t ny = r.u32();
    const double x0 = r.f64(), x1 = r.f64(), y0 = r.f64(), y1 = r.f64();
    Grid2D g(nx, ny, x0, x1, y0, y1);
    r.need(8 * g.size());
    std::vector<double> vals(g.size());
    for (double &v : vals) {
        v = r.f64();
    }
    if (!r.at_end()) {
        throw IoError("trailing bytes after IGRD payload");
    }
    return ScalarImage(g, std::move(vals));
}

std::vector<unsigned char> encode_isin(const Sinogram &sino) {
    const SinogramGeometry &g = sino.geometry;
    std::vector<unsigned char> out{'I', 'S', 'I', 'N', 1};
    put_u32(out, static_cast<std::uint32_t>(g.n_angles));
    put_u32(out, static_cast<std::uint32_t>(g.n_detectors));
    put_f64(out, g.s_min);
    put_f64(out, g.s_max);
    for (double v : sino.values) {
        put_f64(out, v);
    }
    return out;
}

Sinogram decode_isin(const std::vector<unsigned char> &bytes) {
    Reader r(bytes);
    r.magic("ISIN");
    if (r.u8() != 1) {
        throw IoError("unsupported ISIN version");
    }
    const std::uint32_t m = r.u32();
    const std::uint32_t p = r.u32();
    const double s0 = r.f64();
    const double s1 = r.f64();
    // Rays span the detector width; sampling matches for_grid on a square grid.
    const double half = 0.5 * (s1 - s0) * (static_cast<double>(p) - 2.0) / static_cast<double>(p);
    const double step = (s1 - s0) / static_cast<double>(p) / 4.0;
    SinogramGeometry geom(m, p, s0, s1, step > 0 ? step : 1.0, half > 0 ? half : 1.0);
    const std::size_t n = static_cast<std::size_t>(m) * p;
    r.need(8 * n);
    std::vector<double> vals(n);
    for (double &v : vals) {
        v = r.f64();
    }
    if (!r.at_end()) {
        throw IoError("trailing bytes after ISIN payload");
    }
    return Sinogram(geom, std::move(vals));
}

Sinogram attach_grid(const Sinogram &sino, const Grid2D &grid) {
    const SinogramGeometry geom =
        SinogramGeometry::for_grid(grid, sino.geometry.n_angles, sino.geometry.n_detectors);
    const double tol = 1e-9 * (geom.s_max - geom.s_min);
    if (std::abs(geom.s_min - sino.geometry.s_min) > tol || std::abs(geom.s_max - sino.geometry.s_max) > tol) {
        throw ConfigError("sinogram detector extent does not match the reconstruction grid");
    }
    return Sinogram(geom, sino.values);
}

void write_igrd(const std::filesystem::path &path, const ScalarImage &img) { dump(path, encode_igrd(img)); }
ScalarImage read_igrd(const std::filesystem::path &path) { return decode_igrd(slurp(path)); }
void write_isin(const std::filesystem::path &path, const Sinogram &sino) { dump(path, encode_isin(sino)); }
Sinogram read_isin(const std::filesystem::path &path) { return decode_isin(slurp(path)); }

void write_pgm16(const std::filesystem::path &path, const ScalarImage &img, double lo, double hi) {
    const Grid2D &g = img.grid;
    std::string header = "P5\n" + std::to_string(g.nx) + " " + std::to_string(g.ny) + "\n65535\n";
    std::vector<unsigned char> bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + 2 * g.size());
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t jr = 0; jr < g.ny; ++jr) {
        const std::size_t j = g.ny - 1 - jr;
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double t = std::clamp((img.at(i, j) - lo) / span, 0.0, 1.0);
            const auto v = static_cast<std::uint16_t>(std::lround(t * 65535.0));
            bytes.push_back(static_cast<unsigned char>(v >> 8));
            bytes.push_back(static_cast<unsigned char>(v & 0xffu));
        }
    }
    dump(path, bytes);
}

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace ireg::io
