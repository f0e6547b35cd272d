#include "ireg/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "ireg/error.hpp"

namespace ireg {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;

std::array<double, kWindow> gaussian_taps() {
    std::array<double, kWindow> w{};
    double sum = 0.0;
    for (int k = 0; k < kWindow; ++k) {
        const double d = k - kWindow / 2;
        w[k] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
        sum += w[k];
    }
    for (double &v : w) {
        v /= sum;
    }
    return w;
}

// Separable 'valid' filtering: output is (nx-10) x (ny-10).
std::vector<double> filter_valid(const std::vector<double> &img, std::size_t nx, std::size_t ny,
                                 const std::array<double, kWindow> &w) {
    const std::size_t ox = nx - kWindow + 1;
    const std::size_t oy = ny - kWindow + 1;
    std::vector<double> rows(ox * ny);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < ox; ++i) {
            double s = 0.0;
            for (int k = 0; k < kWindow; ++k) {
                s += w[k] * img[j * nx + i + k];
            }
            rows[j * ox + i] = s;
        }
    }
    std::vector<double> out(ox * oy);
    for (std::size_t j = 0; j < oy; ++j) {
        for (std::size_t i = 0; i < ox; ++i) {
            double s = 0.0;
            for (int k = 0; k < kWindow; ++k) {
                s += w[k] * rows[(j + k) * ox + i];
            }
            out[j * ox + i] = s;
        }
    }
    return out;
}

} // namespace

double ssim(const ScalarImage &a, const ScalarImage &b, double dynamic_range) {
    if (!(a.grid == b.grid)) {
        throw ConfigError("ssim: images live on different grids");
    }
    if (!(dynamic_range > 0.0)) {
        throw ConfigError("ssim: dynamic range must be positive");
    }
    const std::size_t nx = a.grid.nx;
    const std::size_t ny = a.grid.ny;
    if (nx < kWindow || ny < kWindow) {
        throw ConfigError("ssim: images must be at least 11x11");
    }
    const auto w = gaussian_taps();
    std::vector<double> aa(a.values.size()), bb(a.values.size()), ab(a.values.size());
    for (std::size_t k = 0; k < aa.size(); ++k) {
        aa[k] = a.values[k] * a.values[k];
        bb[k] = b.values[k] * b.values[k];
        ab[k] = a.values[k] * b.values[k];
    }
    const auto mu_a = filter_valid(a.values, nx, ny, w);
    const auto mu_b = filter_valid(b.values, nx, ny, w);
    const auto s_aa = filter_valid(aa, nx, ny, w);
    const auto s_bb = filter_valid(bb, nx, ny, w);
    const auto s_ab = filter_valid(ab, nx, ny, w);
    const double c1 = std::pow(0.01 * dynamic_range, 2);
    const double c2 = std::pow(0.03 * dynamic_range, 2);
    double sum = 0.0;
    for (std::size_t k = 0; k < mu_a.size(); ++k) {
        const double ma = mu_a[k];
        const double mb = mu_b[k];
        const double va = s_aa[k] - ma * ma;
        const double vb = s_bb[k] - mb * mb;
        const double cov = s_ab[k] - ma * mb;
        sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return sum / static_cast<double>(mu_a.size());
}

double psnr(const ScalarImage &a, const ScalarImage &ref, double dynamic_range) {
    if (!(a.grid == ref.grid)) {
        throw ConfigError("psnr: images live on different grids");
    }
    double mse = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        const double d = a.values[k] - ref.values[k];
        mse += d * d;
    }
    mse /= static_cast<double>(a.values.size());
    if (mse == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(dynamic_range * dynamic_range / mse);
}

double measure_snr(const Sinogram &ideal, const Sinogram &noisy) {
    if (ideal.values.size() != noisy.values.size()) {
        throw ConfigError("measure_snr: sinograms differ in size");
    }
    const std::size_t n = ideal.values.size();
    double mi = 0.0;
    double mn = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mi += ideal.values[k];
        mn += noisy.values[k] - ideal.values[k];
    }
    mi /= static_cast<double>(n);
    mn /= static_cast<double>(n);
    double es = 0.0;
    double en = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = ideal.values[k] - mi;
        const double e = noisy.values[k] - ideal.values[k] - mn;
        es += s * s;
        en += e * e;
    }
    if (!(en > 0.0)) {
        throw ConfigError("measure_snr: noise has zero variance");
    }
    return 10.0 * std::log10(es / en);
}

MetricReport evaluate_metrics(const ScalarImage &result, const ScalarImage &reference, double dynamic_range) {
    MetricReport r;
    r.ssim = ssim(result, reference, dynamic_range);
    r.psnr_db = psnr(result, reference, dynamic_range);
    return r;
}

} // namespace ireg
