#include "ireg/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "ireg/error.hpp"

namespace ireg {

KernelSpec::KernelSpec(double sigma, const Grid2D &grid, KernelExponent exponent)
    : sigma_(sigma), grid_(grid), exponent_(exponent) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ConfigError("kernel sigma must be positive and finite");
    }
    const double r = truncation_radius();
    rx_ = std::min(static_cast<long>(std::floor(r / grid.hx())), static_cast<long>(grid.nx) - 1);
    ry_ = std::min(static_cast<long>(std::floor(r / grid.hy())), static_cast<long>(grid.ny) - 1);

    const std::size_t rows = detail::fft_friendly_size(grid.ny + static_cast<std::size_t>(ry_));
    const std::size_t cols = detail::fft_friendly_size(grid.nx + static_cast<std::size_t>(rx_));
    fft_ = std::make_unique<detail::RealFFT2D>(rows, cols);

    std::vector<double> sampled(rows * cols, 0.0);
    for (long dj = -ry_; dj <= ry_; ++dj) {
        const std::size_t row = static_cast<std::size_t>((dj + static_cast<long>(rows)) % static_cast<long>(rows));
        for (long di = -rx_; di <= rx_; ++di) {
            const std::size_t col =
                static_cast<std::size_t>((di + static_cast<long>(cols)) % static_cast<long>(cols));
            sampled[row * cols + col] =
                profile(static_cast<double>(di) * grid.hx(), static_cast<double>(dj) * grid.hy());
        }
    }
    fft_->forward(sampled, freq_kernel_);
    const double scale = grid.cell_area() / static_cast<double>(rows * cols);
    for (auto &c : freq_kernel_) {
        c *= scale;
    }
}

KernelSpec::~KernelSpec() = default;
KernelSpec::KernelSpec(KernelSpec &&) noexcept = default;
KernelSpec &KernelSpec::operator=(KernelSpec &&) noexcept = default;

double KernelSpec::profile(double dx, double dy) const {
    const double d2 = dx * dx + dy * dy;
    const double r = truncation_radius();
    if (d2 > r * r) {
        return 0.0;
    }
    const double arg = exponent_ == KernelExponent::Squared ? d2 : std::sqrt(d2);
    return std::exp(-arg / (2.0 * sigma_ * sigma_));
}

std::size_t KernelSpec::padded_rows() const { return fft_->rows(); }
std::size_t KernelSpec::padded_cols() const { return fft_->cols(); }

double kernel_value(const KernelSpec &spec, double x1, double y1, double x2, double y2) {
    return spec.profile(x1 - x2, y1 - y2);
}

ScalarImage smooth(const KernelSpec &spec, const ScalarImage &img) {
    if (!(img.grid == spec.grid_)) {
        throw ConfigError("smooth: field grid does not match the kernel grid");
    }
    const Grid2D &g = img.grid;
    const std::size_t rows = spec.fft_->rows();
    const std::size_t cols = spec.fft_->cols();
    std::vector<double> buf(rows * cols, 0.0);
    for (std::size_t j = 0; j < g.ny; ++j) {
        std::copy_n(img.values.begin() + static_cast<std::ptrdiff_t>(j * g.nx), g.nx,
                    buf.begin() + static_cast<std::ptrdiff_t>(j * cols));
    }
    std::vector<std::complex<double>> spec_buf;
    spec.fft_->forward(buf, spec_buf);
    for (std::size_t k = 0; k < spec_buf.size(); ++k) {
        spec_buf[k] *= spec.freq_kernel_[k];
    }
    spec.fft_->backward(spec_buf, buf);
    ScalarImage out(g);
    for (std::size_t j = 0; j < g.ny; ++j) {
        std::copy_n(buf.begin() + static_cast<std::ptrdiff_t>(j * cols), g.nx,
                    out.values.begin() + static_cast<std::ptrdiff_t>(j * g.nx));
    }
    return out;
}

VectorField2D smooth(const KernelSpec &spec, const VectorField2D &vf) {
    VectorField2D out(vf.grid);
    out.vx = smooth(spec, ScalarImage(vf.grid, vf.vx)).values;
    out.vy = smooth(spec, ScalarImage(vf.grid, vf.vy)).values;
    return out;
}

} // namespace ireg
