#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace ireg::detail {

namespace {

// FFTW's planner is not re-entrant.
std::mutex &planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

std::size_t fft_friendly_size(std::size_t n) {
    if (n <= 1) {
        return 1;
    }
    for (std::size_t m = n;; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u, 7u}) {
            while (r % p == 0) {
                r /= p;
            }
        }
        if (r == 1) {
            return m;
        }
    }
}

struct RealFFT2D::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

RealFFT2D::RealFFT2D(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), plans_(new Plans) {
    std::vector<double> real(rows * cols);
    std::vector<std::complex<double>> spec(rows * (cols / 2 + 1));
    auto *c = reinterpret_cast<fftw_complex *>(spec.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->fwd = fftw_plan_dft_r2c_2d(static_cast<int>(rows), static_cast<int>(cols), real.data(), c,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->bwd = fftw_plan_dft_c2r_2d(static_cast<int>(rows), static_cast<int>(cols), c, real.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plans_->fwd == nullptr || plans_->bwd == nullptr) {
        throw std::runtime_error("FFTW failed to create a 2D plan");
    }
}

RealFFT2D::~RealFFT2D() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plans_->fwd);
    fftw_destroy_plan(plans_->bwd);
}

void RealFFT2D::forward(std::vector<double> &real, std::vector<std::complex<double>> &spectrum) const {
    spectrum.resize(rows_ * spectrum_cols());
    fftw_execute_dft_r2c(plans_->fwd, real.data(), reinterpret_cast<fftw_complex *>(spectrum.data()));
}

void RealFFT2D::backward(std::vector<std::complex<double>> &spectrum, std::vector<double> &real) const {
    real.resize(rows_ * cols_);
    fftw_execute_dft_c2r(plans_->bwd, reinterpret_cast<fftw_complex *>(spectrum.data()), real.data());
}

struct RealFFT1D::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

RealFFT1D::RealFFT1D(std::size_t n) : n_(n), plans_(new Plans) {
    std::vector<double> real(n);
    std::vector<std::complex<double>> spec(n / 2 + 1);
    auto *c = reinterpret_cast<fftw_complex *>(spec.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(), c, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->bwd = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plans_->fwd == nullptr || plans_->bwd == nullptr) {
        throw std::runtime_error("FFTW failed to create a 1D plan");
    }
}

RealFFT1D::~RealFFT1D() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plans_->fwd);
    fftw_destroy_plan(plans_->bwd);
}

void RealFFT1D::forward(std::vector<double> &real, std::vector<std::complex<double>> &spectrum) const {
    spectrum.resize(n_ / 2 + 1);
    fftw_execute_dft_r2c(plans_->fwd, real.data(), reinterpret_cast<fftw_complex *>(spectrum.data()));
}

void RealFFT1D::backward(std::vector<std::complex<double>> &spectrum, std::vector<double> &real) const {
    real.resize(n_);
    fftw_execute_dft_c2r(plans_->bwd, reinterpret_cast<fftw_complex *>(spectrum.data()), real.data());
}

} // namespace ireg::detail
