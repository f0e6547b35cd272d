#pragma once

// Thin RAII layer over FFTW real-to-complex transforms. Internal to the library.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace ireg::detail {

/// Smallest integer >= n whose only prime factors are 2, 3, 5 and 7.
std::size_t fft_friendly_size(std::size_t n);

/// Real <-> half-complex transforms of fixed shape (rows x cols, row-major).
/// Unnormalized: backward(forward(x)) == rows * cols * x.
class RealFFT2D {
  public:
    RealFFT2D(std::size_t rows, std::size_t cols);
    ~RealFFT2D();
    RealFFT2D(const RealFFT2D &) = delete;
    RealFFT2D &operator=(const RealFFT2D &) = delete;

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t spectrum_cols() const { return cols_ / 2 + 1; }

    /// real buffer (rows*cols) -> spectrum buffer (rows*(cols/2+1))
    void forward(std::vector<double> &real, std::vector<std::complex<double>> &spectrum) const;
    /// spectrum buffer -> real buffer; the spectrum is clobbered.
    void backward(std::vector<std::complex<double>> &spectrum, std::vector<double> &real) const;

  private:
    std::size_t rows_;
    std::size_t cols_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

/// One-dimensional variant used for projection filtering.
class RealFFT1D {
  public:
    explicit RealFFT1D(std::size_t n);
    ~RealFFT1D();
    RealFFT1D(const RealFFT1D &) = delete;
    RealFFT1D &operator=(const RealFFT1D &) = delete;

    std::size_t size() const { return n_; }
    void forward(std::vector<double> &real, std::vector<std::complex<double>> &spectrum) const;
    void backward(std::vector<std::complex<double>> &spectrum, std::vector<double> &real) const;

  private:
    std::size_t n_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

} // namespace ireg::detail
