#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "ireg/grid.hpp"

namespace ireg {

namespace detail {
class RealFFT2D;
}

/// Which norm enters the Gaussian exponent. The squared form is the default and
/// the only one exercised by the registration suites.
enum class KernelExponent { Squared, Unsquared };

/// Diagonal Gaussian reproducing kernel of the velocity space, truncated at 4 sigma.
///
/// smooth() realises the integral  x -> sum_y K(x, y) v(y) hx hy  by zero-padded
/// FFT convolution; the padded grid is large enough that the result equals the
/// linear (not circular) convolution. Immutable after construction.
class KernelSpec {
  public:
    KernelSpec(double sigma, const Grid2D &grid, KernelExponent exponent = KernelExponent::Squared);
    ~KernelSpec();
    KernelSpec(KernelSpec &&) noexcept;
    KernelSpec &operator=(KernelSpec &&) noexcept;

    double sigma() const { return sigma_; }
    double truncation_radius() const { return 4.0 * sigma_; }
    const Grid2D &grid() const { return grid_; }
    KernelExponent exponent() const { return exponent_; }

    /// Kernel as a function of the offset vector; zero beyond the truncation radius.
    double profile(double dx, double dy) const;

    /// Largest lattice offsets (in pixels) with a nonzero kernel value.
    long radius_x() const { return rx_; }
    long radius_y() const { return ry_; }

    std::size_t padded_rows() const;
    std::size_t padded_cols() const;

  private:
    friend ScalarImage smooth(const KernelSpec &, const ScalarImage &);

    double sigma_;
    Grid2D grid_;
    KernelExponent exponent_;
    long rx_ = 0;
    long ry_ = 0;
    std::unique_ptr<detail::RealFFT2D> fft_;
    std::vector<std::complex<double>> freq_kernel_; // includes hx*hy and 1/(rows*cols)
};

double kernel_value(const KernelSpec &spec, double x1, double y1, double x2, double y2);

/// Componentwise kernel convolution of a vector field.
VectorField2D smooth(const KernelSpec &spec, const VectorField2D &vf);

/// Kernel convolution of a single scalar component.
ScalarImage smooth(const KernelSpec &spec, const ScalarImage &img);

} // namespace ireg
