#pragma once

#include <optional>

#include "ireg/grid.hpp"
#include "ireg/tomo.hpp"

namespace ireg {

struct MetricReport {
    double ssim = 0.0;
    double psnr_db = 0.0; // +infinity for identical images
    std::optional<double> snr_db;
};

/// Mean structural similarity with an 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, averaged over window positions fully inside the image.
double ssim(const ScalarImage &a, const ScalarImage &b, double dynamic_range = 1.0);

/// 10 log10(L^2 / MSE). Returns +infinity when the images are identical.
double psnr(const ScalarImage &a, const ScalarImage &ref, double dynamic_range = 1.0);

/// 10 log10(||g_ideal - mean||^2 / ||noise - mean||^2) with noise = noisy - ideal.
/// Throws ConfigError when the noise has zero variance.
double measure_snr(const Sinogram &ideal, const Sinogram &noisy);

MetricReport evaluate_metrics(const ScalarImage &result, const ScalarImage &reference, double dynamic_range = 1.0);

} // namespace ireg
