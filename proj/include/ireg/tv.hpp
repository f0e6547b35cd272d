#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ireg/grid.hpp"
#include "ireg/tomo.hpp"

namespace ireg {

/// Chambolle-Pock parameters for min_f  mu TV(f) + ||T f - g||_Y^2.
/// Step sizes left at zero are filled in as 0.99 / ||A|| by tv_reconstruct.
struct TVConfig {
    double mu = 1.0;
    std::size_t n_iters = 1000;
    double tau = 0.0;
    double sigma_pd = 0.0;
    double theta = 1.0;
    /// Records the primal objective every this many iterations (0 = never).
    std::size_t objective_every = 0;
};

struct TVResult {
    ScalarImage image;
    double operator_norm = 0.0;
    std::vector<std::pair<std::size_t, double>> objective_trace;
};

/// Isotropic total variation  hx*hy * sum |D f|  with forward differences and Neumann boundary.
double total_variation(const ScalarImage &f);

/// mu TV(f) + ||T f - g||_Y^2
double tv_objective(const ScalarImage &f, const Sinogram &data, double mu);

/// Norm of the stacked operator A = [T; D] in the Euclidean coordinates the
/// primal-dual iteration runs in, by 100 power iterations from a seeded start.
double operator_norm_estimate(const SinogramGeometry &geom, const Grid2D &grid, std::uint64_t seed = 0x5eed);

/// Norm of the forward-difference gradient alone (bounded by sqrt(4/hx^2 + 4/hy^2)).
double gradient_norm_estimate(const Grid2D &grid, std::uint64_t seed = 0x5eed);

TVResult tv_reconstruct_detailed(const Sinogram &data, const Grid2D &grid, const TVConfig &cfg);

ScalarImage tv_reconstruct(const Sinogram &data, const Grid2D &grid, const TVConfig &cfg);

} // namespace ireg
