#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ireg/config.hpp"
#include "ireg/metrics.hpp"
#include "ireg/optimize.hpp"
#include "ireg/phantom.hpp"
#include "ireg/tomo.hpp"
#include "ireg/tv.hpp"

namespace ireg {

/// Everything needed to run one registration experiment: phantoms, simulated
/// noisy data and the registration and baseline parameters.
struct ExperimentSetup {
    std::string name;
    Grid2D grid;
    PhantomKind template_kind = PhantomKind::SheppLogan;
    PhantomKind target_kind = PhantomKind::SheppLogan;
    ScalarImage templ;
    ScalarImage target;
    SinogramGeometry geometry;
    Sinogram clean_data;
    Sinogram data;
    double snr_db = 0.0;
    std::uint64_t noise_seed = 0;
    RegistrationConfig registration;
    double fbp_freq_scaling = 0.4;
    TVConfig tv;
};

/// Builds phantoms and noisy data for a configured grid, geometry and noise level.
ExperimentSetup make_setup(std::string name, const Grid2D &grid, PhantomKind template_kind, PhantomKind target_kind,
                           std::size_t n_angles, std::size_t n_detectors, double snr_db, std::uint64_t noise_seed);

/// Paper test suites 1 to 4 with their published parameters.
///   full = false runs the downscaled defaults (suite 2 at 219^2, suite 4 at 128^2).
///   variant selects the run of suite 4: 0 = template lacks an object, 1 = template has an extra one.
/// Throws ConfigError for an unknown suite id or variant.
ExperimentSetup suite_setup(int suite, bool full, std::uint64_t seed, int variant = 0);

/// Detector count scaled with the image width, kept even.
std::size_t scaled_detectors(std::size_t paper_detectors, std::size_t paper_n, std::size_t n);

struct RegistrationOutcome {
    RegistrationResult result;
    MetricReport result_metrics;   // deformed template vs target
    MetricReport template_metrics; // undeformed template vs target
};

RegistrationOutcome run_registration(const ExperimentSetup &setup, const IterationCallback &on_iteration = {});

/// One cell of a sigma x gamma parameter sweep.
struct SweepCell {
    double sigma = 0.0;
    double gamma = 0.0;
    double ssim = 0.0;
    double psnr_db = 0.0;
    std::size_t iterations = 0;
    StopReason stop_reason = StopReason::MaxIters;
};

using SweepCallback = std::function<void(const SweepCell &)>;

/// Registers the setup once per (sigma, gamma) pair, sigma outer.
std::vector<SweepCell> parameter_sweep(const ExperimentSetup &setup, const std::vector<double> &sigmas,
                                       const std::vector<double> &gammas, const SweepCallback &on_cell = {});

/// Two data sets that differ only in their noise realization, both scaled down
/// together: result_distance is the L2 distance between the two registered images.
struct StabilityLevel {
    double noise_scale = 0.0;
    double data_distance = 0.0;
    double result_distance = 0.0;
};

/// Registers setup.data and a second realization (second_seed) at each noise scale.
/// Stability predicts result_distance shrinking with data_distance.
std::vector<StabilityLevel> stability_experiment(const ExperimentSetup &setup, std::uint64_t second_seed,
                                                 const std::vector<double> &noise_scales = {1.0, 0.5, 0.25});

struct ConvergenceLevel {
    double noise_scale = 0.0;
    double noise_level = 0.0; // ||g - T(target)|| in the data norm
    double gamma = 0.0;
    double final_discrepancy = 0.0;
    double target_distance = 0.0; // L2 distance of the result to the target
};

/// Halves the noise and gamma together at every level, starting from setup.data
/// and setup.registration.gamma.
std::vector<ConvergenceLevel> convergence_experiment(const ExperimentSetup &setup, std::size_t n_levels = 3);

/// The sweep axes of the suite 3 table.
const std::vector<double> &suite3_sigmas();
const std::vector<double> &suite3_gammas();

/// Connected components of {f > threshold} with 8-connectivity.
std::size_t count_components(const ScalarImage &f, double threshold = 0.5);

} // namespace ireg
