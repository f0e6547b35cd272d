#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "ireg/config.hpp"
#include "ireg/phantom.hpp"

namespace ireg {

/// Contents of an INI experiment file. Every section and key is optional
/// except those marked required; unknown sections or keys are rejected.
///
///   [phantom]      template, target (phantom kind names; required unless given as files)
///   [input]        template, target, data (IGRD/ISIN paths that replace the phantoms)
///   [grid]         n, half_extent
///   [geometry]     n_angles, n_detectors
///   [noise]        snr_db (inf = noiseless), seed
///   [registration] gamma, sigma, alpha, n_steps, max_iters, grad_tol, action, backtracking
///   [baselines]    fbp_freq_scaling, tv_mu, tv_iters
///   [output]       dir
struct ExperimentConfig {
    PhantomKind template_kind = PhantomKind::SingleStarTemplate;
    PhantomKind target_kind = PhantomKind::SingleStarTarget;
    std::filesystem::path template_path;
    std::filesystem::path target_path;
    std::filesystem::path data_path;

    std::size_t n = 64;
    double half_extent = 16.0;
    std::size_t n_angles = 10;
    std::size_t n_detectors = 92;
    double snr_db = 4.87;
    std::uint64_t noise_seed = 0;

    RegistrationConfig registration;

    double fbp_freq_scaling = 0.4;
    double tv_mu = 3.0;
    std::size_t tv_iters = 1000;

    std::filesystem::path output_dir = "out";

    /// One "section.key=value" line per field in a fixed order; the config hash
    /// is taken over this text so formatting differences in the file do not matter.
    std::string canonical_text() const;
};

/// Parses INI text. Throws ConfigError naming the offending "section.key".
ExperimentConfig parse_experiment_config(const std::string &text);

/// Reads and parses a file; IoError if it cannot be read.
ExperimentConfig load_experiment_config(const std::filesystem::path &path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string &bytes);

} // namespace ireg
