#include "ireg/experiment.hpp"

#include <cmath>
#include <queue>

#include "ireg/error.hpp"

namespace ireg {

ExperimentSetup make_setup(std::string name, const Grid2D &grid, PhantomKind template_kind, PhantomKind target_kind,
                           std::size_t n_angles, std::size_t n_detectors, double snr_db, std::uint64_t noise_seed) {
    ExperimentSetup s;
    s.name = std::move(name);
    s.grid = grid;
    s.template_kind = template_kind;
    s.target_kind = target_kind;
    s.templ = make_phantom({template_kind, grid});
    s.target = make_phantom({target_kind, grid});
    s.geometry = SinogramGeometry::for_grid(grid, n_angles, n_detectors);
    s.clean_data = ray_transform(s.target, s.geometry);
    s.snr_db = snr_db;
    s.noise_seed = noise_seed;
    s.data = add_noise(s.clean_data, NoiseSpec{snr_db, noise_seed});
    return s;
}

std::size_t scaled_detectors(std::size_t paper_detectors, std::size_t paper_n, std::size_t n) {
    const double p = static_cast<double>(paper_detectors) * static_cast<double>(n) / static_cast<double>(paper_n);
    const auto half = static_cast<std::size_t>(std::lround(p / 2.0));
    return std::max<std::size_t>(2 * half, 4);
}

ExperimentSetup suite_setup(int suite, bool full, std::uint64_t seed, int variant) {
    ExperimentSetup s;
    switch (suite) {
    case 1: {
        s = make_setup("suite1", Grid2D::square(64), PhantomKind::SingleStarTemplate, PhantomKind::SingleStarTarget,
                       10, 92, 4.87, seed);
        s.registration.gamma = 1e-7;
        s.registration.sigma = 6.0;
        s.registration.alpha = 0.02;
        s.registration.n_steps = 20;
        s.registration.max_iters = 200;
        s.tv.mu = 3.0;
        break;
    }
    case 2: {
        const std::size_t n = full ? 438 : 219;
        s = make_setup("suite2", Grid2D::square(n), PhantomKind::SixStarsTemplate, PhantomKind::SixStarsTarget, 6,
                       scaled_detectors(620, 438, n), 4.75, seed);
        s.registration.gamma = 1e-7;
        s.registration.sigma = 2.0;
        s.registration.alpha = 0.04;
        s.registration.n_steps = 20;
        s.registration.max_iters = 200;
        s.tv.mu = 1.0;
        break;
    }
    case 3: {
        s = make_setup("suite3", Grid2D::square(256), PhantomKind::SheppLoganDeformed, PhantomKind::SheppLogan, 10,
                       362, 7.06, seed);
        s.registration.gamma = 1e-7;
        s.registration.sigma = 2.0;
        s.registration.alpha = 0.02;
        s.registration.n_steps = 20;
        // Iteration count is not published for this suite; it follows suite 1.
        s.registration.max_iters = 200;
        break;
    }
    case 4: {
        if (variant != 0 && variant != 1) {
            throw ConfigError("suite 4 variant must be 0 (missing object) or 1 (extra object)");
        }
        const std::size_t n = full ? 256 : 128;
        const bool lacks = variant == 0;
        // Run 0: the template lacks the bright object the target has; run 1 the reverse.
        s = make_setup(lacks ? "suite4-missing" : "suite4-extra", Grid2D::square(n),
                       lacks ? PhantomKind::SheppLogan : PhantomKind::SheppLoganExtraObject,
                       lacks ? PhantomKind::SheppLoganExtraObject : PhantomKind::SheppLogan, 10,
                       scaled_detectors(362, 256, n), lacks ? 7.06 : 6.46, seed);
        s.registration.gamma = 1e-7;
        s.registration.sigma = 2.0;
        s.registration.alpha = 0.02;
        s.registration.n_steps = 20;
        s.registration.max_iters = 1000;
        break;
    }
    default:
        throw ConfigError("suite id must be 1, 2, 3 or 4");
    }
    return s;
}

RegistrationOutcome run_registration(const ExperimentSetup &setup, const IterationCallback &on_iteration) {
    RegistrationOutcome out;
    out.result = register_template(setup.templ, setup.data, setup.registration, on_iteration);
    out.result_metrics = evaluate_metrics(out.result.deformed, setup.target);
    out.template_metrics = evaluate_metrics(setup.templ, setup.target);
    return out;
}

std::vector<SweepCell> parameter_sweep(const ExperimentSetup &setup, const std::vector<double> &sigmas,
                                       const std::vector<double> &gammas, const SweepCallback &on_cell) {
    std::vector<SweepCell> cells;
    for (double sigma : sigmas) {
        for (double gamma : gammas) {
            ExperimentSetup s = setup;
            s.registration.sigma = sigma;
            s.registration.gamma = gamma;
            const RegistrationOutcome o = run_registration(s);
            SweepCell c{sigma, gamma, o.result_metrics.ssim, o.result_metrics.psnr_db, o.result.iterations_run,
                        o.result.stop_reason};
            if (on_cell) {
                on_cell(c);
            }
            cells.push_back(c);
        }
    }
    return cells;
}

namespace {

// clean + scale * (noisy - clean): the same noise realization at a reduced level.
Sinogram scaled_noise(const Sinogram &clean, const Sinogram &noisy, double scale) {
    Sinogram out = clean;
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        out.values[k] += scale * (noisy.values[k] - clean.values[k]);
    }
    return out;
}

double l2_distance(const ScalarImage &a, const ScalarImage &b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        const double d = a.values[k] - b.values[k];
        s += d * d;
    }
    return std::sqrt(s * a.grid.cell_area());
}

} // namespace

std::vector<StabilityLevel> stability_experiment(const ExperimentSetup &setup, std::uint64_t second_seed,
                                                 const std::vector<double> &noise_scales) {
    const Sinogram other = add_noise(setup.clean_data, NoiseSpec{setup.snr_db, second_seed});
    std::vector<StabilityLevel> levels;
    for (double scale : noise_scales) {
        const Sinogram g1 = scaled_noise(setup.clean_data, setup.data, scale);
        const Sinogram g2 = scaled_noise(setup.clean_data, other, scale);
        const RegistrationResult r1 = register_template(setup.templ, g1, setup.registration);
        const RegistrationResult r2 = register_template(setup.templ, g2, setup.registration);
        StabilityLevel level;
        level.noise_scale = scale;
        Sinogram diff = g1;
        for (std::size_t k = 0; k < diff.values.size(); ++k) {
            diff.values[k] = g1.values[k] - g2.values[k];
        }
        level.data_distance = std::sqrt(inner_product(diff, diff));
        level.result_distance = l2_distance(r1.deformed, r2.deformed);
        levels.push_back(level);
    }
    return levels;
}

std::vector<ConvergenceLevel> convergence_experiment(const ExperimentSetup &setup, std::size_t n_levels) {
    std::vector<ConvergenceLevel> levels;
    double scale = 1.0;
    double gamma = setup.registration.gamma;
    for (std::size_t k = 0; k < n_levels; ++k, scale /= 2.0, gamma /= 2.0) {
        const Sinogram data = scaled_noise(setup.clean_data, setup.data, scale);
        RegistrationConfig cfg = setup.registration;
        cfg.gamma = gamma;
        const RegistrationResult r = register_template(setup.templ, data, cfg);
        ConvergenceLevel level;
        level.noise_scale = scale;
        level.gamma = gamma;
        Sinogram noise = data;
        for (std::size_t i = 0; i < noise.values.size(); ++i) {
            noise.values[i] -= setup.clean_data.values[i];
        }
        level.noise_level = std::sqrt(inner_product(noise, noise));
        level.final_discrepancy = r.objective_history.back().discrepancy;
        level.target_distance = l2_distance(r.deformed, setup.target);
        levels.push_back(level);
    }
    return levels;
}

const std::vector<double> &suite3_sigmas() {
    static const std::vector<double> v{1.0, 2.0, 2.5, 3.0, 4.0, 8.0};
    return v;
}

const std::vector<double> &suite3_gammas() {
    static const std::vector<double> v{1e-7, 1e-5, 1e-3, 1e-1, 10.0};
    return v;
}

std::size_t count_components(const ScalarImage &f, double threshold) {
    const Grid2D &g = f.grid;
    std::vector<char> seen(g.size(), 0);
    std::size_t count = 0;
    std::queue<std::size_t> q;
    for (std::size_t start = 0; start < g.size(); ++start) {
        if (seen[start] || !(f.values[start] > threshold)) {
            continue;
        }
        ++count;
        seen[start] = 1;
        q.push(start);
        while (!q.empty()) {
            const std::size_t k = q.front();
            q.pop();
            const long i = static_cast<long>(k % g.nx);
            const long j = static_cast<long>(k / g.nx);
            for (long dj = -1; dj <= 1; ++dj) {
                for (long di = -1; di <= 1; ++di) {
                    const long ii = i + di;
                    const long jj = j + dj;
                    if (ii < 0 || jj < 0 || ii >= static_cast<long>(g.nx) || jj >= static_cast<long>(g.ny)) {
                        continue;
                    }
                    const std::size_t m = g.index(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
                    if (!seen[m] && f.values[m] > threshold) {
                        seen[m] = 1;
                        q.push(m);
                    }
                }
            }
        }
    }
    return count;
}

} // namespace ireg
