// ireg: command-line driver for indirect registration experiments.
//
// Every command writes its artifacts into --out DIR together with a
// manifest.json that records the configuration hash, the seed and a content
// hash of each output, so two runs can be compared file by file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ireg/error.hpp"
#include "ireg/experiment.hpp"
#include "ireg/experiment_config.hpp"
#include "ireg/io.hpp"

namespace fs = std::filesystem;
using namespace ireg;

namespace {

constexpr const char *kVersion = "0.1.0";

enum ExitCode { kOk = 0, kConfig = 2, kIo = 3, kNumerical = 4 };

struct Globals {
    std::string out = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
    std::string log_csv;
};

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_bytes(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Collects the files a command writes and emits the manifest at the end.
class Artifacts {
  public:
    Artifacts(fs::path dir, std::string command, std::string config_text, const Globals &g)
        : dir_(std::move(dir)), command_(std::move(command)), config_text_(std::move(config_text)), globals_(g) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) {
            throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
        }
    }

    const fs::path &dir() const { return dir_; }

    fs::path path(const std::string &name) {
        files_.push_back(name);
        fs::path p = dir_ / name;
        fs::create_directories(p.parent_path());
        return p;
    }

    void image(const std::string &stem, const ScalarImage &img) {
        io::write_igrd(path(stem + ".igrd"), img);
        io::write_pgm16(path(stem + ".pgm"), img);
    }

    void text(const std::string &name, const std::string &content) {
        std::ofstream out(path(name), std::ios::binary);
        out << content;
        if (!out) {
            throw IoError("cannot write " + name);
        }
    }

    void finish(const std::string &status) {
        nlohmann::json m;
        m["tool"] = "ireg";
        m["version"] = kVersion;
        m["command"] = command_;
        m["config_hash"] = hex64(fnv1a64(config_text_));
        m["config"] = config_text_;
        m["seed"] = globals_.seed;
        m["threads"] = globals_.threads;
        m["compiler"] = __VERSION__;
        m["status"] = status;
        nlohmann::json outputs = nlohmann::json::array();
        for (const auto &name : files_) {
            const std::string bytes = read_bytes(dir_ / name);
            outputs.push_back({{"file", name}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a64(bytes))}});
        }
        m["outputs"] = outputs;
        std::ofstream out(dir_ / "manifest.json");
        out << m.dump(2) << '\n';
        if (!out) {
            throw IoError("cannot write manifest");
        }
    }

  private:
    fs::path dir_;
    std::string command_;
    std::string config_text_;
    const Globals &globals_;
    std::vector<std::string> files_;
};

std::string objective_csv_header() { return "iteration,total,penalty,discrepancy,gradient_norm\n"; }

std::string objective_csv_row(const IterationRecord &r) {
    return std::to_string(r.iteration) + "," + io::format_double(r.value.total) + "," +
           io::format_double(r.value.penalty) + "," + io::format_double(r.value.discrepancy) + "," +
           io::format_double(r.gradient_norm) + "\n";
}

// Progress on stdout, and the same rows into --log-csv when given.
class ProgressLog {
  public:
    explicit ProgressLog(const std::string &path) {
        if (!path.empty()) {
            csv_.open(path);
            if (!csv_) {
                throw IoError("cannot open log file " + path);
            }
            csv_ << objective_csv_header();
        }
    }

    IterationCallback callback(const std::string &label) {
        return [this, label](const IterationRecord &r) {
            std::printf("%s iter %zu total %.6g penalty %.6g discrepancy %.6g |grad| %.6g\n", label.c_str(), r.iteration,
                        r.value.total, r.value.penalty, r.value.discrepancy, r.gradient_norm);
            std::fflush(stdout);
            if (csv_.is_open()) {
                csv_ << objective_csv_row(r);
                csv_.flush();
            }
        };
    }

  private:
    std::ofstream csv_;
};

std::string objective_csv(const RegistrationResult &r) {
    std::string s = objective_csv_header();
    for (std::size_t k = 0; k < r.objective_history.size(); ++k) {
        s += objective_csv_row({k, r.objective_history[k], r.gradient_norm_history[k]});
    }
    return s;
}

std::string metrics_csv(const std::vector<std::pair<std::string, MetricReport>> &rows) {
    std::string s = "image,ssim,psnr_db\n";
    for (const auto &[name, m] : rows) {
        s += io::csv_field(name) + "," + io::format_double(m.ssim) + "," + io::format_double(m.psnr_db) + "\n";
    }
    return s;
}

std::string padded_index(std::size_t i, std::size_t n) {
    const std::size_t width = std::to_string(n).size();
    std::string s = std::to_string(i);
    return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

// Writes trajectory, final image, objective trace and metrics of one run.
// Returns the exit code for the run's stop reason.
int write_registration(Artifacts &art, const std::string &prefix, const RegistrationResult &r,
                       const ScalarImage *target, const ScalarImage &templ) {
    const std::size_t n = r.trajectory.empty() ? 0 : r.trajectory.size() - 1;
    for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
        art.image(prefix + "trajectory_" + padded_index(i, n), r.trajectory[i]);
    }
    art.image(prefix + "result", r.deformed);
    art.text(prefix + "objective.csv", objective_csv(r));
    if (target != nullptr) {
        art.text(prefix + "metrics.csv", metrics_csv({{"registration", evaluate_metrics(r.deformed, *target)},
                                                      {"template", evaluate_metrics(templ, *target)}}));
    }
    std::printf("%sstop: %s after %zu iterations\n", prefix.c_str(), to_string(r.stop_reason).c_str(), r.iterations_run);
    if (r.stop_reason == StopReason::NumericalFailure) {
        std::fprintf(stderr, "numerical failure: %s\n", r.diagnostic.c_str());
        return kNumerical;
    }
    return kOk;
}

// ---- commands ---------------------------------------------------------------

int cmd_register(const Globals &g, const std::string &config_path, bool out_given) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    if (g.seed_given) {
        cfg.noise_seed = g.seed;
    }
    Globals run = g;
    run.seed = cfg.noise_seed;
    Artifacts art(out_given ? fs::path(g.out) : cfg.output_dir, "register", cfg.canonical_text(), run);

    const Grid2D grid = Grid2D::square(cfg.n, cfg.half_extent);
    const ScalarImage templ =
        cfg.template_path.empty() ? make_phantom({cfg.template_kind, grid}) : io::read_igrd(cfg.template_path);
    if (!(templ.grid == grid)) {
        throw ConfigError("input.template: image grid does not match grid.n / grid.half_extent");
    }
    ScalarImage target = cfg.target_path.empty() ? make_phantom({cfg.target_kind, grid}) : io::read_igrd(cfg.target_path);
    if (!(target.grid == grid)) {
        throw ConfigError("input.target: image grid does not match grid.n / grid.half_extent");
    }
    Sinogram data;
    if (!cfg.data_path.empty()) {
        data = io::attach_grid(io::read_isin(cfg.data_path), grid);
    } else {
        const SinogramGeometry geom = SinogramGeometry::for_grid(grid, cfg.n_angles, cfg.n_detectors);
        data = add_noise(ray_transform(target, geom), NoiseSpec{cfg.snr_db, cfg.noise_seed});
        io::write_isin(art.path("data.isin"), data);
    }
    art.image("template", templ);
    art.image("target", target);

    ProgressLog log(g.log_csv);
    const RegistrationResult r = register_template(templ, data, cfg.registration, log.callback("register"));
    const int code = write_registration(art, "", r, &target, templ);
    art.finish(to_string(r.stop_reason));
    return code;
}

int cmd_phantom(const Globals &g, const std::string &kind, std::size_t n, double half_extent) {
    const PhantomKind k = parse_phantom_kind(kind);
    std::ostringstream cfg;
    cfg << "kind=" << kind << "\nn=" << n << "\nhalf_extent=" << io::format_double(half_extent) << "\n";
    Artifacts art(g.out, "phantom", cfg.str(), g);
    art.image("phantom", make_phantom({k, Grid2D::square(n, half_extent)}));
    art.finish("ok");
    return kOk;
}

int cmd_project(const Globals &g, const std::string &image, std::size_t angles, std::size_t detectors) {
    const ScalarImage img = io::read_igrd(image);
    std::ostringstream cfg;
    cfg << "image=" << image << "\nn_angles=" << angles << "\nn_detectors=" << detectors << "\n";
    Artifacts art(g.out, "project", cfg.str(), g);
    io::write_isin(art.path("sinogram.isin"), ray_transform(img, SinogramGeometry::for_grid(img.grid, angles, detectors)));
    art.finish("ok");
    return kOk;
}

int cmd_noise(const Globals &g, const std::string &sinogram, double snr_db) {
    const Sinogram clean = io::read_isin(sinogram);
    std::ostringstream cfg;
    cfg << "sinogram=" << sinogram << "\nsnr_db=" << io::format_double(snr_db) << "\nseed=" << g.seed << "\n";
    Artifacts art(g.out, "noise", cfg.str(), g);
    const Sinogram noisy = add_noise(clean, NoiseSpec{snr_db, g.seed});
    io::write_isin(art.path("noisy.isin"), noisy);
    std::printf("measured snr %.6f dB\n", measure_snr(clean, noisy));
    art.finish("ok");
    return kOk;
}

int cmd_fbp(const Globals &g, const std::string &sinogram, std::size_t n, double half_extent, double freq_scaling) {
    const Grid2D grid = Grid2D::square(n, half_extent);
    const Sinogram data = io::attach_grid(io::read_isin(sinogram), grid);
    std::ostringstream cfg;
    cfg << "sinogram=" << sinogram << "\nn=" << n << "\nhalf_extent=" << io::format_double(half_extent)
        << "\nfreq_scaling=" << io::format_double(freq_scaling) << "\n";
    Artifacts art(g.out, "fbp", cfg.str(), g);
    art.image("fbp", fbp(data, grid, freq_scaling));
    art.finish("ok");
    return kOk;
}

int cmd_tv(const Globals &g, const std::string &sinogram, std::size_t n, double half_extent, double mu,
           std::size_t iters) {
    const Grid2D grid = Grid2D::square(n, half_extent);
    const Sinogram data = io::attach_grid(io::read_isin(sinogram), grid);
    std::ostringstream cfg;
    cfg << "sinogram=" << sinogram << "\nn=" << n << "\nhalf_extent=" << io::format_double(half_extent)
        << "\nmu=" << io::format_double(mu) << "\niters=" << iters << "\n";
    Artifacts art(g.out, "tv", cfg.str(), g);
    TVConfig tv;
    tv.mu = mu;
    tv.n_iters = iters;
    tv.objective_every = 10;
    const TVResult r = tv_reconstruct_detailed(data, grid, tv);
    art.image("tv", r.image);
    std::string trace = "iteration,objective\n";
    for (const auto &[it, value] : r.objective_trace) {
        trace += std::to_string(it) + "," + io::format_double(value) + "\n";
    }
    art.text("tv_objective.csv", trace);
    art.finish("ok");
    return kOk;
}

int cmd_evaluate(const Globals &g, const std::string &result, const std::string &reference, double range) {
    const ScalarImage a = io::read_igrd(result);
    const ScalarImage b = io::read_igrd(reference);
    std::ostringstream cfg;
    cfg << "result=" << result << "\nreference=" << reference << "\ndynamic_range=" << io::format_double(range) << "\n";
    Artifacts art(g.out, "evaluate", cfg.str(), g);
    const MetricReport m = evaluate_metrics(a, b, range);
    std::printf("ssim %.6f psnr %.4f dB\n", m.ssim, m.psnr_db);
    art.text("evaluate.csv", "result,reference,ssim,psnr_db\n" + io::csv_field(result) + "," + io::csv_field(reference) +
                                 "," + io::format_double(m.ssim) + "," + io::format_double(m.psnr_db) + "\n");
    art.finish("ok");
    return kOk;
}

// Registration plus both baselines on one suite setup.
int run_suite_case(Artifacts &art, const std::string &prefix, const ExperimentSetup &s, ProgressLog &log) {
    art.image(prefix + "template", s.templ);
    art.image(prefix + "target", s.target);
    io::write_isin(art.path(prefix + "data.isin"), s.data);
    const RegistrationOutcome o = run_registration(s, log.callback(s.name));
    const int code = write_registration(art, prefix, o.result, nullptr, s.templ);

    const ScalarImage f = fbp(s.data, s.grid, s.fbp_freq_scaling);
    const ScalarImage t = tv_reconstruct(s.data, s.grid, s.tv);
    art.image(prefix + "fbp", f);
    art.image(prefix + "tv", t);
    art.text(prefix + "metrics.csv", metrics_csv({{"registration", o.result_metrics},
                                                  {"template", o.template_metrics},
                                                  {"fbp", evaluate_metrics(f, s.target)},
                                                  {"tv", evaluate_metrics(t, s.target)}}));
    art.text(prefix + "components.csv", "image,components\ntemplate," + std::to_string(count_components(s.templ)) +
                                            "\ntarget," + std::to_string(count_components(s.target)) +
                                            "\nregistration," + std::to_string(count_components(o.result.deformed)) +
                                            "\n");
    return code;
}

int cmd_suite(const Globals &g, int id, bool full) {
    if (id < 1 || id > 4) {
        throw ConfigError("suite id must be 1, 2, 3 or 4");
    }
    std::ostringstream cfg;
    cfg << "suite=" << id << "\nfull=" << (full ? "true" : "false") << "\nseed=" << g.seed << "\n";
    Artifacts art(g.out, "suite", cfg.str(), g);
    ProgressLog log(g.log_csv);
    int code = kOk;

    if (id == 3) {
        const ExperimentSetup s = suite_setup(3, full, g.seed);
        art.image("template", s.templ);
        art.image("target", s.target);
        io::write_isin(art.path("data.isin"), s.data);
        std::string rows = "sigma,gamma,ssim,psnr_db,iterations,stop_reason\n";
        const auto cells = parameter_sweep(s, suite3_sigmas(), suite3_gammas(), [&](const SweepCell &c) {
            std::printf("sigma %g gamma %g ssim %.4f psnr %.2f\n", c.sigma, c.gamma, c.ssim, c.psnr_db);
            std::fflush(stdout);
            rows += io::format_double(c.sigma) + "," + io::format_double(c.gamma) + "," + io::format_double(c.ssim) +
                    "," + io::format_double(c.psnr_db) + "," + std::to_string(c.iterations) + "," +
                    to_string(c.stop_reason) + "\n";
        });
        art.text("suite3_sweep.csv", rows);
        // Same numbers in the layout of the published table: one row per sigma.
        std::string table = "sigma";
        for (double gamma : suite3_gammas()) {
            table += ",ssim_" + io::format_double(gamma) + ",psnr_" + io::format_double(gamma);
        }
        table += "\n";
        std::size_t k = 0;
        for (double sigma : suite3_sigmas()) {
            table += io::format_double(sigma);
            for (std::size_t j = 0; j < suite3_gammas().size(); ++j, ++k) {
                table += "," + io::format_double(cells[k].ssim) + "," + io::format_double(cells[k].psnr_db);
            }
            table += "\n";
        }
        art.text("suite3_table.csv", table);
    } else if (id == 4) {
        for (int variant : {0, 1}) {
            const ExperimentSetup s = suite_setup(4, full, g.seed, variant);
            code = std::max(code, run_suite_case(art, s.name + "/", s, log));
        }
    } else {
        code = run_suite_case(art, "", suite_setup(id, full, g.seed), log);
    }
    art.finish(code == kOk ? "ok" : "numerical_failure");
    return code;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Indirect image registration with LDDMM and a parallel-beam ray transform"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Globals g;
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    auto *seed_opt = app.add_option("--seed", g.seed, "Noise seed (overrides noise.seed in a config)");
    app.add_option("--threads", g.threads, "Worker threads (computation is single-threaded; recorded only)")
        ->check(CLI::PositiveNumber);
    app.add_option("--log-csv", g.log_csv, "Per-iteration objective log as CSV");

    std::function<int()> run;

    auto *phantom = app.add_subcommand("phantom", "Rasterize a phantom");
    std::string kind;
    std::size_t n = 64;
    double half_extent = 16.0;
    phantom->add_option("--kind", kind, "Phantom kind, e.g. shepp-logan or star-target")->required();
    phantom->add_option("--n", n, "Pixels per side")->capture_default_str();
    phantom->add_option("--half-extent", half_extent, "Domain is [-h, h]^2")->capture_default_str();
    phantom->callback([&] { run = [&] { return cmd_phantom(g, kind, n, half_extent); }; });

    auto *project = app.add_subcommand("project", "Ray transform of an image");
    std::string image;
    std::size_t angles = 10;
    std::size_t detectors = 92;
    project->add_option("--image", image, "Input IGRD image")->required();
    project->add_option("--angles", angles, "Number of projection angles")->capture_default_str();
    project->add_option("--detectors", detectors, "Detector cells per angle")->capture_default_str();
    project->callback([&] { run = [&] { return cmd_project(g, image, angles, detectors); }; });

    auto *noise = app.add_subcommand("noise", "Add white Gaussian noise at a given SNR");
    std::string sinogram;
    double snr = 4.87;
    noise->add_option("--sinogram", sinogram, "Input ISIN sinogram")->required();
    noise->add_option("--snr", snr, "Target SNR in dB")->capture_default_str();
    noise->callback([&] { run = [&] { return cmd_noise(g, sinogram, snr); }; });

    auto *reg = app.add_subcommand("register", "Indirect registration from an INI config");
    std::string config;
    reg->add_option("config", config, "Experiment config file")->required();
    reg->callback([&] { run = [&] { return cmd_register(g, config, app.get_option("--out")->count() > 0); }; });

    auto *fbp_cmd = app.add_subcommand("fbp", "Filtered back projection (Hamming window)");
    double freq_scaling = 0.4;
    fbp_cmd->add_option("--sinogram", sinogram, "Input ISIN sinogram")->required();
    fbp_cmd->add_option("--n", n, "Pixels per side of the reconstruction")->capture_default_str();
    fbp_cmd->add_option("--half-extent", half_extent, "Domain is [-h, h]^2")->capture_default_str();
    fbp_cmd->add_option("--freq-scaling", freq_scaling, "Cutoff as a fraction of Nyquist")->capture_default_str();
    fbp_cmd->callback([&] { run = [&] { return cmd_fbp(g, sinogram, n, half_extent, freq_scaling); }; });

    auto *tv_cmd = app.add_subcommand("tv", "Total-variation reconstruction (primal-dual)");
    double mu = 3.0;
    std::size_t iters = 1000;
    tv_cmd->add_option("--sinogram", sinogram, "Input ISIN sinogram")->required();
    tv_cmd->add_option("--n", n, "Pixels per side of the reconstruction")->capture_default_str();
    tv_cmd->add_option("--half-extent", half_extent, "Domain is [-h, h]^2")->capture_default_str();
    tv_cmd->add_option("--mu", mu, "TV weight")->capture_default_str();
    tv_cmd->add_option("--iters", iters, "Primal-dual iterations")->capture_default_str();
    tv_cmd->callback([&] { run = [&] { return cmd_tv(g, sinogram, n, half_extent, mu, iters); }; });

    auto *eval = app.add_subcommand("evaluate", "SSIM and PSNR of an image against a reference");
    std::string result;
    std::string reference;
    double range = 1.0;
    eval->add_option("--result", result, "Image to score (IGRD)")->required();
    eval->add_option("--reference", reference, "Reference image (IGRD)")->required();
    eval->add_option("--dynamic-range", range, "Dynamic range L of the images")->capture_default_str();
    eval->callback([&] { run = [&] { return cmd_evaluate(g, result, reference, range); }; });

    auto *suite = app.add_subcommand("suite", "Run one of the four test suites");
    int suite_id = 0;
    bool full = false;
    suite->add_option("id", suite_id, "Suite number 1-4")->required();
    suite->add_flag("--full", full, "Paper-scale grids instead of the downscaled defaults");
    suite->callback([&] { run = [&] { return cmd_suite(g, suite_id, full); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }
    g.seed_given = seed_opt->count() > 0;

    try {
        return run();
    } catch (const ConfigError &e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const IoError &e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kIo;
    } catch (const fs::filesystem_error &e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kIo;
    } catch (const NumericalError &e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumerical;
    }
}
