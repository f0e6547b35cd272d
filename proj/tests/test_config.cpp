#include "doctest.h"

#include <cmath>
#include <string>

#include "ireg/error.hpp"
#include "ireg/experiment_config.hpp"

using namespace ireg;

namespace {

std::string error_of(const std::string &text) {
    try {
        parse_experiment_config(text);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("a full config parses into every field") {
    const ExperimentConfig c = parse_experiment_config(R"(
; comment
[phantom]
template = shepp-logan-missing
target = shepp-logan-extra
[grid]
n = 48
half_extent = 8
[geometry]
n_angles = 6
n_detectors = 40
[noise]
snr_db = inf
seed = 99
[registration]
gamma = 1e-5
sigma = 2.5
alpha = 0.04
n_steps = 10
max_iters = 7
grad_tol = 0.5
action = mass-preserving
backtracking = true
[baselines]
fbp_freq_scaling = 0.5
tv_mu = 1
tv_iters = 20
[output]
dir = results/a
)");
    CHECK(c.template_kind == PhantomKind::SheppLoganMissingObject);
    CHECK(c.target_kind == PhantomKind::SheppLoganExtraObject);
    CHECK(c.n == 48);
    CHECK(c.half_extent == 8.0);
    CHECK(c.n_angles == 6);
    CHECK(c.n_detectors == 40);
    CHECK(std::isinf(c.snr_db));
    CHECK(c.noise_seed == 99);
    CHECK(c.registration.gamma == 1e-5);
    CHECK(c.registration.sigma == 2.5);
    CHECK(c.registration.alpha == 0.04);
    CHECK(c.registration.n_steps == 10);
    CHECK(c.registration.max_iters == 7);
    CHECK(c.registration.grad_tol == 0.5);
    CHECK(c.registration.action == GroupAction::MassPreserving);
    CHECK(c.registration.backtracking);
    CHECK(c.fbp_freq_scaling == 0.5);
    CHECK(c.tv_mu == 1.0);
    CHECK(c.tv_iters == 20);
    CHECK(c.output_dir == "results/a");
}

TEST_CASE("an empty config yields the suite 1 defaults") {
    const ExperimentConfig c = parse_experiment_config("");
    CHECK(c.n == 64);
    CHECK(c.n_detectors == 92);
    CHECK(c.snr_db == 4.87);
    CHECK(c.registration.sigma == 6.0);
    CHECK(c.registration.n_steps == 20);
}

TEST_CASE("errors name the offending key") {
    CHECK(error_of("[registration]\nsigma = 0\n").find("registration.sigma") != std::string::npos);
    CHECK(error_of("[registration]\nsigma = abc\n").find("registration.sigma") != std::string::npos);
    CHECK(error_of("[registration]\nsigma = 1x\n").find("registration.sigma") != std::string::npos);
    CHECK(error_of("[registration]\nn_steps = -3\n").find("registration.n_steps") != std::string::npos);
    CHECK(error_of("[registration]\naction = twist\n").find("registration.action") != std::string::npos);
    CHECK(error_of("[registration]\nbacktracking = maybe\n").find("registration.backtracking") != std::string::npos);
    CHECK(error_of("[phantom]\ntemplate = cat\n").find("phantom.template") != std::string::npos);
    CHECK(error_of("[grid]\nn = 2\n").find("grid.n") != std::string::npos);
    CHECK(error_of("[geometry]\nn_detectors = 2\n").find("geometry.n_detectors") != std::string::npos);
    CHECK(error_of("[baselines]\nfbp_freq_scaling = 1.5\n").find("baselines.fbp_freq_scaling") != std::string::npos);
    CHECK(error_of("[baselines]\ntv_mu = 0\n").find("baselines.tv_mu") != std::string::npos);
}

TEST_CASE("unknown keys and sections are rejected") {
    CHECK(error_of("[grid]\nsize = 64\n").find("grid.size") != std::string::npos);
    CHECK(error_of("[gird]\nn = 64\n").find("gird.n") != std::string::npos);
    CHECK(error_of("n = 64\n").find("section") != std::string::npos);
    CHECK(error_of("[grid\nn = 64\n").find("malformed") != std::string::npos);
    CHECK(error_of("[grid]\nn = 64\nn = 32\n").find("malformed") != std::string::npos);
    CHECK_NOTHROW(parse_experiment_config("[output]\n"));
}

TEST_CASE("the canonical text ignores formatting and drives the hash") {
    const ExperimentConfig a = parse_experiment_config("[registration]\nsigma = 2.0\n\n[grid]\nn = 32\n");
    const ExperimentConfig b = parse_experiment_config("[grid]\nn=32\n[registration]\nsigma=2\n");
    CHECK(a.canonical_text() == b.canonical_text());
    CHECK(fnv1a64(a.canonical_text()) == fnv1a64(b.canonical_text()));
    const ExperimentConfig c = parse_experiment_config("[grid]\nn=32\n[registration]\nsigma=2.5\n");
    CHECK(fnv1a64(a.canonical_text()) != fnv1a64(c.canonical_text()));
}

TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
