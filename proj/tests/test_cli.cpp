#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "ct/cli.hpp"
#include "ct/errors.hpp"
#include "ct/imageio.hpp"

using namespace ct;
namespace fs = std::filesystem;

namespace {

const std::string kSource = std::string(CT_FIXTURE_DIR) + "/source_32.ppm";
const std::string kExample = std::string(CT_FIXTURE_DIR) + "/example_48.ppm";

std::vector<std::string> base_args() {
    return {"--source", kSource, "--example", kExample, "--out-dir", "out"};
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("ct_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("defaults") {
    CliArgs args = parse_args(base_args());
    CHECK(args.source == kSource);
    CHECK(args.example == kExample);
    CHECK(args.out_dir == "out");
    CHECK(args.cfg.mu == doctest::Approx(0.003).epsilon(1e-15));
    CHECK(args.cfg.alpha == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(args.cfg.sigma2_init == doctest::Approx(5.0e-4).epsilon(1e-15));
    CHECK(args.cfg.q_max == 50);
    CHECK(args.cfg.k_nn == 10);
    CHECK(args.cfg.save_every == 1);
    CHECK(args.cfg.threads == 1);
    CHECK(args.metrics == false);
    CHECK(args.mode == PosteriorMode::kTruncated);
}

TEST_CASE("flags override defaults") {
    auto argv = base_args();
    for (const auto& extra : {"--mu", "0.001", "--alpha", "0.5", "--sigma2", "2.5",
                              "--iters", "12", "--knn", "6", "--save-every", "3",
                              "--threads", "2", "--mode", "full"}) {
        argv.push_back(extra);
    }
    argv.push_back("--metrics");
    CliArgs args = parse_args(argv);
    CHECK(args.cfg.mu == doctest::Approx(0.001).epsilon(1e-15));
    CHECK(args.cfg.alpha == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(args.cfg.sigma2_init == doctest::Approx(2.5e-4).epsilon(1e-15));
    CHECK(args.cfg.q_max == 12);
    CHECK(args.cfg.k_nn == 6);
    CHECK(args.cfg.save_every == 3);
    CHECK(args.cfg.threads == 2);
    CHECK(args.metrics == true);
    CHECK(args.mode == PosteriorMode::kFull);
}

TEST_CASE("usage errors name the offending flag") {
    auto reject = [](std::vector<std::string> argv, const std::string& needle) {
        try {
            parse_args(argv);
            FAIL("expected UsageError for ", needle);
        } catch (const UsageError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    reject({"--example", kExample, "--out-dir", "out"}, "--source");
    auto with = [&](const char* flag, const char* value) {
        auto argv = base_args();
        argv.push_back(flag);
        argv.push_back(value);
        return argv;
    };
    reject(with("--alpha", "1.5"), "--alpha");
    reject(with("--alpha", "0"), "--alpha");
    reject(with("--mu", "-0.1"), "--mu");
    reject(with("--iters", "0"), "--iters");
    reject(with("--iters", "1000"), "--iters");
    reject(with("--knn", "0"), "--knn");
    reject(with("--save-every", "0"), "--save-every");
    reject(with("--sigma2", "0.005"), "--sigma2");
    reject(with("--threads", "-2"), "--threads");
    reject(with("--mode", "both"), "--mode");
    reject(with("--frobnicate", "1"), "--frobnicate");
}

TEST_CASE("help is not an error") {
    CHECK_THROWS_AS(parse_args({"--help"}), HelpRequested);
    try {
        parse_args({"--help"});
    } catch (const HelpRequested& h) {
        CHECK(std::string(h.what()).find("--source") != std::string::npos);
    }
}

TEST_CASE("config file supplies defaults, flags win") {
    fs::path cfg_path = fs::temp_directory_path() / "ct_cli_config.txt";
    std::ofstream(cfg_path) << "mu=0.001\nalpha=0.25\n";

    auto argv = base_args();
    argv.push_back("--config");
    argv.push_back(cfg_path.string());
    CliArgs from_file = parse_args(argv);
    CHECK(from_file.cfg.mu == doctest::Approx(0.001).epsilon(1e-15));
    CHECK(from_file.cfg.alpha == doctest::Approx(0.25).epsilon(1e-15));

    argv.push_back("--mu");
    argv.push_back("0.005");
    CliArgs overridden = parse_args(argv);
    CHECK(overridden.cfg.mu == doctest::Approx(0.005).epsilon(1e-15));
    CHECK(overridden.cfg.alpha == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("pipeline writes frames, trace and metrics") {
    fs::path dir = fresh_dir("pipeline");
    CliArgs args;
    args.source = kSource;
    args.example = kExample;
    args.out_dir = dir.string();
    args.metrics = true;
    args.cfg.q_max = 2;

    run_pipeline(args);

    CHECK(fs::exists(dir / "frame_q000.png"));
    CHECK(fs::exists(dir / "frame_q001.png"));
    CHECK(fs::exists(dir / "frame_q002.png"));
    CHECK(!fs::exists(dir / "frame_q003.png"));
    CHECK(fs::exists(dir / "metrics.json"));

    // q0 is the source echo, bit-exact through the PNG round trip.
    RgbImage source = load_image(kSource);
    CHECK(load_image(dir / "frame_q000.png") == source);

    std::string csv = slurp(dir / "nll_trace.csv");
    CHECK(csv.rfind("q,nll\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + q0..q2

    std::string json = slurp(dir / "metrics.json");
    CHECK(json.find("\"q\": 0") != std::string::npos);
    CHECK(json.find("\"q\": 2") != std::string::npos);
    CHECK(json.find("\"psnr\": null") != std::string::npos);  // q0 vs itself
}

TEST_CASE("pipeline respects save cadence") {
    fs::path dir = fresh_dir("cadence");
    CliArgs args;
    args.source = kSource;
    args.example = kExample;
    args.out_dir = dir.string();
    args.cfg.q_max = 4;
    args.cfg.save_every = 2;

    run_pipeline(args);
    CHECK(fs::exists(dir / "frame_q000.png"));
    CHECK(!fs::exists(dir / "frame_q001.png"));
    CHECK(fs::exists(dir / "frame_q002.png"));
    CHECK(!fs::exists(dir / "frame_q003.png"));
    CHECK(fs::exists(dir / "frame_q004.png"));
}

TEST_CASE("cli_main reports pipeline failures") {
    CliArgs args;
    args.source = std::string(CT_FIXTURE_DIR) + "/does_not_exist.ppm";
    args.example = kExample;
    args.out_dir = (fs::temp_directory_path() / "ct_cli_fail").string();
    args.cfg.q_max = 1;
    CHECK(cli_main(args) == 1);
}

}  // TEST_SUITE
