#include "osa/config.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>

using namespace osa;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidParam;
}

std::string message_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("parser accepts the documented subset") {
    const ConfigFile cfg = ConfigFile::parse_string(
        "# experiment manifest\n"
        "[system]\n"
        "a = -1.0   # pole\n"
        "label = \"baseline # run\"\n"
        "flag = true\n"
        "\n"
        "[sweep]\n"
        "snr = [0, 2.5, 5]\n",
        "inline");
    CHECK(cfg.get_double("system", "a") == -1.0);
    CHECK(cfg.get_string("system", "label") == "baseline # run");
    CHECK(cfg.get_bool("system", "flag"));
    const std::vector<double> snr = cfg.get_double_list("sweep", "snr");
    REQUIRE(snr.size() == 3);
    CHECK(snr[1] == 2.5);
    CHECK(cfg.has("system", "a"));
    CHECK_FALSE(cfg.has("system", "missing"));
    CHECK_FALSE(cfg.has("nosection", "a"));
}

TEST_CASE("parser errors carry origin and line number") {
    CHECK(message_of([] {
              ConfigFile::parse_string("[system]\nq 0.5\n", "bad.toml");
          }).find("bad.toml:2") != std::string::npos);
    CHECK(message_of([] {
              ConfigFile::parse_string("q = 0.5\n", "bad.toml");
          }).find("outside any [section]") != std::string::npos);
    CHECK(message_of([] {
              ConfigFile::parse_string("[system]\nq = 1\nq = 2\n", "bad.toml");
          }).find("duplicate key 'system.q'") != std::string::npos);
    CHECK(message_of([] {
              ConfigFile::parse_string("[system\nq = 1\n", "bad.toml");
          }).find("unterminated") != std::string::npos);
    CHECK(code_of([] { ConfigFile::parse_string("[s]\nk =\n", "o"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { ConfigFile::parse_file("/nonexistent/path.toml"); }) ==
          ErrorCode::ConfigError);
}

TEST_CASE("typed getters validate") {
    const ConfigFile cfg = ConfigFile::parse_string(
        "[s]\nnum = 1.5\nneg = -3\nword = hello\n", "t");
    CHECK(cfg.get_double("s", "num") == 1.5);
    CHECK(cfg.get_int("s", "neg") == -3);
    CHECK(message_of([&] { cfg.get_double("s", "word"); }).find("[s] word") !=
          std::string::npos);
    CHECK(code_of([&] { cfg.get_u64("s", "neg"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { cfg.get_bool("s", "num"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { cfg.get_double("s", "missing"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { cfg.get_double("missing", "num"); }) == ErrorCode::ConfigError);
}

TEST_CASE("load_experiment with the continuous form") {
    const ConfigFile file = ConfigFile::parse_string(
        "[system]\n"
        "a = -2.0\n"
        "b = 1.0\n"
        "c = 1.0\n"
        "tau = 0.5\n"
        "sigma = 0.4\n"
        "[run]\n"
        "runs = 100\n"
        "bits = 64\n"
        "seed = 9\n"
        "[grid]\n"
        "n = 801\n"
        "tol = 1e-4\n",
        "t");
    const ExperimentConfig cfg = load_experiment(file);
    CHECK(cfg.has_continuous);
    CHECK(cfg.system.q == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(cfg.system.w == doctest::Approx(0.5 * (1.0 - std::exp(-1.0))).epsilon(1e-15));
    CHECK(cfg.system.sigma == 0.4);
    CHECK(cfg.sigma_given);
    CHECK(cfg.run.num_runs == 100);
    CHECK(cfg.run.num_bits == 64);
    CHECK(cfg.run.seed == 9);
    CHECK(cfg.grid.n == 801);
    CHECK(cfg.grid.tol == 1e-4);
    CHECK(cfg.grid.max_iter == 20'000'000);

    SUBCASE("system_for_a rediscretizes") {
        const DiscreteSystem alt = cfg.system_for_a(-1.0);
        CHECK(alt.q == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
        CHECK(alt.w == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-15));
    }
}

TEST_CASE("load_experiment with the discrete form") {
    const ConfigFile file = ConfigFile::parse_string(
        "[system]\nq = 0.5\nw = 0.25\nc = -2.0\nsnr_db = 6.0\n", "t");
    const ExperimentConfig cfg = load_experiment(file);
    CHECK_FALSE(cfg.has_continuous);
    CHECK(cfg.system.q == 0.5);
    CHECK(cfg.system.w == 0.25);
    CHECK(cfg.system.c == -2.0);
    CHECK(cfg.sigma_given);
    CHECK(snr_db(cfg.system) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(code_of([&] { cfg.system_for_a(-1.0); }) == ErrorCode::ConfigError);
}

TEST_CASE("load_experiment rejections") {
    CHECK(code_of([] {
              load_experiment(ConfigFile::parse_string("[system]\na = -1\nq = 0.5\n", "t"));
          }) == ErrorCode::ConfigError);
    CHECK(code_of([] {
              load_experiment(
                  ConfigFile::parse_string("[system]\nsigma = 1\nsnr_db = 6\n", "t"));
          }) == ErrorCode::ConfigError);
    CHECK(code_of([] {
              load_experiment(ConfigFile::parse_string("[system]\nq = 1.5\nw = 1\n", "t"));
          }) == ErrorCode::InvalidParam);
    CHECK(code_of([] {
              load_experiment(ConfigFile::parse_string("[system]\na = 1.0\n", "t"));
          }) == ErrorCode::InvalidParam);
    CHECK(code_of([] {
              load_experiment(ConfigFile::parse_string("[grid]\nn = 2\n", "t"));
          }) == ErrorCode::ConfigError);
    CHECK(code_of([] {
              load_experiment(ConfigFile::parse_string("[grid]\ntol = 0\n", "t"));
          }) == ErrorCode::ConfigError);
}

TEST_CASE("defaults") {
    const ExperimentConfig cfg = default_experiment();
    CHECK(cfg.system.q == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(cfg.system.w == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(cfg.system.c == 1.0);
    CHECK(cfg.system.sigma == 1.0);
    CHECK_FALSE(cfg.sigma_given);
    CHECK(cfg.run.num_runs == 2000);
    CHECK(cfg.run.num_bits == 320);
    CHECK(cfg.grid.n == 4001);
    CHECK(cfg.grid.tol == 1e-5);

    const std::vector<double> snr = cfg.snr_list();
    REQUIRE(snr.size() == 8);
    CHECK(snr.front() == 0.0);
    CHECK(snr.back() == 14.0);

    SUBCASE("explicit sweep list wins") {
        const ConfigFile file =
            ConfigFile::parse_string("[sweep]\nsnr = [1, 3]\na = [-2, -1]\n", "t");
        const ExperimentConfig c = load_experiment(file);
        CHECK(c.snr_list() == std::vector<double>{1.0, 3.0});
        CHECK(c.sweep.a_values == std::vector<double>{-2.0, -1.0});
    }
    SUBCASE("sweep range string") {
        const ConfigFile file =
            ConfigFile::parse_string("[sweep]\nsnr = \"0..6 step 3\"\n", "t");
        CHECK(load_experiment(file).snr_list() == std::vector<double>{0.0, 3.0, 6.0});
    }
}

TEST_CASE("parse_snr_spec") {
    CHECK(parse_snr_spec("6") == std::vector<double>{6.0});
    CHECK(parse_snr_spec("-20, -10,0") == std::vector<double>{-20.0, -10.0, 0.0});
    CHECK(parse_snr_spec("0..14 step 2") ==
          std::vector<double>{0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0});
    CHECK(parse_snr_spec("-20..20 step 5").size() == 9);
    // Endpoint included despite rounding in step accumulation.
    CHECK(parse_snr_spec("0..1 step 0.1").size() == 11);
    CHECK(parse_snr_spec("2..2 step 1") == std::vector<double>{2.0});

    CHECK(code_of([] { parse_snr_spec("0..10"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { parse_snr_spec("10..0 step 2"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { parse_snr_spec("0..10 step 0"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { parse_snr_spec("abc"); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { parse_snr_spec(""); }) == ErrorCode::ConfigError);
}

} // TEST_SUITE
