#include "coag/config.hpp"
#include "coag/errors.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace coag;

TEST_CASE("config defaults validate") {
    config::RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.grid().n == 600);
    CHECK(cfg.solver_options().damping == 0.5);
}

TEST_CASE("config file parsing and overrides") {
    std::string path = "test_cfg.tmp";
    {
        std::ofstream out(path);
        out << "# comment line\n"
               "kernel.family = power\n"
               "kernel.alpha = 0.25   # trailing comment\n"
               "kernel.epsilon = 0.1\n"
               "grid.n = 300\n"
               "solver.tol = 1e-7\n";
    }
    config::RunConfig cfg;
    config::apply_kv(cfg, config::parse_kv_file(path));
    CHECK(cfg.kernel_family == "power");
    CHECK(cfg.alpha == 0.25);
    CHECK(cfg.epsilon == 0.1);
    CHECK(cfg.grid_n == 300);
    CHECK(cfg.tol == 1e-7);
    CHECK_NOTHROW(cfg.validate());
    std::remove(path.c_str());
}

TEST_CASE("validation names the offending key") {
    config::RunConfig cfg;
    cfg.alpha = 0.6;
    try {
        cfg.validate();
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.key == "kernel.alpha");
    }
    cfg.alpha = 0.2;
    cfg.damping = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("unknown keys are rejected") {
    config::RunConfig cfg;
    CHECK_THROWS_AS(config::apply_kv(cfg, {{"solver.bogus", "1"}}), ConfigError);
    CHECK_THROWS_AS(config::apply_kv(cfg, {{"kernel.alpha", "abc"}}), ConfigError);
}

TEST_CASE("theta window depends on alpha") {
    config::RunConfig cfg;
    cfg.kernel_family = "power";
    cfg.alpha = 0.3;
    cfg.theta = 0.2; // below alpha
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.theta = 0.4;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.solver_options().resolved_theta(cfg.alpha) == 0.4);
    cfg.theta = 0.0;
    CHECK(cfg.solver_options().resolved_theta(cfg.alpha) == doctest::Approx(0.4));
}
