#pragma once

#include "coag/kernels.hpp"
#include "coag/profiles.hpp"
#include "coag/solver.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace coag::config {

/// Resolved run configuration.  Populated from defaults, then a flat
/// `section.key = value` config file, then command-line flags (strongest).
struct RunConfig {
    std::string kernel_family = "constant";
    double alpha = 0.0;
    double epsilon = 0.0;

    double grid_min = 1e-4;
    double grid_max = 40.0;
    int grid_n = 600;

    int max_iter = 400;
    double tol = 1e-8;
    double damping = 0.5;
    std::string normalization = "decay_rate";

    double theta = 0.0; // 0: (alpha + 1/2)/2
    std::string output_dir = ".";
    std::uint64_t seed = 1;

    void validate() const; // throws ConfigError naming the offending key

    kernels::KernelSpec kernel_spec() const;
    profiles::Grid grid() const;
    solver::SolverOptions solver_options() const;
};

/// Flat key-value file: `section.key = value`, '#' comments, blank lines ok.
std::map<std::string, std::string> parse_kv_file(const std::string& path);

/// Applies file values onto a config (unknown keys throw ConfigError).
void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv);

} // namespace coag::config
