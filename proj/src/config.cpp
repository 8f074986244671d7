#include "coag/config.hpp"
#include "coag/errors.hpp"

#include <fstream>
#include <sstream>

namespace coag::config {

void RunConfig::validate() const {
    if (kernel_family != "constant" && kernel_family != "power" && kernel_family != "brownian" &&
        kernel_family != "custom")
        throw ConfigError("kernel.family", "unknown family '" + kernel_family + "'");
    if (!(alpha >= 0.0 && alpha < 0.5))
        throw ConfigError("kernel.alpha", "must lie in [0, 1/2)");
    if (epsilon < 0.0) throw ConfigError("kernel.epsilon", "must be nonnegative");
    if (!(grid_min > 0.0 && grid_min < 1.0)) throw ConfigError("grid.x_min", "must be in (0, 1)");
    if (!(grid_max > 1.0)) throw ConfigError("grid.x_max", "must exceed 1");
    if (grid_n < 8) throw ConfigError("grid.n", "must be at least 8");
    if (max_iter <= 0) throw ConfigError("solver.max_iter", "must be positive");
    if (!(tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
    if (!(damping > 0.0 && damping <= 1.0))
        throw ConfigError("solver.damping", "must be in (0, 1]");
    if (normalization != "decay_rate" && normalization != "mass")
        throw ConfigError("solver.normalization", "must be decay_rate or mass");
    if (theta != 0.0 && !(theta > alpha && theta < 0.5))
        throw ConfigError("theta", "must lie in (alpha, 1/2)");
}

kernels::KernelSpec RunConfig::kernel_spec() const {
    return kernels::make_kernel(kernels::family_from_string(kernel_family), epsilon, alpha);
}

profiles::Grid RunConfig::grid() const {
    return profiles::Grid::log_uniform(grid_min, grid_max, grid_n);
}

solver::SolverOptions RunConfig::solver_options() const {
    solver::SolverOptions o;
    o.max_iter = max_iter;
    o.tol = tol;
    o.damping = damping;
    o.normalization = normalization == "mass" ? solver::Normalization::mass
                                              : solver::Normalization::decay_rate;
    o.theta = theta;
    return o;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string t = trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "line " + std::to_string(lineno) + " has no '='");
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
    auto as_double = [](const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError(key, "expected a number, got '" + v + "'");
        }
    };
    auto as_int = [&](const std::string& key, const std::string& v) {
        double d = as_double(key, v);
        return static_cast<int>(d);
    };
    for (auto& [key, value] : kv) {
        if (key == "kernel.family") cfg.kernel_family = value;
        else if (key == "kernel.alpha") cfg.alpha = as_double(key, value);
        else if (key == "kernel.epsilon") cfg.epsilon = as_double(key, value);
        else if (key == "grid.x_min") cfg.grid_min = as_double(key, value);
        else if (key == "grid.x_max") cfg.grid_max = as_double(key, value);
        else if (key == "grid.n") cfg.grid_n = as_int(key, value);
        else if (key == "solver.max_iter") cfg.max_iter = as_int(key, value);
        else if (key == "solver.tol") cfg.tol = as_double(key, value);
        else if (key == "solver.damping") cfg.damping = as_double(key, value);
        else if (key == "solver.normalization") cfg.normalization = value;
        else if (key == "theta") cfg.theta = as_double(key, value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_double(key, value));
        else throw ConfigError(key, "unknown configuration key");
    }
}

} // namespace coag::config
