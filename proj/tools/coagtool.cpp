// Command-line driver: self-similar profile and prefactor solves,
// verification suites, representation-measure tabulation, and norm
// evaluation of stored profiles.
//
// Exit codes: 0 success, 1 usage/config error, 2 non-convergence,
// 3 numeric failure.

#include "coag/boundary.hpp"
#include "coag/config.hpp"
#include "coag/diagnostics.hpp"
#include "coag/errors.hpp"
#include "coag/kernels.hpp"
#include "coag/report.hpp"
#include "coag/solver.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>

namespace {

using namespace coag;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitNumeric = 3;

struct CliState {
    config::RunConfig cfg;
    std::string config_path;
    // flags that were explicitly set override the config file
    CLI::App* attach_common(CLI::App* cmd) {
        cmd->add_option("--kernel", cfg.kernel_family, "kernel family");
        cmd->add_option("--alpha", cfg.alpha, "singularity exponent in [0, 1/2)");
        cmd->add_option("--epsilon", cfg.epsilon, "perturbation size");
        cmd->add_option("--grid-min", cfg.grid_min, "grid lower end");
        cmd->add_option("--grid-max", cfg.grid_max, "grid upper end");
        cmd->add_option("--grid-n", cfg.grid_n, "grid size");
        cmd->add_option("--tol", cfg.tol, "solver residual tolerance");
        cmd->add_option("--max-iter", cfg.max_iter, "iteration cap");
        cmd->add_option("--damping", cfg.damping, "under-relaxation factor");
        cmd->add_option("--normalization", cfg.normalization, "decay_rate or mass");
        cmd->add_option("--theta", cfg.theta, "norm weight exponent");
        cmd->add_option("--seed", cfg.seed, "rng seed for test families");
        cmd->add_option("--output", cfg.output_dir, "output directory");
        cmd->add_option("--config", config_path, "flat key=value config file");
        return cmd;
    }

    // config file first (if given), then re-apply explicit CLI flags by
    // re-parsing: CLI11 already wrote flag values into cfg, so the file
    // must not clobber them.  Parse order: defaults -> file -> flags.
    void merge_file(CLI::App* cmd) {
        if (config_path.empty()) return;
        config::RunConfig file_cfg; // defaults
        config::apply_kv(file_cfg, config::parse_kv_file(config_path));
        // fields whose CLI option was not seen take the file value
        auto seen = [&](const std::string& name) { return cmd->count(name) > 0; };
        if (!seen("--kernel")) cfg.kernel_family = file_cfg.kernel_family;
        if (!seen("--alpha")) cfg.alpha = file_cfg.alpha;
        if (!seen("--epsilon")) cfg.epsilon = file_cfg.epsilon;
        if (!seen("--grid-min")) cfg.grid_min = file_cfg.grid_min;
        if (!seen("--grid-max")) cfg.grid_max = file_cfg.grid_max;
        if (!seen("--grid-n")) cfg.grid_n = file_cfg.grid_n;
        if (!seen("--tol")) cfg.tol = file_cfg.tol;
        if (!seen("--max-iter")) cfg.max_iter = file_cfg.max_iter;
        if (!seen("--damping")) cfg.damping = file_cfg.damping;
        if (!seen("--normalization")) cfg.normalization = file_cfg.normalization;
        if (!seen("--theta")) cfg.theta = file_cfg.theta;
        if (!seen("--seed")) cfg.seed = file_cfg.seed;
        if (!seen("--output")) cfg.output_dir = file_cfg.output_dir;
    }
};

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir + "/" + name;
}

int cmd_solve_profile(CliState& st) {
    st.cfg.validate();
    auto spec = st.cfg.kernel_spec();
    auto grid = st.cfg.grid();
    auto opts = st.cfg.solver_options();
    auto [f, rep] = solver::solve_selfsim(spec, solver::default_init(grid), opts);

    f.to_csv(join_path(st.cfg.output_dir, "profile.csv"));
    nlohmann::json j{{"config", report::to_json(st.cfg)}, {"report", report::to_json(rep)}};
    if (spec.epsilon > 0.0 && spec.alpha > 0.0) {
        auto fit = boundary::nearzero_fit(spec, f);
        j["boundary_layer"] = {{"beta_f", fit.beta_f},
                               {"layer_const", fit.layer_const},
                               {"plateau_spread", fit.plateau_spread}};
    }
    report::write_text(join_path(st.cfg.output_dir, "profile_report.json"), j.dump(2) + "\n");
    return rep.converged ? kExitOk : kExitNoConvergence;
}

int cmd_solve_prefactor(CliState& st, double init_const) {
    st.cfg.validate();
    if (!(init_const > 0.0)) throw ConfigError("init", "initial constant must be positive");
    auto spec = st.cfg.kernel_spec();
    auto grid = st.cfg.grid();
    auto opts = st.cfg.solver_options();
    auto res = solver::solve_prefactor(spec, std::vector<double>(grid.n, init_const), grid, opts);

    std::string csv = "x,mu\n";
    char buf[96];
    for (int i = 0; i < grid.n; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", grid.nodes[i], res.mu[i]);
        csv += buf;
    }
    report::write_text(join_path(st.cfg.output_dir, "prefactor.csv"), csv);
    nlohmann::json j{{"config", report::to_json(st.cfg)},
                     {"report", report::to_json(res.report)},
                     {"d_star", res.d_star},
                     {"D_star", res.D_star}};
    report::write_text(join_path(st.cfg.output_dir, "prefactor_report.json"), j.dump(2) + "\n");
    return res.report.converged ? kExitOk : kExitNoConvergence;
}

int cmd_verify(CliState& st, const std::string& suites_arg) {
    st.cfg.validate();
    if (suites_arg.empty()) {
        std::cerr << "error: --suites requires a non-empty list\n";
        return kExitUsage;
    }
    std::vector<std::string> suites;
    std::string cur;
    for (char c : suites_arg + ",") {
        if (c == ',') {
            if (!cur.empty()) suites.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    const double alpha = st.cfg.alpha > 0.0 ? st.cfg.alpha : 0.25;
    const double theta = st.cfg.theta > 0.0 ? st.cfg.theta : 0.5 * (alpha + 0.5);

    std::vector<diagnostics::CheckRecord> records;
    for (auto& s : suites) {
        if (s == "norms") {
            auto fam = diagnostics::make_test_family(st.cfg.seed, 20);
            auto r = diagnostics::run_norm_suite(fam, theta);
            records.insert(records.end(), r.begin(), r.end());
        } else if (s == "operator") {
            auto r = diagnostics::run_operator_suite(theta);
            records.insert(records.end(), r.begin(), r.end());
        } else if (s == "kernel") {
            std::vector<double> alphas = st.cfg.alpha > 0.0
                                             ? std::vector<double>{st.cfg.alpha}
                                             : std::vector<double>{0.1, 0.25, 0.4};
            auto r = diagnostics::run_kernel_suite(alphas, theta);
            records.insert(records.end(), r.begin(), r.end());
        } else if (s == "uniqueness") {
            auto opts = st.cfg.solver_options();
            auto r = diagnostics::run_uniqueness_suite(alpha, {0.025, 0.05, 0.1}, opts);
            records.insert(records.end(), r.begin(), r.end());
        } else {
            std::cerr << "error: unknown suite '" << s << "'\n";
            return kExitUsage;
        }
    }
    nlohmann::json j{{"config", report::to_json(st.cfg)},
                     {"records", report::to_json(records)}};
    report::write_text(join_path(st.cfg.output_dir, "evidence.json"), j.dump(2) + "\n");
    report::write_check_csv(join_path(st.cfg.output_dir, "evidence.csv"), records);
    for (auto& r : records) {
        const char* status = r.status == diagnostics::CheckRecord::Status::pass ? "pass"
                             : r.status == diagnostics::CheckRecord::Status::fail ? "FAIL"
                                                                                  : "inconclusive";
        std::printf("%-34s %-12s measured=%.6g threshold=%.6g\n", r.name.c_str(), status,
                    r.measured, r.threshold);
    }
    return diagnostics::any_hard_fail(records) ? kExitNoConvergence : kExitOk;
}

int cmd_gamma(CliState& st) {
    st.cfg.validate();
    const double alpha = st.cfg.alpha > 0.0 ? st.cfg.alpha : 0.25;
    auto repr = kernels::gamma_closed_form(alpha);
    auto spec = kernels::make_kernel(kernels::Family::power, 1.0, alpha);

    char buf[160];
    std::snprintf(buf, sizeof buf, "# diag_coeff = %.17g, alpha = %.17g\n", repr.diag_coeff,
                  alpha);
    std::string csv = buf;
    csv += "xi,eta,gamma_regular,route_abs_diff\n";
    for (int i = 0; i <= 12; ++i) {
        double xi = std::pow(10.0, -1.0 + 2.0 * i / 12.0);
        for (int j = 0; j <= 12; ++j) {
            double eta = std::pow(10.0, -1.0 + 2.0 * j / 12.0);
            double g = repr.regular(xi, eta);
            double jump_route = kernels::gamma_jump(spec, xi / eta) / eta;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", xi, eta, g,
                          std::fabs(g - jump_route));
            csv += buf;
        }
    }
    report::write_text(join_path(st.cfg.output_dir, "gamma.csv"), csv);
    return kExitOk;
}

int cmd_norms(CliState& st, const std::string& input) {
    st.cfg.validate();
    auto f = profiles::Profile::from_csv(input);
    auto L = laplace::transform(f);
    const double alpha = st.cfg.alpha;
    const double theta = st.cfg.theta > 0.0 ? st.cfg.theta : 0.5 * (alpha + 0.5);
    nlohmann::json arr = nlohmann::json::array();
    for (int k = 0; k <= 2; ++k) {
        auto nr = laplace::seminorm(L, k, theta);
        arr.push_back(report::to_json(nr));
        std::printf("k=%d chi=%.6g value=%.12g argmax_p=%.6g%s\n", k, theta, nr.value,
                    nr.argmax_p, nr.boundary ? " (boundary)" : "");
    }
    nlohmann::json j{{"config", report::to_json(st.cfg)}, {"norms", arr}};
    report::write_text(join_path(st.cfg.output_dir, "norms.json"), j.dump(2) + "\n");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-similar coagulation profile toolkit"};
    app.require_subcommand(1);
    CliState st;

    auto* sp = st.attach_common(app.add_subcommand("solve-profile",
                                                   "solve the self-similar profile equation"));
    double init_const = 1.0;
    auto* spre = st.attach_common(app.add_subcommand("solve-prefactor",
                                                     "solve the large-size prefactor equation"));
    spre->add_option("--init-const", init_const, "constant initial state");
    std::string suites;
    auto* sv = st.attach_common(app.add_subcommand("verify", "run verification suites"));
    sv->add_option("--suites", suites, "comma list: norms,operator,kernel,uniqueness")
        ->required();
    auto* sg = st.attach_common(app.add_subcommand("gamma", "tabulate the representation measure"));
    std::string input;
    auto* sn = st.attach_common(app.add_subcommand("norms", "weighted norms of a stored profile"));
    sn->add_option("--input", input, "profile csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sp->parsed()) {
            st.merge_file(sp);
            return cmd_solve_profile(st);
        }
        if (spre->parsed()) {
            st.merge_file(spre);
            return cmd_solve_prefactor(st, init_const);
        }
        if (sv->parsed()) {
            st.merge_file(sv);
            return cmd_verify(st, suites);
        }
        if (sg->parsed()) {
            st.merge_file(sg);
            return cmd_gamma(st);
        }
        if (sn->parsed()) {
            st.merge_file(sn);
            return cmd_norms(st, input);
        }
    } catch (const coag::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const coag::DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const coag::NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what()
                  << " (achieved " << e.achieved_estimate << ")\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
