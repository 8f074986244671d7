#include "coag/solver.hpp"
#include "coag/bilinear.hpp"
#include "coag/errors.hpp"
#include "coag/specfun.hpp"

#include <doctest.h>

#include <cmath>

using namespace coag;
using kernels::Family;
using profiles::Grid;
using profiles::Profile;

namespace {

Grid default_grid() { return Grid::log_uniform(1e-4, 40.0, 600); }

solver::SolverOptions default_opts() {
    solver::SolverOptions o;
    o.tol = 1e-8;
    o.max_iter = 400;
    return o;
}

} // namespace

TEST_CASE("constant kernel converges to the unit exponential") {
    auto spec = kernels::make_kernel(Family::constant, 0.0);
    Grid g = default_grid();
    auto [f, rep] = solver::solve_selfsim(spec, solver::default_init(g), default_opts());
    REQUIRE(rep.converged);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double ref = std::exp(-g.nodes[i]);
        worst = std::max(worst, std::fabs(f.values()[i] - ref) / ref);
    }
    CHECK(worst < 1e-6);
    CHECK(std::fabs(rep.kappa) < 1e-8);
    CHECK(rep.clip_count == 0);
}

TEST_CASE("starting at the fixed point stops immediately") {
    auto spec = kernels::make_kernel(Family::constant, 0.0);
    Grid g = default_grid();
    Profile exact = Profile::from_function(g, [](double x) { return std::exp(-x); });
    auto [f, rep] = solver::solve_selfsim(spec, exact, default_opts());
    CHECK(rep.converged);
    CHECK(rep.iterations <= 1);
}

TEST_CASE("singular perturbation: boundary layer and decay normalization") {
    auto spec = kernels::make_kernel(Family::power, 0.1, 0.25);
    Grid g = default_grid();
    auto [f, rep] = solver::solve_selfsim(spec, solver::default_init(g), default_opts());
    REQUIRE(rep.converged);
    CHECK(f.fit_decay_rate() == doctest::Approx(1.0).epsilon(1e-3));
    // suppression near the origin relative to x = 1
    double f_at_1 = f.eval(1.0);
    CHECK(f.values()[0] < 0.1 * f_at_1);
    // converged profile satisfies the equation pointwise (weighted)
    auto mu = f.mu_fn();
    bilinear::BilinearEvaluator ev(spec, mu, g.x_max * 1.0000001);
    double worst = 0.0;
    for (int i = 0; i < g.n; i += 13) {
        double x = g.nodes[i];
        double lhs = mu(x), rhs = ev.bk(mu, x);
        double w = std::min(1.0, x * x);
        worst = std::max(worst, w * std::fabs(lhs - rhs) / (std::fabs(lhs) + 1e-12));
    }
    CHECK(worst < 10.0 * default_opts().tol);
}

TEST_CASE("decay normalization is idempotent on converged output") {
    auto spec = kernels::make_kernel(Family::power, 0.05, 0.25);
    Grid g = default_grid();
    auto [f, rep] = solver::solve_selfsim(spec, solver::default_init(g), default_opts());
    REQUIRE(rep.converged);
    auto [g2, a] = f.normalize_decay();
    CHECK(std::fabs(a - 1.0) < 1e-3);
    double worst = 0.0;
    for (int i = 0; i < f.grid().n; ++i) {
        double denom = std::max(f.values()[i], 1e-300);
        worst = std::max(worst, std::fabs(g2.values()[i] - f.values()[i]) / denom);
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("dyadic means of the converged state stay linear") {
    auto spec = kernels::make_kernel(Family::power, 0.1, 0.25);
    Grid g = default_grid();
    auto [f, rep] = solver::solve_selfsim(spec, solver::default_init(g), default_opts());
    REQUIRE(rep.converged);
    auto mu = f.mu_fn();
    for (double R : {1.0, 2.0, 4.0, 8.0}) {
        double acc = 0.0;
        int n = 64;
        for (int i = 0; i < n; ++i) {
            double x = R + (R * (i + 0.5)) / n;
            acc += mu(x) * (R / n);
        }
        CHECK(acc <= 5.0 * R);
        CHECK(acc > 0.0);
    }
}

TEST_CASE("prefactor equation: constant kernel") {
    auto spec = kernels::make_kernel(Family::constant, 0.0);
    Grid g = Grid::log_uniform(1e-4, 40.0, 400);
    auto opts = default_opts();
    auto res = solver::solve_prefactor(spec, std::vector<double>(g.n, 0.7), g, opts);
    REQUIRE(res.report.converged);
    for (int i = 0; i < g.n; i += 7) CHECK(res.mu[i] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.d_star > 0.0);
    CHECK(res.D_star < 2.0);
}

TEST_CASE("prefactor equation: perturbed constant") {
    auto spec = kernels::make_kernel(Family::power, 0.1, 0.25);
    Grid g = Grid::log_uniform(1e-4, 40.0, 400);
    auto opts = default_opts();
    // c_eps = 1 / (1 + eps/2 * 2 B(1+a, 1-a))
    const double c_eps = 1.0 / (1.0 + 0.1 * specfun::beta_fn(1.25, 0.75));
    SUBCASE("flat start") {
        auto res = solver::solve_prefactor(spec, std::vector<double>(g.n, 1.0), g, opts);
        REQUIRE(res.report.converged);
        double worst = 0.0;
        for (int i = 0; i < g.n; ++i) worst = std::max(worst, std::fabs(res.mu[i] - c_eps));
        CHECK(worst < 1e-6);
        CHECK(c_eps == doctest::Approx(0.90003).epsilon(1e-4));
    }
    SUBCASE("scaled start lands on the same constant") {
        auto res = solver::solve_prefactor(spec, std::vector<double>(g.n, 3.0), g, opts);
        REQUIRE(res.report.converged);
        for (int i = 0; i < g.n; i += 11) CHECK(res.mu[i] == doctest::Approx(c_eps).epsilon(1e-5));
    }
}

TEST_CASE("contraction probe: constant kernel branches meet") {
    auto spec = kernels::make_kernel(Family::constant, 0.0);
    Grid g = default_grid();
    auto init1 = solver::default_init(g);
    auto init2 = Profile::from_function(g, [](double x) { return 0.5 * std::exp(-0.5 * x); });
    auto probe = solver::contraction_probe(spec, init1, init2, default_opts());
    CHECK(!probe.inconclusive);
    CHECK(probe.distance_norm0 < 1e-6);
}

TEST_CASE("contraction probe: singular perturbation") {
    auto spec = kernels::make_kernel(Family::power, 0.05, 0.25);
    Grid g = default_grid();
    auto init1 = solver::default_init(g);
    auto init2 = Profile::from_function(g, [](double x) { return 0.5 * std::exp(-0.5 * x); });
    auto probe = solver::contraction_probe(spec, init1, init2, default_opts());
    CHECK(!probe.inconclusive);
    CHECK(probe.distance_norm0 < 1e-6);
    // empirical contraction factor below one over the tail of the iteration
    int n = static_cast<int>(probe.distance_ratios.size());
    REQUIRE(n > 4);
    double mean = 0.0;
    int used = 0;
    for (int i = n / 2; i < n; ++i) {
        mean += probe.distance_ratios[i];
        ++used;
    }
    mean /= used;
    CHECK(mean < 1.0);
}

TEST_CASE("smallness table") {
    auto spec_template = kernels::make_kernel(Family::power, 0.0, 0.25);
    auto rows = solver::smallness_curve(spec_template, {0.0, 0.025, 0.05, 0.1}, default_opts());
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].norm_m0 == 0.0);
    CHECK(rows[0].kappa == 0.0);
    for (auto& r : rows) CHECK(r.converged);
    // strictly increasing in eps means strictly decreasing toward eps -> 0
    CHECK(rows[1].norm_m0 < rows[2].norm_m0);
    CHECK(rows[2].norm_m0 < rows[3].norm_m0);
    CHECK(rows[0].norm_m0 < rows[1].norm_m0);
    // kappa keeps one sign across the sweep
    CHECK(rows[1].kappa * rows[2].kappa > 0.0);
    CHECK(rows[2].kappa * rows[3].kappa > 0.0);
}

TEST_CASE("solver option validation") {
    solver::SolverOptions o;
    o.damping = 0.0;
    CHECK_THROWS_AS(o.validate(), DomainError);
    o.damping = 0.5;
    o.tol = -1.0;
    CHECK_THROWS_AS(o.validate(), DomainError);
}
