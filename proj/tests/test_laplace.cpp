#include "coag/laplace.hpp"
#include "coag/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace coag;
using laplace::LaplaceEval;
using profiles::Grid;
using profiles::Profile;

namespace {

Grid fine_grid() { return Grid::log_uniform(1e-4, 40.0, 1000); }

LaplaceEval mixture_eval(const std::vector<std::pair<double, double>>& terms) {
    return LaplaceEval::analytic(
        [terms](double p) {
            double v = 0.0;
            for (auto& [c, a] : terms) v += c / (a + p);
            return v;
        },
        [terms](double p) {
            double v = 0.0;
            for (auto& [c, a] : terms) v -= c / std::pow(a + p, 2);
            return v;
        },
        [terms](double p) {
            double v = 0.0;
            for (auto& [c, a] : terms) v += 2.0 * c / std::pow(a + p, 3);
            return v;
        });
}

} // namespace

TEST_CASE("transform of exponential profiles matches closed forms") {
    Grid g = fine_grid();
    Profile f1 = Profile::from_function(g, [](double x) { return std::exp(-x); });
    Profile f2 = Profile::from_function(g, [](double x) { return 2.0 * std::exp(-2.0 * x); });
    auto L1 = laplace::transform(f1);
    auto L2 = laplace::transform(f2);
    CHECK(L1.d0(1.0) == doctest::Approx(0.5).epsilon(1e-10));
    for (double p : {1e-3, 0.1, 1.0, 30.0, 1000.0}) {
        CHECK(L1.d0(p) == doctest::Approx(1.0 / (1.0 + p)).epsilon(1e-8));
        CHECK(L1.d1(p) == doctest::Approx(-1.0 / std::pow(1.0 + p, 2)).epsilon(1e-8));
        CHECK(L1.d2(p) == doctest::Approx(2.0 / std::pow(1.0 + p, 3)).epsilon(1e-8));
        CHECK(L2.d0(p) == doctest::Approx(2.0 / (2.0 + p)).epsilon(1e-8));
    }
    // p -> 0 limit of the rescaled profile transform
    CHECK(L2.d0(1e-6) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("flat-state evaluator") {
    auto L = LaplaceEval::mu_bar();
    CHECK(L.d0(2.0) == 0.5);
    CHECK(L.d1(2.0) == -0.25);
    CHECK(L.d2(2.0) == 0.25);
}

TEST_CASE("seminorm closed cases") {
    auto flat = LaplaceEval::mu_bar();
    SUBCASE("flat state k=0: boundary supremum 1") {
        auto r = laplace::seminorm(flat, 0, 0.3);
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(r.boundary);
        CHECK(r.argmax_p == doctest::Approx(1e-4).epsilon(1e-6));
    }
    SUBCASE("flat state k=2: value 2") {
        auto r = laplace::seminorm(flat, 2, 0.3);
        CHECK(r.value == doctest::Approx(2.0).epsilon(1e-3));
    }
    SUBCASE("zero") {
        auto zero = LaplaceEval::analytic([](double) { return 0.0; },
                                          [](double) { return 0.0; },
                                          [](double) { return 0.0; });
        CHECK(laplace::seminorm(zero, 0, 0.3).value == 0.0);
    }
    SUBCASE("interior maximum against a dense-scan oracle") {
        // |f|_{0,chi} for f = e^{-x}: sup p (1+p)^{chi-2}
        auto L = mixture_eval({{1.0, 1.0}});
        const double chi = 0.3;
        double best = 0.0;
        for (int i = 0; i < 1000000; ++i) {
            double p = std::exp(std::log(1e-4) + (std::log(1e4) - std::log(1e-4)) * i / 999999.0);
            best = std::max(best, p * std::pow(1.0 + p, chi - 2.0));
        }
        auto r = laplace::seminorm(L, 0, chi);
        CHECK(r.value == doctest::Approx(best).epsilon(1e-6));
        CHECK(!r.boundary);
        CHECK(r.argmax_p == doctest::Approx(1.0 / (1.0 - chi)).epsilon(1e-4));
    }
}

TEST_CASE("full norm of the flat state") {
    auto flat = LaplaceEval::mu_bar();
    CHECK(laplace::fullnorm(flat, 2, 0.3) == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("chi monotonicity on random mixtures") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> rate(0.5, 3.0), coef(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<std::pair<double, double>> terms;
        for (int j = 0; j < 4; ++j) terms.emplace_back(coef(rng), rate(rng));
        auto L = mixture_eval(terms);
        for (int k = 0; k <= 2; ++k) {
            double n1 = laplace::fullnorm(L, k, 0.2);
            double n2 = laplace::fullnorm(L, k, 0.45);
            CHECK(n1 <= n2 * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("prefactor norm") {
    auto flat = LaplaceEval::mu_bar();
    CHECK(laplace::pseminorm(flat, 1) == doctest::Approx(1.0).epsilon(1e-12));
    auto L = mixture_eval({{1.0, 1.0}});
    CHECK(laplace::pseminorm(L, 0) == doctest::Approx(1.0).epsilon(1e-3));
    auto zero = LaplaceEval::analytic([](double) { return 0.0; }, [](double) { return 0.0; },
                                      [](double) { return 0.0; });
    CHECK(laplace::pseminorm(zero, 0) == 0.0);
}

TEST_CASE("weight function and sandwich") {
    CHECK(laplace::lambda_weight(1.0, 0.7) == 1.0);
    CHECK(laplace::lambda_weight(4.0, 0.3) == doctest::Approx(0.65975).epsilon(1e-4));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> us(-4.0, 4.0), uc(0.05, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double s = std::pow(10.0, us(rng)), chi = uc(rng);
        double lam = laplace::lambda_weight(s, chi);
        double mid = std::pow(1.0 + s, 1.0 - chi) / s;
        CHECK(lam <= mid * (1.0 + 1e-12));
        CHECK(mid <= std::pow(2.0, 1.0 - chi) * lam * (1.0 + 1e-12));
    }
}

TEST_CASE("norm framework inequalities on a mixture family") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> rate(0.5, 3.0), coef(0.0, 1.0);
    const double theta = 0.3;
    for (int t = 0; t < 20; ++t) {
        std::vector<std::pair<double, double>> terms;
        for (int j = 0; j < 5; ++j) terms.emplace_back(coef(rng), rate(rng));
        auto L = mixture_eval(terms);

        // Landau with explicit factor 2
        double s0 = laplace::seminorm(L, 0, theta).value;
        double s1 = laplace::seminorm(L, 1, theta).value;
        double s2 = laplace::seminorm(L, 2, theta).value;
        CHECK(s1 <= 2.0 * std::sqrt(s0 * s2) * (1.0 + 1e-9));

        // cutoff monotonicity via the shift
        for (int n : {1, 2, 5}) {
            auto Ln = LaplaceEval::shift(L, n);
            for (int k = 0; k <= 2; ++k) {
                CHECK(laplace::seminorm(Ln, k, theta).value <=
                      laplace::seminorm(L, k, theta).value * (1.0 + 1e-9));
            }
        }

        // positivity route |Omega'(p)| <= Omega(p/2)/p (nonnegative mixtures)
        for (int i = 0; i < 100; ++i) {
            double p = std::pow(10.0, -3.0 + 6.0 * i / 99.0);
            CHECK(std::fabs(L.d1(p)) <= L.d0(0.5 * p) / p * (1.0 + 1e-12));
        }

        // norm equivalence: full norm controlled by the top seminorm
        if (s2 > 0.0) CHECK(laplace::fullnorm(L, 2, theta) / s2 < 50.0);
    }
}

TEST_CASE("transform of mu and its offset for the unit exponential") {
    Grid g = fine_grid();
    Profile f = Profile::from_function(g, [](double x) { return std::exp(-x); });
    auto U = laplace::transform_mu(f);
    auto M = laplace::transform_mu_offset(f);
    for (double p : {0.25, 1.0, 4.0}) {
        CHECK(U.d0(p) == doctest::Approx(1.0 / p).epsilon(1e-8));
        CHECK(std::fabs(M.d0(p)) < 1e-7);
    }
}

TEST_CASE("small-p growth of normalized-profile transforms") {
    Grid g = fine_grid();
    Profile f = Profile::from_function(
        g, [](double x) { return 0.8 * std::exp(-x) + 0.4 * std::exp(-1.7 * x); });
    auto [h, a] = f.normalize_decay();
    (void)a;
    auto L = laplace::transform(h);
    // no faster growth than C/p toward p = 0: slope of log Omega vs log p
    double v1 = L.d0(1e-4), v2 = L.d0(1e-2);
    double slope = (std::log(v2) - std::log(v1)) / (std::log(1e-2) - std::log(1e-4));
    CHECK(slope > -1.05);
    CHECK(slope < 0.05);
}

TEST_CASE("transform_samples reproduces a closed form") {
    std::vector<double> xs, vals;
    int n = 500;
    for (int i = 0; i < n; ++i) {
        double x = std::exp(std::log(1e-4) + (std::log(50.0) - std::log(1e-4)) * i / (n - 1.0));
        xs.push_back(x);
        vals.push_back(std::exp(-1.3 * x) * (1.0 + 0.2 * x));
    }
    auto L = laplace::transform_samples(xs, vals, 1.3);
    for (double p : {0.3, 1.0, 5.0}) {
        double ref = 1.0 / (1.3 + p) + 0.2 / std::pow(1.3 + p, 2);
        CHECK(L.d0(p) == doctest::Approx(ref).epsilon(1e-5));
    }
}
