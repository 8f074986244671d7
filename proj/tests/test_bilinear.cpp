#include "coag/bilinear.hpp"
#include "coag/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace coag;
using bilinear::TestMeasure;
using kernels::Family;
using laplace::LaplaceEval;

namespace {
auto one = [](double) { return 1.0; };
auto zero_fn = [](double) { return 0.0; };
} // namespace

TEST_CASE("constant-kernel fixed point") {
    auto spec = kernels::make_kernel(Family::constant, 0.0);
    bilinear::BilinearEvaluator ev(spec, one, 50.0);
    for (double x : {1e-3, 0.1, 1.0, 10.0, 35.0}) {
        CHECK(ev.bk(one, x) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("bilinearity and kernel linearity") {
    auto spec = kernels::make_kernel(Family::power, 0.1, 0.25);
    bilinear::BilinearEvaluator ev(spec, one, 50.0);
    auto half = [](double) { return 0.5; };
    for (double x : {0.3, 2.0, 12.0}) {
        CHECK(ev.bk(zero_fn, x) == doctest::Approx(0.0));
        CHECK(ev.bk(half, x) == doctest::Approx(0.5 * ev.bk(one, x)).epsilon(1e-12));
        // K = 2 + eps W splits into its parts
        CHECK(ev.bk(one, x) ==
              doctest::Approx(ev.b2(one, x) + 0.1 * ev.bw(one, x)).epsilon(1e-12));
    }
}

TEST_CASE("one-shot wrappers") {
    auto spec = kernels::make_kernel(Family::constant, 0.0);
    CHECK(bilinear::apply_BK(spec, one, one, 2.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(bilinear::apply_B2(one, one, 0.5) == doctest::Approx(1.0).epsilon(1e-8));
    auto many = bilinear::apply_BK_many(spec, one, one, {0.1, 1.0, 7.0});
    for (double v : many) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("positivity of the symmetrized form") {
    auto spec = kernels::make_kernel(Family::power, 0.2, 0.4);
    auto mu = [](double z) { return std::exp(-0.5 * z) + 0.3; };
    bilinear::BilinearEvaluator ev(spec, mu, 50.0);
    for (double x : {1e-3, 0.05, 0.7, 5.0, 30.0}) CHECK(ev.bk(mu, x) >= 0.0);
}

TEST_CASE("closed form for the constant-kernel transform identity") {
    auto flat = LaplaceEval::mu_bar();
    SUBCASE("flat pair") {
        CHECK(bilinear::laplace_B2(flat, flat, 2.0) == doctest::Approx(0.25).epsilon(1e-12));
        for (double p : {0.4, 3.0, 9.0})
            CHECK(bilinear::laplace_B2(flat, flat, p) ==
                  doctest::Approx(2.0 / (p * p * p)).epsilon(1e-12));
    }
    SUBCASE("removable point p = 1") {
        CHECK(bilinear::laplace_B2(flat, flat, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
        // continuity across the Taylor window
        double a = bilinear::laplace_B2(flat, flat, 1.0 - 2e-5);
        double b = bilinear::laplace_B2(flat, flat, 1.0 + 2e-5);
        CHECK(a == doctest::Approx(2.0).epsilon(1e-4));
        CHECK(b == doctest::Approx(2.0).epsilon(1e-4));
    }
    SUBCASE("flat right slot reduces to -2 Omega1'(p)/p") {
        auto L1 = LaplaceEval::analytic(
            [](double p) { return 1.0 / (1.0 + p); },
            [](double p) { return -1.0 / std::pow(1.0 + p, 2); },
            [](double p) { return 2.0 / std::pow(1.0 + p, 3); });
        for (double p : {0.5, 2.0, 6.0})
            CHECK(bilinear::laplace_B2(L1, flat, p) ==
                  doctest::Approx(-2.0 * L1.d1(p) / p).epsilon(1e-12));
    }
}

TEST_CASE("transform identity against direct quadrature") {
    // five pairs, p in {0.5, 1, 2, 5}: physical-space second moment of B2
    // against the closed form
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> rate(0.5, 2.5), coef(0.1, 1.0);
    for (int t = 0; t < 5; ++t) {
        TestMeasure w1, w2;
        for (int j = 0; j < 3; ++j) {
            w1.terms.emplace_back(coef(rng), rate(rng));
            w2.terms.emplace_back(coef(rng), rate(rng));
        }
        auto m1 = [&](double x) { return w1.eval(x); };
        auto m2 = [&](double x) { return w2.eval(x); };
        auto spec = kernels::make_kernel(Family::constant, 0.0);
        bilinear::BilinearEvaluator ev(spec, m2, 60.0);
        std::vector<double> xs, vals;
        int n = 700;
        for (int i = 0; i < n; ++i) {
            double x =
                std::exp(std::log(1e-4) + (std::log(55.0) - std::log(1e-4)) * i / (n - 1.0));
            xs.push_back(x);
            vals.push_back(ev.b2(m1, x));
        }
        auto Lb = laplace::transform_samples(xs, vals, std::max(0.5, w2.min_rate()));
        auto L1 = w1.transform(), L2 = w2.transform();
        for (double p : {0.5, 1.0, 2.0, 5.0}) {
            double closed = bilinear::laplace_B2(L1, L2, p);
            double direct = Lb.d2(p); // int x^2 e^{-px} B2 dx
            CHECK(direct == doctest::Approx(closed).epsilon(1e-5));
        }
    }
}

TEST_CASE("W-part transform identity against the physical route") {
    auto spec = kernels::make_kernel(Family::power, 1.0, 0.25);
    auto repr = kernels::gamma_closed_form(0.25);
    auto flat = LaplaceEval::mu_bar();

    SUBCASE("zero slot gives zero") {
        auto zeroL = LaplaceEval::analytic([](double) { return 0.0; },
                                           [](double) { return 0.0; },
                                           [](double) { return 0.0; });
        CHECK(bilinear::laplace_BW(repr, flat, zeroL, 2.0) == doctest::Approx(0.0));
    }
    SUBCASE("bilinearity in the first slot") {
        auto twice = LaplaceEval::lincomb(2.0, flat, 0.0, flat);
        double a = bilinear::laplace_BW(repr, flat, flat, 2.0);
        double b = bilinear::laplace_BW(repr, twice, flat, 2.0);
        CHECK(b == doctest::Approx(2.0 * a).epsilon(1e-10));
    }
    SUBCASE("flat pair at p = 2 against quadrature of x^2 e^{-2x} B_W(1,1)") {
        bilinear::BilinearEvaluator ev(spec, one, 60.0);
        std::vector<double> xs, vals;
        int n = 700;
        for (int i = 0; i < n; ++i) {
            double x =
                std::exp(std::log(1e-4) + (std::log(55.0) - std::log(1e-4)) * i / (n - 1.0));
            xs.push_back(x);
            vals.push_back(ev.bw(one, x));
        }
        // mu-form samples: transform against weight e^{-px} via the sample
        // transform with a slow synthetic tail rate, integrand cut by e^{-2x}
        double direct = 0.0;
        {
            // direct quadrature of x^2 e^{-2x} B_W using the tabulated values
            auto Lb = laplace::transform_samples(xs, vals, 1e-6);
            direct = Lb.d2(2.0);
        }
        double viaGamma = bilinear::laplace_BW(repr, flat, flat, 2.0);
        CHECK(viaGamma == doctest::Approx(direct).epsilon(1e-3));
    }
}

TEST_CASE("empirical bound constants") {
    SUBCASE("flat singleton for the constant part") {
        auto spec = kernels::make_kernel(Family::constant, 0.0);
        TestMeasure flat_measure;
        flat_measure.terms.emplace_back(1.0, 0.0); // e^{-0 x} = flat state
        auto rep = bilinear::verify_bilinear_bound(spec, {{flat_measure, flat_measure}}, 0.3);
        CHECK(rep.pairs_used == 1);
        CHECK(rep.max_ratio_b2 == doctest::Approx(0.5).epsilon(1e-3));
    }
    SUBCASE("zero pair is skipped") {
        auto spec = kernels::make_kernel(Family::constant, 0.0);
        TestMeasure z;
        auto rep = bilinear::verify_bilinear_bound(spec, {{z, z}}, 0.3);
        CHECK(rep.pairs_used == 0);
        CHECK(rep.pairs_skipped == 1);
    }
}
