#include "coag/errors.hpp"
#include "coag/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace coag;
using kernels::Family;

TEST_CASE("kernel evaluation closed forms") {
    auto constant = kernels::make_kernel(Family::constant, 0.0);
    CHECK(kernels::eval_K(constant, 3.0, 7.0) == 2.0);

    auto power = kernels::make_kernel(Family::power, 0.1, 0.25);
    CHECK(kernels::eval_K(power, 1.0, 1.0) == doctest::Approx(2.2).epsilon(1e-15));
    CHECK(kernels::eval_K(power, 16.0, 1.0) == doctest::Approx(2.25).epsilon(1e-14));

    CHECK(kernels::eval_W(power, 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    for (double lam : {1.0, 10.0, 100.0})
        CHECK(kernels::eval_W(power, lam * 16.0, lam) == doctest::Approx(2.5).epsilon(1e-13));

    auto br            = kernels::make_kernel(Family::brownian, 1.0);
    CHECK(kernels::eval_W(br, 8.0, 1.0) == doctest::Approx(2.5).epsilon(1e-14));

    CHECK_THROWS_AS(kernels::eval_W(constant, 1.0, 2.0), UnsupportedOperation);
    CHECK_THROWS_AS(kernels::eval_K(power, -1.0, 2.0), DomainError);
    CHECK_THROWS_AS(kernels::make_kernel(Family::power, 0.1, 0.6), DomainError);
}

TEST_CASE("homogeneity of degree zero at random points") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto power = kernels::make_kernel(Family::power, 0.3, 0.4);
    auto br = kernels::make_kernel(Family::brownian, 0.2);
    for (int i = 0; i < 100; ++i) {
        double x = std::pow(10.0, u(rng)), y = std::pow(10.0, u(rng));
        double lam = std::pow(10.0, u(rng));
        for (auto* spec : {&power, &br}) {
            double a = kernels::eval_K(*spec, x, y);
            double b = kernels::eval_K(*spec, lam * x, lam * y);
            CHECK(std::fabs(a - b) < 1e-12 * a);
        }
        // the power family saturates its own bound
        double w = kernels::eval_W(power, x, y);
        CHECK(w == doctest::Approx(std::pow(x / y, 0.4) + std::pow(y / x, 0.4)).epsilon(1e-14));
    }
}

TEST_CASE("closed-form representation measure") {
    auto repr = kernels::gamma_closed_form(0.25);
    CHECK(repr.diag_coeff == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    // diagonal limit 2 a sin(pi a) / (pi eta)
    CHECK(repr.regular(1.0, 1.0) ==
          doctest::Approx(std::sqrt(2.0) / (4.0 * M_PI)).epsilon(1e-10));
    CHECK(repr.regular(2.0, 1.0) == doctest::Approx(repr.regular(1.0, 2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(kernels::gamma_closed_form(0.6), DomainError);
    CHECK_THROWS_AS(kernels::gamma_closed_form(0.0), DomainError);
}

TEST_CASE("regular part: sign, homogeneity and growth bound") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (double alpha : {0.1, 0.25, 0.4}) {
        auto repr = kernels::gamma_closed_form(alpha);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double xi = std::pow(10.0, u(rng)), eta = std::pow(10.0, u(rng));
            double g = repr.regular(xi, eta);
            CHECK(g >= 0.0);
            double lam = std::pow(10.0, u(rng));
            CHECK(repr.regular(lam * xi, lam * eta) * lam == doctest::Approx(g).epsilon(1e-12));
            double envelope = (std::pow(xi, -alpha) + std::pow(eta, -alpha)) /
                              std::pow(xi + eta, 1.0 - alpha);
            worst = std::max(worst, g / envelope);
        }
        CHECK(worst <= 1.0 + 1e-6);
    }
}

TEST_CASE("jump density") {
    auto power = kernels::make_kernel(Family::power, 1.0, 0.25);
    // phi(4) = sin(pi/4) (4^{1/4} - 4^{-1/4}) / (3 pi)
    double ref = std::sin(M_PI / 4.0) * (std::pow(4.0, 0.25) - std::pow(4.0, -0.25)) /
                 (3.0 * M_PI);
    CHECK(kernels::gamma_jump(power, 4.0) == doctest::Approx(ref).epsilon(1e-14));
    CHECK(ref == doctest::Approx(0.05305).epsilon(1e-4));

    // homogeneity restated for the jump: phi(1/s) = s phi(s)
    for (double s : {0.3, 2.0, 7.5}) {
        CHECK(kernels::gamma_jump(power, 1.0 / s) ==
              doctest::Approx(s * kernels::gamma_jump(power, s)).epsilon(1e-13));
    }

    // the two routes coincide
    auto repr = kernels::gamma_closed_form(0.25);
    for (double s : {0.5, 2.0, 10.0}) {
        double a = kernels::gamma_jump(power, s);
        double b = repr.regular(s, 1.0);
        CHECK(std::fabs(a - b) <= 1e-12 * std::fabs(b));
    }

    CHECK_THROWS_AS(kernels::gamma_jump(kernels::make_kernel(Family::constant, 0.0), 2.0),
                    UnsupportedOperation);
}

TEST_CASE("jump density from user-supplied boundary values") {
    // custom copy of the power kernel: W_+(-s) = s^a e^{i pi a} + s^{-a} e^{-i pi a}
    const double a = 0.25;
    kernels::KernelSpec spec = kernels::make_kernel(Family::custom, 1.0, a);
    spec.custom_w1 = [a](double s) { return std::pow(s, a) + std::pow(s, -a); };
    spec.custom_boundary_plus = [a](double s) {
        std::complex<double> rot(std::cos(M_PI * a), std::sin(M_PI * a));
        return std::pow(s, a) * rot + std::pow(s, -a) / rot;
    };
    auto repr = kernels::gamma_closed_form(a);
    for (double s : {0.4, 1.0 + 1e-9, 3.0, 25.0}) {
        CHECK(kernels::gamma_jump(spec, s) ==
              doctest::Approx(repr.jump(s)).epsilon(1e-9));
    }
    auto built = kernels::gamma_from_jump(spec);
    CHECK(built.diag_coeff == doctest::Approx(2.0 * std::cos(M_PI * a)).epsilon(1e-12));
}

TEST_CASE("representation reconstructs W(y,z)/(y+z)") {
    auto check = [](double alpha, double y, double z) {
        auto spec = kernels::make_kernel(Family::power, 1.0, alpha);
        auto repr = kernels::gamma_closed_form(alpha);
        double residual = kernels::verify_repr(repr, spec, y, z, 1e-4);
        CHECK(residual < 1e-4);
    };
    check(0.25, 1.0, 1.0); // target 1
    check(0.25, 2.0, 2.0); // homogeneity: same W, doubled denominator
    check(0.4, 1.0, 4.0);  // target ((1/4)^0.4 + 4^0.4)/5 ~ 0.46309
    // the target itself, for the record
    auto spec = kernels::make_kernel(Family::power, 1.0, 0.4);
    CHECK(kernels::eval_W(spec, 1.0, 4.0) / 5.0 == doctest::Approx(0.46309).epsilon(1e-4));
}
