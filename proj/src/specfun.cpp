#include "coag/specfun.hpp"
#include "coag/errors.hpp"

#include <cmath>
#include <limits>

namespace coag::specfun {

namespace {

constexpr int kMaxIter = 400;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Series for the lower incomplete gamma, good for x < a + 1.
// Returns P(a,x) = gamma(a,x)/Gamma(a).
double lower_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Gamma(a,x), good for x >= a + 1.
// Returns the fraction F with Gamma(a,x) = e^{-x} x^a F.
double upper_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

// Exponential integral E1(x) = Gamma(0,x), x > 0.
double expint_e1(double x) {
    if (x <= 1.0) {
        // E1(x) = -gamma - log x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
        constexpr double euler = 0.57721566490153286060651209;
        double sum = 0.0, term = 1.0;
        for (int k = 1; k <= kMaxIter; ++k) {
            term *= -x / k;
            double add = -term / k;
            sum += add;
            if (std::fabs(add) < std::fabs(sum) * kEps) break;
        }
        return -euler - std::log(x) + sum;
    }
    // Continued fraction, same recurrence as upper_cf with a = 0.
    return std::exp(-x) * upper_cf(0.0, x);
}

} // namespace

double gamma_fn(double a) { return std::tgamma(a); }

double beta_fn(double a, double b) {
    if (a <= 0.0 || b <= 0.0) throw DomainError("beta_fn requires positive arguments");
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double gamma_upper(double a, double x) {
    if (x < 0.0) throw DomainError("gamma_upper requires x >= 0");
    if (a <= -1.0) throw DomainError("gamma_upper requires a > -1");
    if (x == 0.0) {
        if (a <= 0.0) throw DomainError("gamma_upper diverges at x=0 for a <= 0");
        return std::tgamma(a);
    }
    if (a == 0.0) return expint_e1(x);
    if (a < 0.0) {
        // Gamma(a,x) = (Gamma(a+1,x) - x^a e^{-x}) / a
        return (gamma_upper(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
    }
    if (x < a + 1.0) {
        return std::tgamma(a) * (1.0 - lower_series(a, x));
    }
    return std::exp(-x + a * std::log(x)) * upper_cf(a, x);
}

double gamma_upper_scaled(double a, double x) {
    if (x < 0.0) throw DomainError("gamma_upper_scaled requires x >= 0");
    if (a <= -1.0) throw DomainError("gamma_upper_scaled requires a > -1");
    if (x == 0.0) {
        if (a <= 0.0) throw DomainError("gamma_upper_scaled diverges at x=0 for a <= 0");
        return std::tgamma(a);
    }
    if (a == 0.0) {
        if (x >= 1.0) return upper_cf(0.0, x);
        return std::exp(x) * expint_e1(x);
    }
    if (a < 0.0) {
        return (gamma_upper_scaled(a + 1.0, x) - std::pow(x, a)) / a;
    }
    if (x < a + 1.0) {
        return std::exp(x) * std::tgamma(a) * (1.0 - lower_series(a, x));
    }
    return std::pow(x, a) * upper_cf(a, x);
}

double gamma_lower_regularized(double a, double x) {
    if (a <= 0.0) throw DomainError("gamma_lower_regularized requires a > 0");
    if (x < 0.0) throw DomainError("gamma_lower_regularized requires x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return lower_series(a, x);
    return 1.0 - std::exp(-x + a * std::log(x) - std::lgamma(a)) * upper_cf(a, x);
}

} // namespace coag::specfun
