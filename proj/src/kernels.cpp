#include "coag/kernels.hpp"
#include "coag/errors.hpp"
#include "coag/quadrature.hpp"

#include <cmath>

namespace coag::kernels {

Family family_from_string(const std::string& name) {
    if (name == "constant") return Family::constant;
    if (name == "power") return Family::power;
    if (name == "brownian") return Family::brownian;
    if (name == "custom") return Family::custom;
    throw DomainError("unknown kernel family '" + name + "'");
}

std::string to_string(Family f) {
    switch (f) {
        case Family::constant: return "constant";
        case Family::power: return "power";
        case Family::brownian: return "brownian";
        case Family::custom: return "custom";
    }
    return "?";
}

KernelSpec make_kernel(Family family, double epsilon, double alpha) {
    if (epsilon < 0.0) throw DomainError("epsilon must be nonnegative");
    KernelSpec spec;
    spec.family = family;
    spec.epsilon = epsilon;
    switch (family) {
        case Family::constant:
            spec.alpha = 0.0;
            break;
        case Family::power:
            if (!(alpha >= 0.0 && alpha < 0.5))
                throw DomainError("power family requires alpha in [0, 1/2)");
            spec.alpha = alpha;
            break;
        case Family::brownian:
            spec.alpha = 1.0 / 3.0;
            break;
        case Family::custom:
            spec.alpha = alpha;
            break;
    }
    spec.c_w = 1.0;
    return spec;
}

double eval_W(const KernelSpec& spec, double x, double y) {
    if (x <= 0.0 || y <= 0.0) throw DomainError("eval_W requires positive arguments");
    switch (spec.family) {
        case Family::constant:
            throw UnsupportedOperation("W is not defined for the constant family");
        case Family::power: {
            double r = std::pow(x / y, spec.alpha);
            return r + 1.0 / r;
        }
        case Family::brownian: {
            double r = std::cbrt(x / y);
            return r + 1.0 / r;
        }
        case Family::custom:
            if (!spec.custom_w1) throw UnsupportedOperation("custom family needs custom_w1");
            return spec.custom_w1(x / y);
    }
    return 0.0;
}

double eval_K(const KernelSpec& spec, double x, double y) {
    if (x <= 0.0 || y <= 0.0) throw DomainError("eval_K requires positive arguments");
    if (spec.family == Family::constant || spec.epsilon == 0.0) return 2.0;
    return 2.0 + spec.epsilon * eval_W(spec, x, y);
}

namespace {

// phi(s) = sin(pi a)(s^a - s^{-a})/(pi(s-1)), limit 2a sin(pi a)/pi at s=1.
double power_jump(double alpha, double s) {
    if (s <= 0.0) throw DomainError("jump density requires s > 0");
    const double sa = std::sin(M_PI * alpha);
    if (std::fabs(s - 1.0) < 1e-7) {
        // Series of (s^a - s^{-a})/(s-1) about s=1: with u = s-1,
        // = 2a (1 - u/2 + ...) + O(u^2); two terms keep 1e-14 here.
        double u = s - 1.0;
        return sa / M_PI * 2.0 * alpha * (1.0 - 0.5 * u + (3.0 * alpha * alpha + 2.0) / 12.0 * u * u);
    }
    double p = std::pow(s, alpha);
    return sa / M_PI * (p - 1.0 / p) / (s - 1.0);
}

} // namespace

GammaRepr gamma_closed_form(double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw DomainError("gamma_closed_form requires alpha in (0, 1/2)");
    GammaRepr repr;
    repr.alpha = alpha;
    repr.diag_coeff = 2.0 * std::cos(M_PI * alpha);
    repr.jump = [alpha](double s) { return power_jump(alpha, s); };
    repr.regular = [alpha](double xi, double eta) {
        if (xi <= 0.0 || eta <= 0.0) throw DomainError("Gamma regular part requires xi, eta > 0");
        return power_jump(alpha, xi / eta) / eta;
    };
    return repr;
}

double gamma_jump(const KernelSpec& spec, double s) {
    if (s <= 0.0) throw DomainError("gamma_jump requires s > 0");
    switch (spec.family) {
        case Family::power:
        case Family::brownian:
            return power_jump(spec.alpha, s);
        case Family::custom: {
            if (!spec.custom_boundary_plus)
                throw UnsupportedOperation("custom family needs boundary evaluators for gamma_jump");
            // G_- = conj(G_+) on the cut, so
            // (G_-(-s) - G_+(-s)) / (2 pi i (1-s)) = Im G_+(-s) / (pi (s-1)).
            std::complex<double> gp = spec.custom_boundary_plus(s);
            if (std::fabs(s - 1.0) < 1e-7) {
                // Removable point; central difference across the gap.
                double h = 1e-5;
                std::complex<double> a = spec.custom_boundary_plus(1.0 + h);
                std::complex<double> b = spec.custom_boundary_plus(1.0 - h);
                return 0.5 * (a.imag() / (M_PI * h) + b.imag() / (M_PI * (-h)));
            }
            return gp.imag() / (M_PI * (s - 1.0));
        }
        default:
            throw UnsupportedOperation("gamma_jump needs an analytically continued family");
    }
}

GammaRepr gamma_from_jump(const KernelSpec& spec) {
    GammaRepr repr;
    repr.alpha = spec.alpha;
    switch (spec.family) {
        case Family::power:
        case Family::brownian:
            repr.diag_coeff = 2.0 * std::cos(M_PI * spec.alpha);
            break;
        case Family::custom: {
            if (!spec.custom_boundary_plus)
                throw UnsupportedOperation("custom family needs boundary evaluators");
            repr.diag_coeff = spec.custom_boundary_plus(1.0).real();
            break;
        }
        default:
            throw UnsupportedOperation("gamma_from_jump needs an analytically continued family");
    }
    const KernelSpec s = spec;
    repr.jump = [s](double u) { return gamma_jump(s, u); };
    repr.regular = [s](double xi, double eta) {
        if (xi <= 0.0 || eta <= 0.0) throw DomainError("Gamma regular part requires xi, eta > 0");
        return gamma_jump(s, xi / eta) / eta;
    };
    return repr;
}

double verify_repr(const GammaRepr& repr, const KernelSpec& spec,
                   double y, double z, double tol) {
    if (y <= 0.0 || z <= 0.0) throw DomainError("verify_repr requires y, z > 0");
    if (tol <= 0.0) throw DomainError("verify_repr requires tol > 0");

    const double target = eval_W(spec, y, z) / (y + z);

    // In u = xi/eta, v = xi*eta the regular part contributes
    //   int_0^inf du int_0^inf dv  Gamma~(sqrt(uv), sqrt(v/u))
    //                              * e^{-sqrt(uv) y - sqrt(v/u) z} / (2u),
    // and the substitution v = w^2 removes the v^{-1/2} behaviour of the
    // inner integrand.  The u-integral has integrable u^{-alpha} and
    // u^{alpha-1} endpoint behaviour; geometric grading handles both.
    auto inner = [&](double u) {
        const double su = std::sqrt(u);
        const double c = su * y + z / su; // exponent rate in w
        auto g = [&](double w) {
            double xi = su * w, eta = w / su;
            return repr.regular(xi, eta) * w * std::exp(-c * w);
        };
        double val = quad::integrate_exp_tail(g, 0.0, c, 32, 12);
        return val / u;
    };

    auto run = [&](int per_decade, int npp) {
        auto left = quad::log_breakpoints(1e-10, 1.0, 10 * per_decade);
        auto right = quad::log_breakpoints(1.0, 1e8, 8 * per_decade);
        std::vector<double> bp(left);
        bp.insert(bp.end(), right.begin() + 1, right.end());
        return quad::integrate_panels(inner, bp, npp);
    };

    double coarse = run(2, 10);
    double fine = run(3, 14);
    double lhs = fine + repr.diag_coeff / (y + z);
    double residual = std::fabs(lhs - target);
    double quad_err = std::fabs(fine - coarse);
    if (quad_err > 0.25 * tol && residual > tol)
        throw NumericFailure("verify_repr quadrature did not converge", residual);
    return residual;
}

} // namespace kernels
