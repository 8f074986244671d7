#include "coag/boundary.hpp"
#include "coag/errors.hpp"
#include "coag/quadrature.hpp"
#include "coag/specfun.hpp"

#include <cmath>
#include <memory>

namespace coag::boundary {

using kernels::Family;
using kernels::KernelSpec;

double beta_w(const KernelSpec& spec, const bilinear::MuFn& mu, double y) {
    if (!(y > 0.0)) throw DomainError("beta_w requires y > 0");
    if (spec.family == Family::constant)
        throw UnsupportedOperation("beta_w is undefined for the constant family");
    auto f = [&](double z) { return kernels::eval_W(spec, y, z) * mu(z) * std::exp(-z); };
    auto bp = quad::log_breakpoints(1e-12, 1.0, 40);
    double head = quad::integrate_panels(f, bp, 8);
    double tail = quad::integrate_exp_tail(f, 1.0, 1.0, 26, 10);
    double v = head + tail;
    if (!std::isfinite(v)) throw NumericFailure("beta_w quadrature failed", v);
    return v;
}

double beta_w_from_moments(double alpha, double m_alpha, double m_neg_alpha, double y) {
    double ya = std::pow(y, alpha);
    return ya * m_neg_alpha + m_alpha / ya;
}

PhiEval::PhiEval(const KernelSpec& spec, const bilinear::MuFn& mu) : spec_(spec), mu_(mu) {
    closed_form_ = spec.family == Family::power || spec.family == Family::brownian;
    if (spec.family == Family::constant || spec.epsilon == 0.0) {
        closed_form_ = true; // phi identically zero
        m_alpha_ = m_neg_alpha_ = 0.0;
        return;
    }
    // moments of f(z) = mu(z) e^{-z}
    auto moment = [&](double s) {
        auto f = [&](double z) { return std::pow(z, s) * mu(z) * std::exp(-z); };
        auto bp = quad::log_breakpoints(1e-12, 1.0, 40);
        return quad::integrate_panels(f, bp, 8) + quad::integrate_exp_tail(f, 1.0, 1.0, 26, 10);
    };
    if (spec.alpha > 0.0) {
        m_alpha_ = moment(spec.alpha);
        m_neg_alpha_ = moment(-spec.alpha);
    } else {
        m_alpha_ = m_neg_alpha_ = moment(0.0);
    }
}

double PhiEval::phi(double x) const {
    if (!(x > 0.0)) throw DomainError("phi requires x > 0");
    if (spec_.epsilon == 0.0 || spec_.family == Family::constant) return 0.0;
    if (closed_form_) {
        if (spec_.alpha == 0.0) {
            // W = 2 identically: Phi = 2 eps m_0 E1(x)
            return 2.0 * spec_.epsilon * m_alpha_ * specfun::gamma_upper(0.0, x);
        }
        double a = spec_.alpha;
        return spec_.epsilon * (m_neg_alpha_ * specfun::gamma_upper(a, x) +
                                m_alpha_ * specfun::gamma_upper(-a, x));
    }
    // custom family: nested quadrature of beta_w(t)/t e^{-t}
    auto f = [&](double t) { return beta_w(spec_, mu_, t) / t * std::exp(-t); };
    double total = 0.0;
    if (x < 1.0) {
        auto bp = quad::log_breakpoints(x, 1.0, 24);
        total += quad::integrate_panels(f, bp, 8);
        total += quad::integrate_exp_tail(f, 1.0, 1.0, 20, 8);
    } else {
        total += quad::integrate_exp_tail(f, x, 1.0, 20, 8);
    }
    return spec_.epsilon * total;
}

double phi(const KernelSpec& spec, const bilinear::MuFn& mu, double x) {
    return PhiEval(spec, mu).phi(x);
}

LayerFunctions layer_functions(const KernelSpec& spec, const profiles::Profile& f) {
    LayerFunctions out;
    out.kappa = 2.0 * (f.moment(0.0) - 1.0);
    if (spec.alpha > 0.0 && spec.family != Family::constant)
        out.m_alpha = f.moment(spec.alpha);
    else
        out.m_alpha = f.moment(0.0);
    auto mu = f.mu_fn();
    auto phi_eval = std::make_shared<PhiEval>(spec, mu);
    KernelSpec sp = spec;
    out.phi = [phi_eval](double x) { return phi_eval->phi(x); };
    if (spec.family == Family::power || spec.family == Family::brownian) {
        double ma = phi_eval->m_alpha(), mna = phi_eval->m_neg_alpha(), al = spec.alpha;
        out.beta_w = [ma, mna, al](double y) { return beta_w_from_moments(al, ma, mna, y); };
    } else if (spec.family == Family::custom) {
        out.beta_w = [sp, mu](double y) { return beta_w(sp, mu, y); };
    } else {
        out.beta_w = [](double) { return 0.0; };
    }
    return out;
}

std::pair<double, double> bl_reconstruct(const KernelSpec& spec,
                                         const profiles::Profile& f, double x) {
    if (!(x > 0.0)) throw DomainError("bl_reconstruct requires x > 0");
    auto layer = layer_functions(spec, f);
    auto mu = f.mu_fn();
    const double kappa = layer.kappa;
    const double phi_x = layer.phi(x);
    const double eps = spec.epsilon;
    const bool with_w = eps > 0.0 && spec.family != Family::constant;

    // inner convolution int_0^xi K(y, xi-y) y mu(y) mu(xi-y) dy
    auto conv = [&](double xi) {
        auto g = [&](double y) {
            double k = (spec.family == Family::constant || eps == 0.0)
                           ? 2.0
                           : 2.0 + eps * kernels::eval_W(spec, y, xi - y);
            return k * y * mu(y) * mu(xi - y);
        };
        auto left = quad::log_breakpoints(xi * 1e-12, 0.5 * xi, 26);
        auto right = quad::geometric_breakpoints_to_b(0.5 * xi, xi * (1.0 - 1e-12), 26, 2.0);
        return quad::integrate_panels(g, left, 8) + quad::integrate_panels(g, right, 8);
    };

    auto integrand = [&](double xi) {
        double damp = std::pow(x / xi, kappa) * std::exp(layer.phi(xi) - phi_x);
        double term2 = std::exp(-xi) / (xi * xi) * conv(xi);
        double term1 = 0.0;
        if (with_w) {
            term1 = -eps * layer.beta_w(xi) * ((1.0 - std::exp(-xi)) / xi) * std::exp(-xi) * mu(xi);
        }
        return damp * (term1 + term2);
    };

    auto bp = quad::geometric_breakpoints(x, x + 46.0, 34, 1.6);
    double rhs = quad::integrate_panels(integrand, bp, 10);
    double lhs = std::exp(-x) * mu(x);
    if (!std::isfinite(rhs)) throw NumericFailure("bl_reconstruct quadrature failed", rhs);
    return {lhs, rhs};
}

NearZeroFit nearzero_fit(const KernelSpec& spec, const profiles::Profile& f) {
    const auto& grid = f.grid();
    if (spec.epsilon > 0.0 && !(spec.alpha > 0.0))
        throw DomainError("nearzero_fit requires alpha > 0 when eps > 0");
    NearZeroFit out;
    out.beta_f = 2.0 * f.moment(0.0);
    const double m_tilde = (spec.alpha > 0.0) ? f.moment(spec.alpha) : 0.0;
    const double lam = (spec.epsilon > 0.0) ? spec.epsilon * m_tilde / spec.alpha : 0.0;

    double log_sum = 0.0;
    double q_min = 0.0, q_max = 0.0;
    int count = 0;
    for (int i = 0; i < grid.n; ++i) {
        double x = grid.nodes[i];
        if (x > 1e-2) break;
        double fx = f.values()[i];
        if (!(fx > 0.0)) throw FitFailure("nearzero window contains non-positive values");
        double q = fx * std::pow(x, 2.0 - out.beta_f);
        if (lam > 0.0) q *= std::exp(lam * std::pow(x, -spec.alpha));
        if (!std::isfinite(q)) throw FitFailure("compensated profile overflowed");
        log_sum += std::log(q);
        q_min = (count == 0) ? q : std::min(q_min, q);
        q_max = (count == 0) ? q : std::max(q_max, q);
        ++count;
    }
    if (count < 4) throw FitFailure("nearzero window has too few nodes");
    out.layer_const = std::exp(log_sum / count);
    out.plateau_spread = q_max / q_min - 1.0;
    return out;
}

} // namespace coag::boundary
