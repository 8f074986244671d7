#include "coag/linop.hpp"
#include "coag/errors.hpp"
#include "coag/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace coag::linop {

using laplace::LaplaceEval;

namespace {

constexpr double kSeriesWindow = 1e-4;

// h(r) = (M(r) - M(1))/((1-r) r^2) - M'(r)/r with the series branch near 1.
struct HEval {
    const LaplaceEval& M;
    double M1, dM1, ddM1;

    explicit HEval(const LaplaceEval& m)
        : M(m), M1(m.d0(1.0)), dM1(m.d1(1.0)), ddM1(m.d2(1.0)) {}

    double operator()(double r) const {
        if (std::fabs(r - 1.0) < kSeriesWindow) {
            // (M(r)-M(1))/(1-r) = -(M'(1) + (r-1)/2 M''(1)) + O((r-1)^2)
            return -(dM1 + 0.5 * (r - 1.0) * ddM1) / (r * r) - M.d1(r) / r;
        }
        return (M.d0(r) - M1) / ((1.0 - r) * r * r) - M.d1(r) / r;
    }
};

// I0 = int_p^inf (r-p) h(r) dr and I1 = int_p^inf h(r) dr through the
// rational map r = p + S t/(1-t); the far field is handled on log panels
// in u = 1-t down to u = 1e-10 (residual ~ h(inf-ish) * u, negligible).
struct TailIntegrals {
    double I0 = 0.0, I1 = 0.0;
};

TailIntegrals tail_integrals(const HEval& h, double p) {
    // scale-proportional map keeps the integrand free of a boundary layer
    // at small p (with S ~ 1 the whole mass of (r-p) h(r) would sit in a
    // t-window of width ~p)
    const double S = p;
    TailIntegrals out;
    auto add = [&](double t, double w) {
        double u = 1.0 - t;
        double r = p + S * t / u;
        double jac = S / (u * u);
        double hv = h(r);
        out.I0 += w * (r - p) * hv * jac;
        out.I1 += w * hv * jac;
    };
    // [0, 0.9] uniform panels
    {
        const auto& rule = quad::gauss_legendre(10);
        const int panels = 24;
        for (int k = 0; k < panels; ++k) {
            double a = 0.9 * k / panels, b = 0.9 * (k + 1) / panels;
            double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                add(mid + half * rule.nodes[i], half * rule.weights[i]);
        }
    }
    // t in [0.9, 1): log panels in u = 1-t from 0.1 down to 1e-10
    {
        const auto& rule = quad::gauss_legendre(10);
        auto bp = quad::log_breakpoints(1e-10, 0.1, 36);
        for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
            double a = bp[k], b = bp[k + 1];
            double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                double u = mid + half * rule.nodes[i];
                add(1.0 - u, half * rule.weights[i]);
            }
        }
    }
    return out;
}

// The closed-form inverse
//   M(p) = G(p) - 2 G(1) + 2 (1-p)/p^2 int_0^p xi (G(1)-G(xi))/(1-xi) dxi
// is rearranged before quadrature: with
//   jhat(xi) = (G(1) - xi G(xi)) / (1 - xi)
// the integrand splits off its constant part -G(1) exactly, giving
//   M(p) = G(p) - 2 G(1)/p + 2 (1-p)/p^2 int_0^p jhat(xi) dxi.
// The -2G(1) cancellation against the integral then happens in algebra
// rather than in floating point, which keeps M relatively accurate at
// large p where |M| decays.
struct JEval {
    const LaplaceEval& G;
    double G1, dG1, ddG1;

    explicit JEval(const LaplaceEval& g)
        : G(g), G1(g.d0(1.0)), dG1(g.d1(1.0)), ddG1(g.d2(1.0)) {}

    // jhat, series branch through the removable point:
    // jhat(1+d) = G(1) + G'(1) + d (G'(1) + G''(1)/2) + O(d^2)
    double operator()(double xi) const {
        if (std::fabs(xi - 1.0) < kSeriesWindow)
            return G1 + dG1 + (xi - 1.0) * (dG1 + 0.5 * ddG1);
        return (G1 - xi * G.d0(xi)) / (1.0 - xi);
    }

    double deriv(double xi) const {
        if (std::fabs(xi - 1.0) < kSeriesWindow) return dG1 + 0.5 * ddG1;
        double num = -(G.d0(xi) + xi * G.d1(xi)) * (1.0 - xi) + (G1 - xi * G.d0(xi));
        return num / ((1.0 - xi) * (1.0 - xi));
    }
};

double jhat_integral(const JEval& j, double p) {
    // int_0^p jhat; bounded at 0, smooth through 1, ~ xi^{-chi} at infinity
    std::vector<double> bp;
    double cut = std::min(p, 1.0);
    auto left = quad::log_breakpoints(p * 1e-12, cut, 30);
    bp = left;
    if (p > 1.0) {
        int decades = static_cast<int>(std::ceil(std::log10(p)));
        auto rest = quad::log_breakpoints(1.0, p, std::max(12, 4 * decades));
        bp.insert(bp.end(), rest.begin() + 1, rest.end());
    }
    return quad::integrate_panels([&](double xi) { return j(xi); }, bp, 10);
}

} // namespace

double apply_Lhat(const LaplaceEval& G, double p) {
    if (!(p > 0.0)) throw DomainError("apply_Lhat requires p > 0");
    HEval h(G);
    auto ints = tail_integrals(h, p);
    double v = G.d0(p) - 2.0 * ints.I0;
    if (!std::isfinite(v)) throw NumericFailure("apply_Lhat produced a non-finite value", v);
    return v;
}

LaplaceEval lhat_eval(const LaplaceEval& G) {
    auto g = std::make_shared<LaplaceEval>(G);
    auto h = std::make_shared<HEval>(*g);
    LaplaceEval out;
    out.domain_min = 0.0;
    out.omega0 = [g, h](double p) { return g->d0(p) - 2.0 * tail_integrals(*h, p).I0; };
    out.omega1 = [g, h](double p) { return g->d1(p) + 2.0 * tail_integrals(*h, p).I1; };
    out.omega2 = [g, h](double p) { return g->d2(p) - 2.0 * (*h)(p); };
    return out;
}

double invert_Lhat(const LaplaceEval& G, double p) {
    if (!(p > 0.0)) throw DomainError("invert_Lhat requires p > 0");
    double G1 = G.d0(1.0);
    if (p == 1.0) return -G1;
    JEval j(G);
    double Jh = jhat_integral(j, p);
    double v = G.d0(p) - 2.0 * G1 / p + 2.0 * (1.0 - p) / (p * p) * Jh;
    if (!std::isfinite(v)) throw NumericFailure("invert_Lhat produced a non-finite value", v);
    return v;
}

LaplaceEval lhat_inverse_eval(const LaplaceEval& G) {
    auto g = std::make_shared<LaplaceEval>(G);
    auto j = std::make_shared<JEval>(*g);
    LaplaceEval out;
    out.domain_min = 0.0;
    out.omega0 = [g, j](double p) {
        if (p == 1.0) return -g->d0(1.0);
        return g->d0(p) - 2.0 * g->d0(1.0) / p +
               2.0 * (1.0 - p) / (p * p) * jhat_integral(*j, p);
    };
    out.omega1 = [g, j](double p) {
        double Jh = jhat_integral(*j, p);
        return g->d1(p) + 2.0 * g->d0(1.0) / (p * p) +
               2.0 * (p - 2.0) / (p * p * p) * Jh + 2.0 * (1.0 - p) / (p * p) * (*j)(p);
    };
    out.omega2 = [g, j](double p) {
        double Jh = jhat_integral(*j, p);
        double p3 = p * p * p;
        return g->d2(p) - 4.0 * g->d0(1.0) / p3 +
               2.0 * (6.0 - 2.0 * p) / (p3 * p) * Jh + 4.0 * (p - 2.0) / p3 * (*j)(p) +
               2.0 * (1.0 - p) / (p * p) * j->deriv(p);
    };
    return out;
}

double apply_L_physical(const bilinear::MuFn& m, double x) {
    auto one = [](double) { return 1.0; };
    return m(x) - bilinear::apply_B2(one, m, x) - bilinear::apply_B2(m, one, x);
}

OperatorTrace roundtrip_trace(const LaplaceEval& G, const std::string& id,
                              const std::vector<double>& ps) {
    OperatorTrace tr;
    tr.input_id = id;
    tr.p_samples = ps;
    LaplaceEval fwd = lhat_eval(G);
    LaplaceEval back = lhat_inverse_eval(fwd);
    tr.forward_values.reserve(ps.size());
    double err = 0.0;
    for (double p : ps) {
        double f = fwd.d0(p);
        tr.forward_values.push_back(f);
        double g = G.d0(p);
        double r = back.d0(p);
        err = std::max(err, std::fabs(r - g) / std::max(std::fabs(g), 1e-12));
    }
    tr.inverse_roundtrip_error = err;
    return tr;
}

} // namespace coag::linop
