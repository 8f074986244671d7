#include "coag/bilinear.hpp"
#include "coag/errors.hpp"
#include "coag/quadrature.hpp"
#include "coag/specfun.hpp"

#include <algorithm>
#include <cmath>

namespace coag::bilinear {

using kernels::Family;
using kernels::KernelSpec;

BilinearEvaluator::BilinearEvaluator(const KernelSpec& spec, MuFn m2, double x_upper)
    : spec_(spec), m2_(std::move(m2)), x_upper_(x_upper) {
    if (!(x_upper > 1.0)) throw DomainError("bilinear evaluator requires x_upper > 1");
    separable_ = spec_.family != Family::custom;
    if (!separable_) return;
    build_table(0, 0.0);
    if (spec_.epsilon > 0.0 && spec_.family != Family::constant && spec_.alpha > 0.0) {
        build_table(1, spec_.alpha);
        build_table(2, -spec_.alpha);
    } else if (spec_.epsilon > 0.0 && spec_.family != Family::constant) {
        // alpha = 0 power kernel: W = 2, fold into the constant coefficient
    }
}

void BilinearEvaluator::build_table(int which, double sigma) {
    Table& tab = tables_[which];
    tab.sigma = sigma;
    tab.x_lo = 1e-7;

    auto f2 = [&](double z) { return m2_(z) * std::exp(-z); };

    // Node layout: log-spaced on [x_lo, 1], linear with step h on
    // [1, lin_top] where lin_top >= x_upper.
    const int n_log = 800;
    tab.h = 0.02;
    const int n_lin = static_cast<int>(std::ceil((x_upper_ - 1.0) / tab.h)) + 2;
    const double lin_top = 1.0 + tab.h * (n_lin - 1);
    const double z_top = lin_top + 45.0;

    tab.logx_nodes.resize(n_log);
    for (int i = 0; i < n_log; ++i)
        tab.logx_nodes[i] = std::exp(std::log(tab.x_lo) +
                                     (0.0 - std::log(tab.x_lo)) * i / (n_log - 1));
    tab.logx_nodes.front() = tab.x_lo;
    tab.logx_nodes.back() = 1.0;

    // Cumulative integration from the top.  Tail beyond z_top with m2
    // frozen at its value there (the e^{-z} weight makes the model error
    // ~e^{-z_top}, far below everything else).
    auto integrand = [&](double z) { return std::pow(z, sigma) * f2(z); };
    double R = m2_(z_top) * specfun::gamma_upper(sigma + 1.0, z_top);
    {
        double upper = z_top;
        while (upper > lin_top + 1e-12) {
            double lower = std::max(lin_top, upper - 0.25);
            R += quad::gauss_panel(integrand, lower, upper, 8);
            upper = lower;
        }
    }

    std::vector<double> lin_R(n_lin);
    lin_R[n_lin - 1] = R;
    for (int i = n_lin - 2; i >= 0; --i) {
        double xi = 1.0 + tab.h * i;
        R += quad::gauss_panel(integrand, xi, xi + tab.h, 8);
        lin_R[i] = R;
    }
    std::vector<double> log_R(n_log);
    {
        double upper = 1.0;
        for (int i = n_log - 1; i >= 0; --i) {
            double xi = tab.logx_nodes[i];
            if (i < n_log - 1) R += quad::gauss_panel(integrand, xi, upper, 8);
            upper = xi;
            log_R[i] = R;
        }
    }

    tab.lin_T.resize(n_lin);
    for (int i = 0; i < n_lin; ++i)
        tab.lin_T[i] = std::exp(1.0 + tab.h * i) * lin_R[i];
    tab.logx_T.resize(n_log);
    for (int i = 0; i < n_log; ++i)
        tab.logx_T[i] = std::exp(tab.logx_nodes[i]) * log_R[i];

    tab.f2_at_lo = f2(tab.x_lo);
    tab.T_at_lo = tab.logx_T.front();
}

namespace {

// 4-point Lagrange on a uniformly spaced abscissa array.
double cubic_uniform(const std::vector<double>& vals, double t0, double h, double t) {
    const int n = static_cast<int>(vals.size());
    int i = static_cast<int>((t - t0) / h);
    i = std::clamp(i, 0, n - 2);
    int j0 = std::clamp(i - 1, 0, n - 4);
    double acc = 0.0;
    for (int j = j0; j < j0 + 4; ++j) {
        double lj = 1.0;
        double tj = t0 + h * j;
        for (int k = j0; k < j0 + 4; ++k) {
            if (k == j) continue;
            double tk = t0 + h * k;
            lj *= (t - tk) / (tj - tk);
        }
        acc += lj * vals[j];
    }
    return acc;
}

} // namespace

double BilinearEvaluator::inner_T(int which, double X) const {
    const Table& tab = tables_[which];
    if (X >= 1.0) {
        double Xc = std::min(X, x_upper_);
        return cubic_uniform(tab.lin_T, 1.0, tab.h, Xc);
    }
    if (X <= tab.x_lo) {
        // T(X) ~ T(x_lo) + f2(x_lo) (x_lo^{1+s} - X^{1+s})/(1+s), e^X ~ 1
        double s1 = tab.sigma + 1.0;
        double corr = tab.f2_at_lo * (std::pow(tab.x_lo, s1) - std::pow(std::max(X, 0.0), s1)) / s1;
        return tab.T_at_lo + corr;
    }
    double t0 = std::log(tab.x_lo);
    double h = (0.0 - t0) / (tab.logx_nodes.size() - 1);
    return cubic_uniform(tab.logx_T, t0, h, std::log(X));
}

double BilinearEvaluator::outer(const MuFn& m1, double x, double const_w, double eps_w) const {
    const double alpha = spec_.alpha;
    const bool with_w = eps_w > 0.0 && alpha > 0.0;
    const double const_eff = const_w + (eps_w > 0.0 && alpha == 0.0 ? 2.0 * eps_w : 0.0);

    auto g = [&](double y) {
        double X = x - y;
        if (X < 0.0) X = 0.0;
        double acc = const_eff * inner_T(0, X);
        if (with_w) {
            double ya = std::pow(y, alpha);
            acc += eps_w * (ya * inner_T(2, X) + inner_T(1, X) / ya);
        }
        return y * m1(y) * acc;
    };

    // panels: log-graded toward y = 0 (endpoint power behaviour and the
    // near-origin layer of m1), geometric toward y = x (X^{1-alpha} kink
    // of the T tables at X = 0)
    auto left = quad::log_breakpoints(x * 1e-12, 0.5 * x, 30);
    auto right = quad::geometric_breakpoints_to_b(0.5 * x, x, 18, 1.9);
    double total = quad::integrate_panels(g, left, 8) + quad::integrate_panels(g, right, 8);
    return total / (x * x);
}

double BilinearEvaluator::custom_outer(const MuFn& m1, double x, double const_w, double eps_w) const {
    auto inner = [&](double y, double X) {
        auto f = [&](double z) {
            double w = const_w;
            if (eps_w > 0.0) w += eps_w * kernels::eval_W(spec_, y, z);
            return w * m2_(z) * std::exp(-(z - X));
        };
        auto bp = quad::geometric_breakpoints(std::max(X, x * 1e-14), X + 45.0, 30, 1.9);
        return quad::integrate_panels(f, bp, 8);
    };
    auto g = [&](double y) { return y * m1(y) * inner(y, x - y); };
    auto left = quad::log_breakpoints(x * 1e-12, 0.5 * x, 24);
    auto right = quad::geometric_breakpoints_to_b(0.5 * x, x, 16, 1.9);
    double total = quad::integrate_panels(g, left, 8) + quad::integrate_panels(g, right, 8);
    return total / (x * x);
}

double BilinearEvaluator::bk(const MuFn& m1, double x) const {
    if (!(x > 0.0)) throw DomainError("bilinear form requires x > 0");
    if (x > x_upper_) throw DomainError("x exceeds the evaluator range");
    if (!separable_) return custom_outer(m1, x, 2.0, spec_.epsilon);
    return outer(m1, x, 2.0, spec_.epsilon);
}

double BilinearEvaluator::b2(const MuFn& m1, double x) const {
    if (!(x > 0.0)) throw DomainError("bilinear form requires x > 0");
    if (x > x_upper_) throw DomainError("x exceeds the evaluator range");
    if (!separable_) return custom_outer(m1, x, 2.0, 0.0);
    return outer(m1, x, 2.0, 0.0);
}

double BilinearEvaluator::bw(const MuFn& m1, double x) const {
    if (!(x > 0.0)) throw DomainError("bilinear form requires x > 0");
    if (x > x_upper_) throw DomainError("x exceeds the evaluator range");
    if (spec_.family == Family::constant)
        throw UnsupportedOperation("W part is undefined for the constant family");
    if (!separable_) return custom_outer(m1, x, 0.0, 1.0);
    return outer(m1, x, 0.0, 1.0);
}

namespace {
double default_upper(double x) { return std::max(2.0 * x, 50.0); }
} // namespace

double apply_BK(const KernelSpec& spec, const MuFn& m1, const MuFn& m2, double x) {
    return BilinearEvaluator(spec, m2, default_upper(x)).bk(m1, x);
}

double apply_B2(const MuFn& m1, const MuFn& m2, double x) {
    KernelSpec c = kernels::make_kernel(Family::constant, 0.0);
    return BilinearEvaluator(c, m2, default_upper(x)).b2(m1, x);
}

double apply_BW(const KernelSpec& spec, const MuFn& m1, const MuFn& m2, double x) {
    return BilinearEvaluator(spec, m2, default_upper(x)).bw(m1, x);
}

std::vector<double> apply_BK_many(const KernelSpec& spec, const MuFn& m1,
                                  const MuFn& m2, const std::vector<double>& xs) {
    double xmax = 1.0;
    for (double x : xs) xmax = std::max(xmax, x);
    BilinearEvaluator ev(spec, m2, xmax * 1.0000001);
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = ev.bk(m1, xs[i]);
    return out;
}

double laplace_B2(const laplace::LaplaceEval& L1, const laplace::LaplaceEval& L2, double p) {
    if (!(p > 0.0)) throw DomainError("laplace_B2 requires p > 0");
    if (std::fabs(p - 1.0) < 1e-4) {
        // (Omega2(p)-Omega2(1))/(p-1) = Omega2'(1) + (p-1)/2 Omega2''(1) + ...
        return 2.0 * L1.d1(p) * (L2.d1(1.0) + 0.5 * (p - 1.0) * L2.d2(1.0));
    }
    return 2.0 / (p - 1.0) * L1.d1(p) * (L2.d0(p) - L2.d0(1.0));
}

double laplace_BW(const kernels::GammaRepr& repr, const laplace::LaplaceEval& L1,
                  const laplace::LaplaceEval& L2, double p) {
    if (!(p > 0.0)) throw DomainError("laplace_BW requires p > 0");
    if (!repr.jump) throw UnsupportedOperation("laplace_BW needs the jump density");

    const bool near_one = std::fabs(p - 1.0) < 1e-4;

    // difference quotients (Omega2(p+e) - Omega2(1+e))/(p-1) and the same
    // for Omega2'; Taylor branch through p = 1
    auto dq0 = [&](double eta) {
        if (near_one) return L2.d1(1.0 + eta) + 0.5 * (p - 1.0) * L2.d2(1.0 + eta);
        return (L2.d0(p + eta) - L2.d0(1.0 + eta)) / (p - 1.0);
    };
    auto dq1 = [&](double eta) {
        if (near_one) return L2.d2(1.0 + eta);
        return (L2.d1(p + eta) - L2.d1(1.0 + eta)) / (p - 1.0);
    };

    // regular part: -int phi(s) int [ O1''(s eta + p) dq0(eta)
    //                               + O1'(s eta + p) dq1(eta) ] deta ds
    auto eta_integral = [&](double s) {
        auto f = [&](double eta) {
            double q = s * eta + p;
            return L1.d2(q) * dq0(eta) + L1.d1(q) * dq1(eta);
        };
        auto bp = quad::log_breakpoints(1e-7, 1e5, 42);
        double head = quad::gauss_panel(f, 0.0, 1e-7, 4);
        return head + quad::integrate_panels(f, bp, 8);
    };
    auto bp_s = quad::log_breakpoints(1e-9, 1e7, 52);
    auto s_f = [&](double s) { return repr.jump(s) * eta_integral(s); };
    double regular = quad::integrate_panels(s_f, bp_s, 8);

    // Dirac part: same integrand on the diagonal xi = eta
    auto diag_f = [&](double xi) {
        double q = xi + p;
        return L1.d2(q) * dq0(xi) + L1.d1(q) * dq1(xi);
    };
    auto bp_d = quad::log_breakpoints(1e-8, 1e5, 44);
    double diag = repr.diag_coeff *
                  (quad::gauss_panel(diag_f, 0.0, 1e-8, 4) + quad::integrate_panels(diag_f, bp_d, 8));

    return -(regular + diag);
}

double TestMeasure::eval(double x) const {
    double v = 0.0;
    for (auto& [c, a] : terms) v += c * std::exp(-a * x);
    return v;
}

laplace::LaplaceEval TestMeasure::transform() const {
    auto t = terms;
    return laplace::LaplaceEval::analytic(
        [t](double p) {
            double v = 0.0;
            for (auto& [c, a] : t) v += c / (a + p);
            return v;
        },
        [t](double p) {
            double v = 0.0;
            for (auto& [c, a] : t) v -= c / ((a + p) * (a + p));
            return v;
        },
        [t](double p) {
            double v = 0.0;
            for (auto& [c, a] : t) v += 2.0 * c / ((a + p) * (a + p) * (a + p));
            return v;
        });
}

double TestMeasure::min_rate() const {
    double r = 1e30;
    for (auto& [c, a] : terms)
        if (c != 0.0) r = std::min(r, a);
    return r == 1e30 ? 1.0 : r;
}

BilinearBoundReport verify_bilinear_bound(const KernelSpec& spec,
                                          const std::vector<std::pair<TestMeasure, TestMeasure>>& pairs,
                                          double theta) {
    BilinearBoundReport rep;
    const bool with_w = spec.family != Family::constant && spec.alpha > 0.0;
    for (auto& [w1, w2] : pairs) {
        auto L1 = w1.transform();
        auto L2 = w2.transform();
        double n1_1 = laplace::fullnorm(L1, 1, theta);
        double n2_1 = laplace::fullnorm(L2, 1, theta);
        if (n1_1 < 1e-14 || n2_1 < 1e-14) {
            ++rep.pairs_skipped;
            continue;
        }
        // |B2|_2 via the closed form as the second-derivative channel
        laplace::LaplaceEval b2dd;
        b2dd.omega2 = [&, L1, L2](double p) { return laplace_B2(L1, L2, p); };
        double num_b2 = laplace::seminorm(b2dd, 2, theta).value;
        rep.max_ratio_b2 = std::max(rep.max_ratio_b2, num_b2 / (n1_1 * n2_1));

        if (with_w) {
            double n1_2 = laplace::fullnorm(L1, 2, theta);
            double n2_2 = laplace::fullnorm(L2, 2, theta);
            // tabulate BW physically on a log grid and transform the samples
            auto m1 = [&w1 = w1](double x) { return w1.eval(x); };
            auto m2 = [&w2 = w2](double x) { return w2.eval(x); };
            BilinearEvaluator ev(spec, m2, 60.0);
            auto xs = quad::log_breakpoints(1e-4, 50.0, 399);
            std::vector<double> vals(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) vals[i] = ev.bw(m1, xs[i]);
            double rate = std::max(0.25, w2.min_rate());
            auto Lb = laplace::transform_samples(xs, vals, rate);
            double num_bw = laplace::fullnorm(Lb, 2, theta - spec.alpha);
            rep.max_ratio_bw = std::max(rep.max_ratio_bw, num_bw / (n1_2 * n2_2));
        }
        ++rep.pairs_used;
    }
    return rep;
}

} // namespace coag::bilinear
