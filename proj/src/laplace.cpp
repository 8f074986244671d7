#include "coag/laplace.hpp"
#include "coag/errors.hpp"
#include "coag/quadrature.hpp"
#include "coag/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace coag::laplace {

double LaplaceEval::deriv(int k, double p) const {
    switch (k) {
        case 0: return d0(p);
        case 1: return d1(p);
        case 2: return d2(p);
    }
    throw DomainError("derivative order must be 0, 1 or 2");
}

LaplaceEval LaplaceEval::analytic(std::function<double(double)> f0,
                                  std::function<double(double)> f1,
                                  std::function<double(double)> f2) {
    return LaplaceEval{std::move(f0), std::move(f1), std::move(f2), 0.0};
}

LaplaceEval LaplaceEval::mu_bar() {
    return analytic([](double p) { return 1.0 / p; },
                    [](double p) { return -1.0 / (p * p); },
                    [](double p) { return 2.0 / (p * p * p); });
}

LaplaceEval LaplaceEval::shift(const LaplaceEval& L, double n) {
    LaplaceEval out;
    out.domain_min = L.domain_min - n;
    out.omega0 = [L, n](double p) { return L.d0(p + n); };
    out.omega1 = [L, n](double p) { return L.d1(p + n); };
    out.omega2 = [L, n](double p) { return L.d2(p + n); };
    return out;
}

LaplaceEval LaplaceEval::lincomb(double a, const LaplaceEval& L, double b, const LaplaceEval& M) {
    LaplaceEval out;
    out.domain_min = std::max(L.domain_min, M.domain_min);
    out.omega0 = [a, L, b, M](double p) { return a * L.d0(p) + b * M.d0(p); };
    out.omega1 = [a, L, b, M](double p) { return a * L.d1(p) + b * M.d1(p); };
    out.omega2 = [a, L, b, M](double p) { return a * L.d2(p) + b * M.d2(p); };
    return out;
}

LaplaceEval transform(const profiles::Profile& p) {
    auto sp = std::make_shared<profiles::Profile>(p);
    LaplaceEval out;
    out.domain_min = -sp->decay_rate();
    out.omega0 = [sp](double q) { return sp->integrate_weighted(0.0, q); };
    out.omega1 = [sp](double q) { return -sp->integrate_weighted(1.0, q); };
    out.omega2 = [sp](double q) { return sp->integrate_weighted(2.0, q); };
    return out;
}

LaplaceEval transform_mu(const profiles::Profile& p) {
    LaplaceEval base = transform(p);
    LaplaceEval out = LaplaceEval::shift(base, -1.0);
    return out;
}

LaplaceEval transform_mu_offset(const profiles::Profile& p) {
    return LaplaceEval::lincomb(1.0, transform_mu(p), -1.0, LaplaceEval::mu_bar());
}

LaplaceEval transform_samples(const std::vector<double>& xs,
                              const std::vector<double>& vals,
                              double tail_rate) {
    if (xs.size() != vals.size() || xs.size() < 8)
        throw DomainError("transform_samples needs >= 8 matching samples");
    if (!(tail_rate > 0.0)) throw DomainError("transform_samples needs a positive tail rate");
    struct Tab {
        std::vector<double> t, v, x;
        double rate, amp, left_rho, left_v0, x0, xn;
        double eval(double xx) const {
            if (xx >= xn) {
                double e = -rate * xx;
                return e < -740.0 ? 0.0 : amp * std::exp(e);
            }
            if (xx <= x0) {
                return left_v0 * std::pow(xx / x0, left_rho);
            }
            double tt = std::log(xx);
            int n = static_cast<int>(t.size());
            int i = static_cast<int>((tt - t.front()) / (t.back() - t.front()) * (n - 1));
            i = std::clamp(i, 0, n - 2);
            int j0 = std::clamp(i - 1, 0, n - 4);
            double acc = 0.0;
            for (int j = j0; j < j0 + 4; ++j) {
                double lj = 1.0;
                for (int k = j0; k < j0 + 4; ++k) {
                    if (k == j) continue;
                    lj *= (tt - t[k]) / (t[j] - t[k]);
                }
                acc += lj * v[j];
            }
            return acc;
        }
    };
    auto tab = std::make_shared<Tab>();
    tab->x = xs;
    tab->v = vals;
    tab->t.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) tab->t[i] = std::log(xs[i]);
    tab->rate = tail_rate;
    tab->x0 = xs.front();
    tab->xn = xs.back();
    tab->amp = vals.back() * std::exp(tail_rate * xs.back());
    // left power-law fit; falls back to a constant for sign changes
    tab->left_v0 = vals.front();
    tab->left_rho = 0.0;
    if (vals[0] * vals[1] > 0.0) {
        double rho = std::log(vals[1] / vals[0]) / (tab->t[1] - tab->t[0]);
        tab->left_rho = std::clamp(rho, -0.9, 4.0);
    }

    auto integral = [tab](double sigma, double p) {
        auto f = [&](double x) { return std::pow(x, sigma) * tab->eval(x) * std::exp(-p * x); };
        double total = 0.0;
        auto bp0 = quad::log_breakpoints(tab->x0 * 1e-10, tab->x0, 24);
        total += quad::integrate_panels(f, bp0, 8);
        for (std::size_t i = 0; i + 1 < tab->x.size(); ++i) {
            if ((tab->rate + p) * tab->x[i] > 760.0) break;
            total += quad::gauss_panel(f, tab->x[i], tab->x[i + 1], 8);
        }
        double u = (tab->rate + p) * tab->xn;
        if (u < 700.0 && tab->amp != 0.0)
            total += tab->amp * std::pow(tab->rate + p, -sigma - 1.0) *
                     specfun::gamma_upper(sigma + 1.0, u);
        return total;
    };

    LaplaceEval out;
    out.domain_min = -tail_rate;
    out.omega0 = [integral](double p) { return integral(0.0, p); };
    out.omega1 = [integral](double p) { return -integral(1.0, p); };
    out.omega2 = [integral](double p) { return integral(2.0, p); };
    return out;
}

namespace {

constexpr double kPGridMin = 1e-4;
constexpr double kPGridMax = 1e4;
constexpr int kPGridPoints = 2000;

} // namespace

NormResult seminorm(const LaplaceEval& L, int k, double chi) {
    if (k < 0 || k > 2) throw DomainError("seminorm order must be 0, 1 or 2");
    // chi beyond 1 appears in the tail-weight regularity check
    if (!(chi > 0.0 && chi <= 2.0)) throw DomainError("seminorm requires chi in (0, 2]");
    auto weighted = [&](double p) {
        double v = std::fabs(L.deriv(k, p));
        return std::pow(p, 1 + k) * std::pow(1.0 + p, chi - 1.0) * v;
    };
    const double la = std::log(kPGridMin), lb = std::log(kPGridMax);
    int best = 0;
    double best_val = -1.0;
    std::vector<double> ps(kPGridPoints);
    for (int i = 0; i < kPGridPoints; ++i) {
        ps[i] = std::exp(la + (lb - la) * i / (kPGridPoints - 1));
        double w = weighted(ps[i]);
        if (!std::isfinite(w)) throw NumericFailure("seminorm scan hit a non-finite value", w);
        if (w > best_val) {
            best_val = w;
            best = i;
        }
    }
    NormResult r;
    r.k = k;
    r.chi = chi;
    if (best == 0 || best == kPGridPoints - 1) {
        r.boundary = true;
        r.argmax_p = ps[best];
        r.value = best_val;
        return r;
    }
    double lo = ps[best - 1], hi = ps[best + 1];
    double p_star = quad::golden_max([&](double t) { return weighted(std::exp(t)); },
                                     std::log(lo), std::log(hi), 1e-12);
    r.argmax_p = std::exp(p_star);
    r.value = std::max(best_val, weighted(r.argmax_p));
    return r;
}

double fullnorm(const LaplaceEval& L, int k, double chi) {
    double sum = 0.0;
    for (int ell = 0; ell <= k; ++ell) sum += seminorm(L, ell, chi).value;
    return sum;
}

double pseminorm(const LaplaceEval& L, int k) {
    if (k < 0 || k > 2) throw DomainError("pseminorm order must be 0, 1 or 2");
    const double la = std::log(kPGridMin), lb = std::log(kPGridMax);
    double best_val = 0.0, best_p = kPGridMin;
    for (int i = 0; i < kPGridPoints; ++i) {
        double p = std::exp(la + (lb - la) * i / (kPGridPoints - 1));
        double w = std::pow(p, k) * std::fabs(L.d0(p));
        if (!std::isfinite(w)) throw NumericFailure("pseminorm scan hit a non-finite value", w);
        if (w > best_val) {
            best_val = w;
            best_p = p;
        }
    }
    (void)best_p;
    return best_val;
}

double lambda_weight(double s, double chi) {
    if (!(s > 0.0)) throw DomainError("lambda_weight requires s > 0");
    if (!(chi > 0.0 && chi <= 1.0)) throw DomainError("lambda_weight requires chi in (0, 1]");
    return s <= 1.0 ? 1.0 / s : std::pow(s, -chi);
}

} // namespace coag::laplace
