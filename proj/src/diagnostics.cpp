#include "coag/diagnostics.hpp"
#include "coag/boundary.hpp"
#include "coag/errors.hpp"
#include "coag/linop.hpp"
#include "coag/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace coag::diagnostics {

using bilinear::TestMeasure;
using laplace::LaplaceEval;

CheckRecord CheckRecord::hard_check(std::string name, std::string anchor, double measured,
                                    double threshold) {
    CheckRecord r;
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.measured = measured;
    r.threshold = threshold;
    r.hard = true;
    r.status = std::isfinite(measured) && measured <= threshold ? Status::pass : Status::fail;
    return r;
}

CheckRecord CheckRecord::soft_report(std::string name, std::string anchor, double measured) {
    CheckRecord r;
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.measured = measured;
    r.threshold = std::numeric_limits<double>::infinity();
    r.hard = false;
    r.status = std::isfinite(measured) ? Status::pass : Status::inconclusive;
    return r;
}

TestFamily make_test_family(std::uint64_t seed, int count) {
    TestFamily fam;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rate(0.5, 3.0);
    std::uniform_real_distribution<double> coef(0.0, 1.0);
    std::uniform_int_distribution<int> nterms(3, 6);
    for (int i = 0; i < count; ++i) {
        TestMeasure m;
        int k = nterms(rng);
        for (int j = 0; j < k; ++j) m.terms.emplace_back(coef(rng), rate(rng));
        fam.nonnegative.push_back(std::move(m));
    }
    for (int i = 0; i + 1 < count; i += 2) {
        TestMeasure d = fam.nonnegative[i];
        for (auto& [c, a] : fam.nonnegative[i + 1].terms) d.terms.emplace_back(-c, a);
        fam.signed_diffs.push_back(std::move(d));
    }
    return fam;
}

std::vector<CheckRecord> run_norm_suite(const TestFamily& family, double theta) {
    std::vector<CheckRecord> out;
    std::vector<TestMeasure> all = family.nonnegative;
    all.insert(all.end(), family.signed_diffs.begin(), family.signed_diffs.end());

    // Landau route: |w|_1 <= 2 sqrt(||w||_0 |w|_2)
    {
        double worst = 0.0;
        for (auto& m : all) {
            auto L = m.transform();
            double s1 = laplace::seminorm(L, 1, theta).value;
            double s0 = laplace::seminorm(L, 0, theta).value;
            double s2 = laplace::seminorm(L, 2, theta).value;
            double bound = 2.0 * std::sqrt(s0 * s2);
            if (bound > 0.0) worst = std::max(worst, s1 / bound);
        }
        out.push_back(CheckRecord::hard_check("landau-interpolation", "norm-interpolation",
                                              worst, 1.0 + 1e-9));
    }

    // cutoff monotonicity: |e^{-n .} w|_k <= |w|_k
    {
        double worst = 0.0;
        for (auto& m : all) {
            auto L = m.transform();
            for (int n : {1, 2, 5}) {
                auto Ln = LaplaceEval::shift(L, n);
                for (int k = 0; k <= 2; ++k) {
                    double denom = laplace::seminorm(L, k, theta).value;
                    if (denom <= 0.0) continue;
                    worst = std::max(worst, laplace::seminorm(Ln, k, theta).value / denom);
                }
            }
        }
        out.push_back(CheckRecord::hard_check("cutoff-monotonicity", "norm-cutoff", worst,
                                              1.0 + 1e-9));
    }

    // chi monotonicity of full norms
    {
        double worst = 0.0;
        const double chis[] = {0.5 * theta, theta, std::min(1.0, 2.0 * theta)};
        for (auto& m : all) {
            auto L = m.transform();
            for (int k = 0; k <= 2; ++k) {
                double prev = -1.0;
                for (double chi : chis) {
                    double v = laplace::fullnorm(L, k, chi);
                    if (prev >= 0.0 && v > 0.0) worst = std::max(worst, prev / v);
                    prev = v;
                }
            }
        }
        out.push_back(CheckRecord::hard_check("chi-monotonicity", "norm-order", worst,
                                              1.0 + 1e-9));
    }

    // weight sandwich Lambda_chi(s) <= (1+s)^{1-chi}/s <= 2^{1-chi} Lambda_chi(s)
    {
        std::mt19937_64 rng(1234);
        std::uniform_real_distribution<double> us(-4.0, 4.0), uc(0.05, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            double s = std::pow(10.0, us(rng)), chi = uc(rng);
            double lam = laplace::lambda_weight(s, chi);
            double mid = std::pow(1.0 + s, 1.0 - chi) / s;
            worst = std::max(worst, lam / mid);
            worst = std::max(worst, mid / (std::pow(2.0, 1.0 - chi) * lam));
        }
        out.push_back(CheckRecord::hard_check("lambda-sandwich", "weight-sandwich", worst,
                                              1.0 + 1e-12));
    }

    // positivity route: |Omega'(p)| <= Omega(p/2)/p for nonnegative states
    {
        double worst = 0.0;
        for (auto& m : family.nonnegative) {
            auto L = m.transform();
            for (int i = 0; i < 400; ++i) {
                double p = std::pow(10.0, -4.0 + 8.0 * i / 399.0);
                double lhs = std::fabs(L.d1(p));
                double rhs = L.d0(0.5 * p) / p;
                if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
            }
        }
        out.push_back(CheckRecord::hard_check("positivity-derivative-bound", "norm-positivity",
                                              worst, 1.0 + 1e-12));
    }

    // cutoff splitting: |(1-e^{-n.})w|_l <= n^{2-theta} |(1-zeta)w|_l
    {
        double worst = 0.0;
        for (auto& m : all) {
            auto L = m.transform();
            auto L1 = LaplaceEval::lincomb(1.0, L, -1.0, LaplaceEval::shift(L, 1));
            for (int n : {2, 3}) {
                auto Ln = LaplaceEval::lincomb(1.0, L, -1.0, LaplaceEval::shift(L, n));
                double scale = std::pow(n, 2.0 - theta);
                for (int ell = 0; ell <= 2; ++ell) {
                    double denom = scale * laplace::seminorm(L1, ell, theta).value;
                    if (denom <= 0.0) continue;
                    worst = std::max(worst, laplace::seminorm(Ln, ell, theta).value / denom);
                }
            }
        }
        out.push_back(CheckRecord::hard_check("cutoff-splitting", "norm-splitting", worst,
                                              1.0 + 1e-9));
    }

    // empirical constants (reported, not gated)
    {
        double worst_equ = 0.0, worst_reg = 0.0;
        for (auto& m : all) {
            auto L = m.transform();
            double s2 = laplace::seminorm(L, 2, theta).value;
            if (s2 > 0.0) worst_equ = std::max(worst_equ, laplace::fullnorm(L, 2, theta) / s2);
            auto L1 = LaplaceEval::lincomb(1.0, L, -1.0, LaplaceEval::shift(L, 1));
            double denom = laplace::fullnorm(L, 1, theta);
            if (denom > 0.0)
                worst_reg = std::max(worst_reg, laplace::fullnorm(L1, 0, theta + 1.0) / denom);
        }
        out.push_back(CheckRecord::soft_report("seminorm-equivalence-constant", "norm-equivalence",
                                               worst_equ));
        out.push_back(CheckRecord::soft_report("tail-weight-regularity-constant",
                                               "norm-tail-weight", worst_reg));
    }

    // positivity norm bound ||w||_2 <= C ||w||_0 (empirical constant)
    {
        double worst = 0.0;
        for (auto& m : family.nonnegative) {
            auto L = m.transform();
            double n0 = laplace::fullnorm(L, 0, theta);
            if (n0 > 0.0) worst = std::max(worst, laplace::fullnorm(L, 2, theta) / n0);
        }
        out.push_back(CheckRecord::soft_report("positivity-fullnorm-constant",
                                               "norm-positivity-full", worst));
    }
    return out;
}

std::vector<CheckRecord> run_operator_suite(double theta) {
    std::vector<CheckRecord> out;
    auto flat = LaplaceEval::mu_bar();
    auto exp1 = LaplaceEval::analytic([](double p) { return 1.0 / (1.0 + p); },
                                      [](double p) { return -1.0 / ((1.0 + p) * (1.0 + p)); },
                                      [](double p) { return 2.0 / std::pow(1.0 + p, 3); });
    auto exp2 = LaplaceEval::analytic([](double p) { return 1.0 / std::pow(1.0 + p, 2); },
                                      [](double p) { return -2.0 / std::pow(1.0 + p, 3); },
                                      [](double p) { return 6.0 / std::pow(1.0 + p, 4); });

    std::vector<double> ps;
    for (int i = 0; i < 25; ++i) ps.push_back(std::pow(10.0, -2.0 + 4.0 * i / 24.0));

    // closed-form action on the flat transform: Lhat(1/p) = -1/p
    {
        double worst = 0.0;
        for (double p : ps) {
            double v = linop::apply_Lhat(flat, p);
            worst = std::max(worst, std::fabs(v + 1.0 / p) * p);
        }
        out.push_back(CheckRecord::hard_check("lhat-flat-action", "operator-flat", worst, 1e-8));
    }

    // inverse at p = 1 returns -G(1) exactly
    {
        double worst = 0.0;
        for (auto* G : {&exp1, &exp2})
            worst = std::max(worst, std::fabs(linop::invert_Lhat(*G, 1.0) + G->d0(1.0)));
        out.push_back(CheckRecord::hard_check("inverse-value-at-one", "operator-inverse-at-one",
                                              worst, 1e-15));
    }

    // round trips both ways
    {
        double worst = 0.0;
        const LaplaceEval* gs[] = {&flat, &exp1, &exp2};
        for (auto* G : gs) {
            auto tr = linop::roundtrip_trace(*G, "g", ps);
            worst = std::max(worst, tr.inverse_roundtrip_error);
            auto inv = linop::lhat_inverse_eval(*G);
            auto back = linop::lhat_eval(inv);
            for (double p : ps) {
                double g = G->d0(p);
                worst = std::max(worst,
                                 std::fabs(back.d0(p) - g) / std::max(std::fabs(g), 1e-12));
            }
        }
        out.push_back(CheckRecord::hard_check("inverse-roundtrip", "operator-roundtrip", worst,
                                              1e-5));
    }

    // commutation with the physical-space operator for w = e^{-x}(1+x)
    {
        auto w_mu = [](double x) { return std::exp(-x) * (1.0 + x); };
        auto one = [](double) { return 1.0; };
        kernels::KernelSpec cspec = kernels::make_kernel(kernels::Family::constant, 0.0);
        bilinear::BilinearEvaluator ev_w(cspec, w_mu, 55.0);
        bilinear::BilinearEvaluator ev_one(cspec, one, 55.0);
        auto xs = quad::log_breakpoints(1e-4, 50.0, 399);
        std::vector<double> lw(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            lw[i] = w_mu(xs[i]) - ev_w.b2(one, xs[i]) - ev_one.b2(w_mu, xs[i]);
        auto Lphys = laplace::transform_samples(xs, lw, 1.0);
        auto W = LaplaceEval::analytic(
            [](double p) { return 1.0 / (1.0 + p) + 1.0 / std::pow(1.0 + p, 2); },
            [](double p) { return -1.0 / std::pow(1.0 + p, 2) - 2.0 / std::pow(1.0 + p, 3); },
            [](double p) { return 2.0 / std::pow(1.0 + p, 3) + 6.0 / std::pow(1.0 + p, 4); });
        double worst = 0.0;
        for (double p : {0.5, 2.0, 5.0}) {
            double lap = linop::apply_Lhat(W, p);
            double phys = Lphys.d0(p);
            worst = std::max(worst, std::fabs(lap - phys) / std::max(std::fabs(lap), 1e-12));
        }
        out.push_back(CheckRecord::hard_check("transform-commutation", "operator-commutation",
                                              worst, 1e-4));
    }

    // empirical boundedness constants over a 10-member family
    {
        auto fam = make_test_family(77, 10);
        double c1 = 0.0, c2 = 0.0;
        for (auto& m : fam.nonnegative) {
            auto G = m.transform();
            double base = laplace::fullnorm(G, 1, theta);
            if (base <= 0.0) continue;
            c1 = std::max(c1, laplace::fullnorm(linop::lhat_eval(G), 1, theta) / base);
            c2 = std::max(c2, laplace::fullnorm(linop::lhat_inverse_eval(G), 1, theta) / base);
        }
        out.push_back(CheckRecord::soft_report("lhat-forward-constant", "operator-bounded", c1));
        out.push_back(CheckRecord::soft_report("lhat-inverse-constant", "operator-inverse-bounded",
                                               c2));
    }
    return out;
}

std::vector<CheckRecord> run_kernel_suite(const std::vector<double>& alphas, double theta) {
    std::vector<CheckRecord> out;
    for (double alpha : alphas) {
        auto spec = kernels::make_kernel(kernels::Family::power, 1.0, alpha);
        auto repr = kernels::gamma_closed_form(alpha);
        std::string tag = "-a" + std::to_string(alpha).substr(0, 4);

        {
            double worst = 0.0;
            const double pts[][2] = {{1.0, 1.0}, {1.0, 4.0}, {3.0, 0.5}};
            for (auto& yz : pts)
                worst = std::max(worst, kernels::verify_repr(repr, spec, yz[0], yz[1], 1e-4));
            out.push_back(CheckRecord::hard_check("gamma-reconstruction" + tag,
                                                  "representation-identity", worst, 1e-4));
        }
        {
            double worst = 0.0;
            for (double s : {0.5, 2.0, 10.0}) {
                double a = kernels::gamma_jump(spec, s);
                double b = repr.regular(s, 1.0);
                worst = std::max(worst, std::fabs(a - b) / std::max(std::fabs(b), 1e-300));
            }
            out.push_back(CheckRecord::hard_check("gamma-route-agreement" + tag,
                                                  "jump-closed-form", worst, 1e-12));
        }
        {
            // int int |Gamma| (1+xi)^{-k-theta} (1+eta)^{-l-theta}, (k,l) = (1,1)
            auto inner = [&](double s) {
                auto f = [&](double eta) {
                    return std::pow(1.0 + s * eta, -1.0 - theta) *
                           std::pow(1.0 + eta, -1.0 - theta);
                };
                auto bp = quad::log_breakpoints(1e-8, 1e8, 48);
                return quad::integrate_panels(f, bp, 8);
            };
            auto bp_s = quad::log_breakpoints(1e-9, 1e9, 54);
            double reg = quad::integrate_panels(
                [&](double s) { return std::fabs(repr.jump(s)) * inner(s); }, bp_s, 8);
            double diag = repr.diag_coeff *
                          quad::integrate_panels(
                              [&](double xi) { return std::pow(1.0 + xi, -2.0 - 2.0 * theta); },
                              quad::log_breakpoints(1e-9, 1e9, 54), 8);
            out.push_back(CheckRecord::soft_report("gamma-weighted-integral" + tag,
                                                   "gamma-integrability", reg + diag));
        }
        {
            // eta-marginal growth at small xi against xi^{-alpha} + log(1/xi)
            double cmax = 0.0;
            for (double xi : {1e-3, 3e-4, 1e-4}) {
                auto f = [&](double eta) {
                    return std::fabs(repr.regular(xi, eta)) * std::pow(1.0 + eta, -theta);
                };
                auto bp = quad::log_breakpoints(xi * 1e-6, 1e8, 60);
                double val = quad::integrate_panels(f, bp, 8) +
                             repr.diag_coeff * std::pow(1.0 + xi, -theta);
                double envelope = std::pow(xi, -alpha) + std::log(1.0 / xi);
                cmax = std::max(cmax, val / envelope);
            }
            out.push_back(CheckRecord::soft_report("gamma-eta-marginal-growth" + tag,
                                                   "gamma-eta-integral", cmax));
        }
    }
    return out;
}

std::vector<CheckRecord> run_uniqueness_suite(double alpha, const std::vector<double>& eps_list,
                                              const solver::SolverOptions& opts) {
    std::vector<CheckRecord> out;
    auto spec_template = kernels::make_kernel(kernels::Family::power, 0.0, alpha);
    const double theta = opts.resolved_theta(alpha);

    std::vector<double> eps_sorted = eps_list;
    std::sort(eps_sorted.begin(), eps_sorted.end());

    // smallness rows (ascending eps) and monotonicity
    std::vector<double> with_zero = eps_sorted;
    if (with_zero.empty() || with_zero.front() != 0.0) with_zero.insert(with_zero.begin(), 0.0);
    auto rows = solver::smallness_curve(spec_template, with_zero, opts);
    {
        bool all_conv = true;
        double worst = 0.0; // max ratio norm(eps_i)/norm(eps_{i+1}) must stay < 1
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            all_conv = all_conv && rows[i].converged && rows[i + 1].converged;
            if (rows[i + 1].norm_m0 > 0.0)
                worst = std::max(worst, rows[i].norm_m0 / rows[i + 1].norm_m0);
        }
        CheckRecord rec = CheckRecord::hard_check("smallness-monotone", "smallness-curve", worst,
                                                  1.0 - 1e-12);
        if (!all_conv) rec.status = CheckRecord::Status::inconclusive;
        out.push_back(rec);
        out.push_back(CheckRecord::hard_check("smallness-zero-row", "smallness-zero",
                                              rows.front().norm_m0, 0.0));
    }

    // probes per eps and the uniform second-order norm bound
    profiles::Grid grid = profiles::Grid::log_uniform(1e-4, 40.0, 600);
    auto init1 = solver::default_init(grid);
    auto init2 = profiles::Profile::from_function(
        grid, [](double x) { return 0.5 * std::exp(-0.5 * x); });
    double worst_dist = 0.0, worst_norm2 = 0.0;
    bool inconclusive = false;
    for (double eps : eps_sorted) {
        if (eps == 0.0) continue;
        auto spec = kernels::make_kernel(kernels::Family::power, eps, alpha);
        auto probe = solver::contraction_probe(spec, init1, init2, opts);
        inconclusive = inconclusive || probe.inconclusive;
        worst_dist = std::max(worst_dist, probe.distance_norm0);
        auto [f, rep] = solver::solve_selfsim(spec, init1, opts);
        worst_norm2 = std::max(worst_norm2, laplace::fullnorm(laplace::transform_mu(f), 2, theta));
    }
    {
        CheckRecord rec = CheckRecord::hard_check("probe-distance", "uniqueness-probe",
                                                  worst_dist, 1e-6);
        if (inconclusive) rec.status = CheckRecord::Status::inconclusive;
        out.push_back(rec);
    }
    out.push_back(CheckRecord::hard_check("state-norm-uniform-bound", "uniform-bound",
                                          worst_norm2, 6.0));
    return out;
}

bool any_hard_fail(const std::vector<CheckRecord>& records) {
    for (auto& r : records)
        if (r.hard && r.status == CheckRecord::Status::fail) return true;
    return false;
}

} // namespace coag::diagnostics
