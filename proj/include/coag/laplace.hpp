#pragma once

#include "coag/profiles.hpp"

#include <functional>
#include <string>
#include <vector>

namespace coag::laplace {

/// Evaluator bundle for a Laplace transform Omega and its first two
/// derivatives on p > domain_min.  Derivatives of transforms of gridded
/// profiles are computed by moment quadrature, never by finite differences
/// of Omega (which cancels catastrophically at small p).
struct LaplaceEval {
    std::function<double(double)> omega0;
    std::function<double(double)> omega1;
    std::function<double(double)> omega2;
    double domain_min = 0.0;

    double d0(double p) const { return omega0(p); }
    double d1(double p) const { return omega1(p); }
    double d2(double p) const { return omega2(p); }
    double deriv(int k, double p) const;

    static LaplaceEval analytic(std::function<double(double)> f0,
                                std::function<double(double)> f1,
                                std::function<double(double)> f2);

    /// Transform of the flat state mu = 1: {1/p, -1/p^2, 2/p^3}.
    static LaplaceEval mu_bar();

    /// Transform of e^{-n x} omega: p -> Omega(p + n).
    static LaplaceEval shift(const LaplaceEval& L, double n);

    /// a*L + b*M channelwise.
    static LaplaceEval lincomb(double a, const LaplaceEval& L, double b, const LaplaceEval& M);
};

/// Transform of a profile f: Omega(p) = int f e^{-px} dx.
LaplaceEval transform(const profiles::Profile& p);

/// Transform of mu = f e^x: U(p) = Omega_f(p - 1) (valid for p > 1 - decay rate).
LaplaceEval transform_mu(const profiles::Profile& p);

/// Transform of mu - 1 = f e^x - 1 (channels of transform_mu minus those of mu_bar).
LaplaceEval transform_mu_offset(const profiles::Profile& p);

/// Transform of tabulated signed samples on a log grid with an exponential
/// tail model of the given rate beyond the last node and a fitted power-law
/// extension below the first.  Report-grade accuracy for diagnostics.
LaplaceEval transform_samples(const std::vector<double>& xs,
                              const std::vector<double>& vals,
                              double tail_rate);

struct NormResult {
    int k = 0;
    double chi = 0.0;
    double value = 0.0;
    double argmax_p = 0.0;
    bool boundary = false;
};

/// |omega|_{k,chi} = sup_{p>0} p^{1+k} (1+p)^{chi-1} |d^k Omega|, evaluated
/// on a 2000-point log grid over [1e-4, 1e4] and refined by golden-section
/// search around the discrete argmax.  boundary is set when the sup sits at
/// a grid edge (e.g. the flat state at p -> 0).
NormResult seminorm(const LaplaceEval& L, int k, double chi);

/// ||omega||_{k,chi} = sum of seminorms for orders 0..k.
double fullnorm(const LaplaceEval& L, int k, double chi);

/// sup_{p>0} p^k |Omega(p)| over the same grid (prefactor-equation norm).
double pseminorm(const LaplaceEval& L, int k);

/// Lambda_chi(s) = s^{-1} for s <= 1, s^{-chi} for s >= 1.
double lambda_weight(double s, double chi);

} // namespace coag::laplace
