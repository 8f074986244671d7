#pragma once

#include "coag/bilinear.hpp"
#include "coag/kernels.hpp"
#include "coag/profiles.hpp"

#include <functional>
#include <utility>

namespace coag::boundary {

/// Collision frequency against the W part of the kernel,
///   beta_W(y; mu) = int_0^inf W(y,z) mu(z) e^{-z} dz,
/// by quadrature with endpoint grading for the z^{-alpha} factor.
double beta_w(const kernels::KernelSpec& spec, const bilinear::MuFn& mu, double y);

/// Same through the separable reduction
///   beta_W(y) = y^alpha m_{-alpha} + y^{-alpha} m_{+alpha},
/// m_s = int z^s mu(z) e^{-z} dz, exact for the power/brownian families.
double beta_w_from_moments(double alpha, double m_alpha, double m_neg_alpha, double y);

/// Integrating factor Phi(x; mu) = eps int_x^inf beta_W(t)/t e^{-t} dt,
/// nonincreasing with Phi -> 0 at infinity.  For the separable families it
/// reduces to incomplete-gamma closed forms
///   Phi(x) = eps [ m_{-alpha} Gamma(alpha, x) + m_alpha Gamma(-alpha, x) ];
/// the custom family keeps a nested quadrature.
class PhiEval {
public:
    PhiEval(const kernels::KernelSpec& spec, const bilinear::MuFn& mu);

    double phi(double x) const;
    double m_alpha() const { return m_alpha_; }
    double m_neg_alpha() const { return m_neg_alpha_; }

private:
    kernels::KernelSpec spec_;
    bilinear::MuFn mu_;
    bool closed_form_ = true;
    double m_alpha_ = 0.0, m_neg_alpha_ = 0.0;
};

double phi(const kernels::KernelSpec& spec, const bilinear::MuFn& mu, double x);

/// Layer functionals measured from a converged profile.
struct LayerFunctions {
    std::function<double(double)> beta_w;
    std::function<double(double)> phi;
    double kappa = 0.0;   // beta_2(mu) - 2 = 2 (int f - 1)
    double m_alpha = 0.0; // int z^alpha f(z) dz
};

LayerFunctions layer_functions(const kernels::KernelSpec& spec, const profiles::Profile& f);

/// Both sides of the reformulated profile equation
///   zeta(x) mu(x) = -eps int_x^inf (x/xi)^kappa e^{Phi(xi)-Phi(x)}
///                       beta_W(xi) (1-e^{-xi})/xi e^{-xi} mu(xi) dxi
///                 + int_x^inf e^{-xi}/xi^2 (x/xi)^kappa e^{Phi(xi)-Phi(x)}
///                       int_0^xi K(y,xi-y) y mu(y) mu(xi-y) dy dxi,
/// an exact consequence of the profile equation; the residual |lhs-rhs| is
/// an independent consistency check of a converged solution.
std::pair<double, double> bl_reconstruct(const kernels::KernelSpec& spec,
                                         const profiles::Profile& f, double x);

struct NearZeroFit {
    double beta_f = 0.0;         // 2 int f
    double layer_const = 0.0;    // geometric mean of the compensated profile
    double plateau_spread = 0.0; // max/min - 1 over the window
};

/// Compensates the near-origin window [x_min, 1e-2] by the layer ansatz
///   Q(x) = f(x) x^{2-beta(f)} exp( (eps/alpha) m~_alpha x^{-alpha} )
/// and reports how flat Q is.  The ansatz omits bounded corrections, so
/// only order-one flatness is meaningful.
NearZeroFit nearzero_fit(const kernels::KernelSpec& spec, const profiles::Profile& f);

} // namespace coag::boundary
