#pragma once

#include <complex>
#include <functional>
#include <string>

namespace coag::kernels {

enum class Family { constant, power, brownian, custom };

Family family_from_string(const std::string& name);
std::string to_string(Family f);

/// Rate kernel K = 2 + eps*W, homogeneous of degree zero and symmetric.
/// W is bounded by (x/y)^alpha + (y/x)^alpha with alpha in [0, 1/2).
///
/// Families:
///   constant  K = 2 (eps ignored for W evaluation)
///   power     W(x,y) = (x/y)^alpha + (y/x)^alpha
///   brownian  the classical spherical-diffusion kernel expanded about its
///             constant part: W(x,y) = (x/y)^{1/3} + (y/x)^{1/3}, alpha = 1/3.
///             Physically eps ~ 1, which is outside the small-perturbation
///             regime the solver targets; the family is provided for
///             experimentation.
///   custom    W(x,y) = w1(x/y) supplied by the user; w1 must satisfy
///             w1(s) = w1(1/s) and the alpha growth bound.  For the
///             Stieltjes jump route the user must also supply the boundary
///             values of the analytic continuation on the cut (see
///             boundary_plus below).  The continuation must additionally
///             have nonnegative real part on the right half plane; this is
///             a user obligation that cannot be checked from real-axis
///             data and is not verified here.
struct KernelSpec {
    Family family = Family::constant;
    double epsilon = 0.0;
    double alpha = 0.0;
    double c_w = 1.0; // leading coefficient of W(s,1) ~ c_w s^{-alpha} as s->0

    // custom family only: W(s,1) on s>0 and W_+(-s) for s>0 (value of the
    // upper-half-plane continuation on the negative axis).  The lower
    // boundary value is its conjugate for kernels real on (0,inf).
    std::function<double(double)> custom_w1;
    std::function<std::complex<double>(double)> custom_boundary_plus;
};

KernelSpec make_kernel(Family family, double epsilon, double alpha = 0.0);

/// W(x,y); throws UnsupportedOperation for the constant family.
double eval_W(const KernelSpec& spec, double x, double y);

/// K(x,y) = 2 + eps*W(x,y); equals 2 exactly when eps = 0 or family constant.
double eval_K(const KernelSpec& spec, double x, double y);

/// Representation of W(y,z)/(y+z) as a double Laplace transform:
///   W(y,z)/(y+z) = int int Gamma(xi,eta) e^{-xi y - eta z} dxi deta,
/// where Gamma = regular part + diag_coeff * delta(xi - eta).
/// The regular part is symmetric and homogeneous of degree -1.
struct GammaRepr {
    std::function<double(double, double)> regular;
    double diag_coeff = 0.0;
    double alpha = 0.0;

    /// Jump density phi with regular(xi,eta) = phi(xi/eta)/eta.
    std::function<double(double)> jump;
};

/// Closed form for the pure power kernel W = (x/y)^a + (y/x)^a:
///   regular(xi,eta) = sin(pi a)/pi * ((xi/eta)^a - (eta/xi)^a)/(xi - eta),
///   diag_coeff      = 2 cos(pi a),
/// with the removable diagonal singularity filled by its limit
/// 2a sin(pi a)/(pi eta).
GammaRepr gamma_closed_form(double alpha);

/// Jump density phi(s) of the Stieltjes representation, from the boundary
/// values of the analytic continuation of W(.,1):
///   phi(s) = (G_-(-s) - G_+(-s)) / (2 pi i (1 - s)),  s > 0,
/// real-valued because G_- = conj(G_+) on the cut.  For the power family
/// this evaluates the closed form sin(pi a)(s^a - s^{-a})/(pi(s-1)) with
/// the limit 2a sin(pi a)/pi at s = 1.
double gamma_jump(const KernelSpec& spec, double s);

/// GammaRepr built from gamma_jump (power/brownian: closed form; custom:
/// user boundary evaluators).
GammaRepr gamma_from_jump(const KernelSpec& spec);

/// Numerically reconstructs W(y,z)/(y+z) from the representation by a
/// double quadrature in the rotated variables u = xi/eta, v = xi*eta
/// (the regular part is smooth across the diagonal in these variables)
/// plus the exact Dirac contribution diag_coeff/(y+z).
/// Returns |reconstruction - W(y,z)/(y+z)|; throws NumericFailure with the
/// achieved estimate when the quadrature cannot reach tol.
double verify_repr(const GammaRepr& repr, const KernelSpec& spec,
                   double y, double z, double tol);

} // namespace coag::kernels
