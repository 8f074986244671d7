#pragma once

#include "coag/bilinear.hpp"
#include "coag/laplace.hpp"

#include <string>
#include <vector>

namespace coag::linop {

/// Linearized coagulation operator in Laplace variables,
///   Lhat(M)(p) = M(p) - 2 int_p^inf int_q^inf h(r) dr dq,
///   h(r) = (M(r) - M(1)) / ((1-r) r^2) - M'(r)/r,
/// with the iterated integral collapsed to int_p^inf (r-p) h(r) dr.
/// The removable point r = 1 is filled by a series branch built from
/// M'(1), M''(1); its exact value is h(1) = -2 M'(1).
double apply_Lhat(const laplace::LaplaceEval& G, double p);

/// Lhat(G) with all three derivative channels:
///   (Lhat M)'(p)  = M'(p) + 2 int_p^inf h(r) dr,
///   (Lhat M)''(p) = M''(p) - 2 h(p).
laplace::LaplaceEval lhat_eval(const laplace::LaplaceEval& G);

/// Explicit inverse:
///   M(p) = G(p) - 2 G(1) + 2 (1-p)/p^2 int_0^p xi/(1-xi) (G(1) - G(xi)) dxi,
/// with the integrand's removable point xi = 1 filled by its limit
/// xi (G'(1) + (xi-1)/2 G''(1)); at p = 1 the value is exactly -G(1).
double invert_Lhat(const laplace::LaplaceEval& G, double p);

/// Inverse with derivative channels (differentiating the closed form).
laplace::LaplaceEval lhat_inverse_eval(const laplace::LaplaceEval& G);

/// Physical-space linearization at the flat state for the constant kernel:
///   m(x) - B2(1, m)(x) - B2(m, 1)(x).
double apply_L_physical(const bilinear::MuFn& m, double x);

struct OperatorTrace {
    std::string input_id;
    std::vector<double> p_samples;
    std::vector<double> forward_values;
    double inverse_roundtrip_error = 0.0; // sup rel. error of Lhat^{-1}(Lhat G) vs G
};

OperatorTrace roundtrip_trace(const laplace::LaplaceEval& G, const std::string& id,
                              const std::vector<double>& p_samples);

} // namespace coag::linop
