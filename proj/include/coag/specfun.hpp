#pragma once

namespace coag::specfun {

/// Gamma function, thin wrapper kept for symmetry with the functions below.
double gamma_fn(double a);

/// Euler beta function B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b), a,b > 0.
double beta_fn(double a, double b);

/// Upper incomplete gamma Gamma(a,x) = int_x^inf t^{a-1} e^{-t} dt
/// for x >= 0 and a > -1 (a != 0 when the recurrence for a < 0 is used,
/// a = 0 is supported through the exponential integral branch).
double gamma_upper(double a, double x);

/// e^x * Gamma(a,x).  Stays O(x^{a-1}) for large x where gamma_upper
/// underflows; used whenever the e^x factor would otherwise overflow.
double gamma_upper_scaled(double a, double x);

/// Lower regularized incomplete gamma P(a,x) = gamma(a,x)/Gamma(a), a > 0.
double gamma_lower_regularized(double a, double x);

} // namespace coag::specfun
