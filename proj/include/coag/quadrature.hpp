#pragma once

#include <functional>
#include <vector>

namespace coag::quad {

/// Gauss-Legendre rule on [-1,1].  Nodes/weights are computed once per
/// order and cached (Newton iteration on the Legendre recurrence).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

/// Integral of f over [a,b] with a single n-point Gauss panel.
double gauss_panel(const std::function<double(double)>& f, double a, double b, int n = 20);

/// Integral of f over consecutive panels given by breakpoints.
double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& breakpoints, int n_per_panel = 12);

/// Breakpoints of m geometric panels covering [a,b], clustered toward a.
/// First panel has width ~(b-a)*(1-r)/(1-r^m) * r^{m-1}.
std::vector<double> geometric_breakpoints(double a, double b, int m, double ratio = 2.0);

/// Same but clustered toward b.
std::vector<double> geometric_breakpoints_to_b(double a, double b, int m, double ratio = 2.0);

/// Log-uniform breakpoints over [a,b], a > 0.
std::vector<double> log_breakpoints(double a, double b, int m);

/// Integral over [a, infinity) of a function decaying at least like
/// e^{-rate*x} beyond some point: panels up to a cutoff where the decay
/// bound drops below ~1e-18 relative, clustered toward a.
double integrate_exp_tail(const std::function<double(double)>& f,
                          double a, double rate, int panels = 24, int n_per_panel = 12);

/// Golden-section maximization of f on [a,b]; returns argmax.
double golden_max(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

} // namespace coag::quad
