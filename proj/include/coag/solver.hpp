#pragma once

#include "coag/kernels.hpp"
#include "coag/profiles.hpp"

#include <memory>
#include <string>
#include <vector>

namespace coag::solver {

enum class Normalization { decay_rate, mass };

struct SolverOptions {
    int max_iter = 400;
    double tol = 1e-8;       // weighted sup-residual threshold
    double damping = 0.5;    // under-relaxation factor in (0, 1]
    Normalization normalization = Normalization::decay_rate;
    double theta = 0.0;      // 0: use (alpha + 1/2)/2

    void validate() const;
    double resolved_theta(double alpha) const;
};

struct SolverReport {
    int iterations = 0;
    std::vector<double> residual_history;
    std::vector<double> contraction_history; // ratios of successive update norms
    double final_norm_m = 0.0;               // |mu - 1|_0 seminorm
    double kappa = 0.0;                      // 2 (int f - 1)
    bool converged = false;
    double wall_time_s = 0.0;
    long clip_count = 0;                     // negative values clipped to 0
    double amp_factor_final = 1.0;           // last amplitude-projection factor
    double tail_fit_window = 0.0;            // lower edge of the decay-fit window
};

/// One self-similar-profile solve as a steppable object (the uniqueness
/// probe advances two of these in lockstep).
///
/// The iteration runs on mu = f e^x, where the flat state is the constant-
/// kernel solution.  A bare damped update mu <- (1-d) mu + d B_K(mu,mu) is
/// unstable: the linearization of the quadratic map at the flat state has
/// a continuum of modes with multipliers at or above 1 + d (a constant c
/// maps to 2c, and tail-plateau perturbations behave the same way), so no
/// damping converges.  Each step instead inverts the constant-kernel
/// linearization L = id - B2(1,.) - B2(.,1) exactly (assembled once per
/// grid as a dense matrix, bordered with the scaling direction 1 - x that
/// spans its kernel) and applies the damped quasi-Newton update
///   mu <- mu - damping * L^{-1} (mu - B_K(mu, mu)),
/// followed by the configured scale-family renormalization.  The residual
/// mu - B_K(mu,mu) is always evaluated through the full quadrature path,
/// so the converged state solves the discrete equation itself; the matrix
/// only sets the convergence rate.
class SelfSimIterator {
public:
    SelfSimIterator(const kernels::KernelSpec& spec, const profiles::Profile& init,
                    const SolverOptions& opts);

    /// One damped, renormalized fixed-point step; returns weighted residual.
    double step();

    double residual() const { return residual_; }
    const std::vector<double>& mu_values() const { return mu_; }
    int iterations() const { return iter_; }
    const SolverReport& report() const { return report_; }

    /// Profile f = mu e^{-x} with tail and near-origin layer metadata.
    profiles::Profile profile() const;

    /// Solution estimate: the amplitude correction mu / s makes the iterate
    /// solve the unnormalized equation (the projected map converges to
    /// B(mu,mu) = s mu), then the configured scale normalization is applied
    /// and the tail rate is pinned to exactly 1 after decay normalization
    /// (the residual fit noise would otherwise leave transforms of mu - 1
    /// divergent at small p).
    profiles::Profile solution_profile() const;

    /// Finishes bookkeeping (final norms, kappa) on the solution profile.
    SolverReport finalize();

private:
    std::function<double(double)> mu_eval() const;
    std::function<double(double)> mu_eval_params(double beta, double lam) const;
    void renormalize_scale();
    void refresh_layer();

    kernels::KernelSpec spec_;
    SolverOptions opts_;
    profiles::Grid grid_;
    std::shared_ptr<void> linear_step_; // detail::LinearStep, shared per grid
    std::vector<double> mu_;
    double tail_value_ = 1.0;
    double layer_beta_ = 2.0, layer_lam_ = 0.0;
    double residual_ = 1e300;
    double prev_update_norm_ = 0.0;
    int iter_ = 0;
    bool layer_reanchored_ = false;
    long clip_count_ = 0;
    SolverReport report_;
};

std::pair<profiles::Profile, SolverReport> solve_selfsim(const kernels::KernelSpec& spec,
                                                         const profiles::Profile& init,
                                                         const SolverOptions& opts);

/// Prefactor equation x mu = 1/2 int_0^x K(y, x-y) mu(y) mu(x-y) dy.
/// Same damped iteration with amplitude projection; the final amplitude
/// correction makes the limit solve the unnormalized equation, whose
/// constant solution is 1/(1 + eps/2 int_0^1 W(s,1-s) ds).
struct PrefactorResult {
    std::vector<double> mu;
    SolverReport report;
    double d_star = 0.0; // bracket constants of int_0^x mu ~ x
    double D_star = 0.0;
};

PrefactorResult solve_prefactor(const kernels::KernelSpec& spec,
                                const std::vector<double>& init_mu,
                                const profiles::Grid& grid, const SolverOptions& opts);

struct ProbeReport {
    double distance_norm0 = 0.0;  // |f1 - f2|_0 after decay normalization
    double distance_supnode = 0.0;
    std::vector<double> distance_ratios; // per-iteration contraction of |mu1-mu2|
    bool inconclusive = false;
    SolverReport report1, report2;
};

/// Runs two solves from distinct data with identical options and compares.
ProbeReport contraction_probe(const kernels::KernelSpec& spec,
                              const profiles::Profile& init1,
                              const profiles::Profile& init2, const SolverOptions& opts);

struct SmallnessRow {
    double eps = 0.0;
    double norm_m0 = 0.0; // |mu_eps - 1|_0
    double kappa = 0.0;
    bool converged = false;
};

/// Smallness table over a list of eps values (alpha, family fixed).
/// The eps = 0 row is the constant-kernel solution itself, reported with
/// exact zeros.
std::vector<SmallnessRow> smallness_curve(const kernels::KernelSpec& spec_template,
                                          const std::vector<double>& eps_list,
                                          const SolverOptions& opts);

/// Default initial profile 2 e^{-2x} on the given grid.
profiles::Profile default_init(const profiles::Grid& grid);

} // namespace coag::solver
