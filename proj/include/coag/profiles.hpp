#pragma once

#include <functional>
#include <string>
#include <vector>

namespace coag::profiles {

/// Log-uniform grid on [x_min, x_max] with x_min < 1 < x_max.
struct Grid {
    double x_min = 1e-4;
    double x_max = 40.0;
    int n = 600;
    std::vector<double> nodes;

    static Grid log_uniform(double x_min, double x_max, int n);

    /// Index i with nodes[i] <= x < nodes[i+1] (clamped to [0, n-2]).
    int cell_of(double x) const;

    bool operator==(const Grid& other) const {
        return x_min == other.x_min && x_max == other.x_max && n == other.n;
    }
};

/// Extension of a profile below x_min.
///
/// For smooth profiles the local exponential slope of the first two nodes
/// is continued (exact for pure exponentials, which is what the 1e-8
/// transform accuracy at large p requires).  Converged profiles of singular
/// kernels instead carry the measured near-origin layer
///   f(x) ~ f(x_min) (x/x_min)^{beta-2} exp(-lam (x^{-alpha} - x_min^{-alpha})),
/// which vanishes faster than any power at the origin.
struct NearZeroModel {
    enum class Kind { exp_slope, layer };
    Kind kind = Kind::exp_slope;
    double slope = 0.0;           // exp_slope: f = f0 exp(-slope (x - x_min))
    double beta = 2.0;            // layer parameters
    double lam = 0.0;
    double alpha = 0.0;
};

/// Nonnegative gridded profile f on (0,inf) with a parametric exponential
/// tail f ~ tail_amp * e^{-decay_rate x} beyond x_max and a near-origin
/// extension model below x_min.  Values are immutable after construction;
/// all operations return new profiles.
class Profile {
public:
    static Profile from_values(const Grid& grid, std::vector<double> values);
    static Profile from_function(const Grid& grid, const std::function<double(double)>& f);
    static Profile zero(const Grid& grid);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double tail_amp() const { return tail_amp_; }
    double decay_rate() const { return decay_rate_; }
    const NearZeroModel& near_zero() const { return near_; }

    Profile with_layer_model(double beta, double lam, double alpha) const;
    Profile with_tail(double amp, double rate) const;

    /// f(x) anywhere on (0, inf): cubic interpolation of log f against
    /// log x inside the grid (linear in f where values vanish), the tail
    /// model above x_max and the near-zero model below x_min.
    double eval(double x) const;

    /// mu(x) = f(x) e^x; tail value tends to tail_amp when decay_rate = 1.
    double mu(double x) const;
    std::function<double(double)> mu_fn() const;

    /// int_0^inf x^sigma f(x) e^{-p x} dx for sigma > -1 and p > -decay_rate.
    double integrate_weighted(double sigma, double p) const;

    /// int_0^inf x f dx (grid quadrature + closed-form tail + near-zero model).
    double mass() const;

    /// int_0^inf x^sigma f dx, sigma in (-1, 2].
    double moment(double sigma) const;

    /// g(x) = a f(a x); mass(g) = mass(f)/a, decay rate multiplies by a.
    Profile rescale(double a) const;

    /// Rescales along the family a f(a x) until the decay rate fitted on
    /// the tail window [0.6 x_max, x_max] equals 1 to 1e-3 (usually much
    /// better).  Returns the rescaled profile and the accumulated factor.
    std::pair<Profile, double> normalize_decay() const;

    /// Decay rate fitted on the tail window (mean of -log f / x there).
    double fit_decay_rate() const;

    void to_csv(const std::string& path) const;
    static Profile from_csv(const std::string& path, const Grid* expected = nullptr);

private:
    Profile(Grid grid, std::vector<double> values);
    void fit_edges();
    double near_zero_eval(double x) const;

    Grid grid_;
    std::vector<double> values_;
    std::vector<double> log_x_;
    // Interpolation works on the detrended log profile
    //   h(x) = log f(x) + trend * x
    // with the trend fitted from the tail nodes; pure exponentials then
    // interpolate exactly and smooth profiles lose the steep linear part
    // that dominates interpolation error at large x.
    std::vector<double> h_; // -inf where f == 0
    double interp_trend_ = 1.0;
    double tail_amp_ = 0.0;
    double decay_rate_ = 1.0;
    NearZeroModel near_;
};

/// Tail-fit window used by fit_decay_rate / normalize_decay, as a fraction
/// of x_max.  Reported in solver output since the window choice moves
/// normalized profiles at the 1e-3 level.
constexpr double kTailFitWindowFraction = 0.6;

} // namespace coag::profiles
