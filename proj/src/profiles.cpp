#include "coag/profiles.hpp"
#include "coag/errors.hpp"
#include "coag/quadrature.hpp"
#include "coag/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace coag::profiles {

Grid Grid::log_uniform(double x_min, double x_max, int n) {
    if (x_min <= 0.0 || x_max <= x_min) throw DomainError("grid requires 0 < x_min < x_max");
    if (!(x_min < 1.0 && 1.0 < x_max)) throw DomainError("grid requires x_min < 1 < x_max");
    if (n < 8) throw DomainError("grid requires n >= 8");
    Grid g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.n = n;
    g.nodes.resize(n);
    const double la = std::log(x_min), lb = std::log(x_max);
    for (int i = 0; i < n; ++i) g.nodes[i] = std::exp(la + (lb - la) * i / (n - 1));
    g.nodes.front() = x_min;
    g.nodes.back() = x_max;
    return g;
}

int Grid::cell_of(double x) const {
    const double la = std::log(x_min), lb = std::log(x_max);
    int i = static_cast<int>((std::log(x) - la) / (lb - la) * (n - 1));
    return std::clamp(i, 0, n - 2);
}

Profile::Profile(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.n)
        throw DomainError("profile values must match grid size");
    for (double v : values_)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DomainError("profile values must be finite and nonnegative");
    fit_edges();
    log_x_.resize(grid_.n);
    h_.resize(grid_.n);
    for (int i = 0; i < grid_.n; ++i) {
        log_x_[i] = std::log(grid_.nodes[i]);
        h_[i] = values_[i] > 0.0 ? std::log(values_[i]) + interp_trend_ * grid_.nodes[i]
                                 : -std::numeric_limits<double>::infinity();
    }
}

Profile Profile::from_values(const Grid& grid, std::vector<double> values) {
    return Profile(grid, std::move(values));
}

Profile Profile::from_function(const Grid& grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid.n);
    for (int i = 0; i < grid.n; ++i) v[i] = f(grid.nodes[i]);
    return Profile(grid, std::move(v));
}

Profile Profile::zero(const Grid& grid) {
    return Profile(grid, std::vector<double>(grid.n, 0.0));
}

void Profile::fit_edges() {
    const int n = grid_.n;
    // tail: rate from the last two positive nodes, amplitude from the last
    if (values_[n - 1] > 0.0 && values_[n - 2] > 0.0) {
        double r = std::log(values_[n - 2] / values_[n - 1]) /
                   (grid_.nodes[n - 1] - grid_.nodes[n - 2]);
        decay_rate_ = (r > 1e-6 && std::isfinite(r)) ? r : 1.0;
        double e = decay_rate_ * grid_.x_max;
        tail_amp_ = (e < 700.0) ? values_[n - 1] * std::exp(e) : 0.0;
    } else {
        decay_rate_ = 1.0;
        tail_amp_ = 0.0;
    }
    interp_trend_ = decay_rate_;
    // near zero: local exponential slope from the first two nodes
    near_ = NearZeroModel{};
    if (values_[0] > 0.0 && values_[1] > 0.0) {
        near_.slope = std::log(values_[0] / values_[1]) / (grid_.nodes[1] - grid_.nodes[0]);
    }
}

Profile Profile::with_layer_model(double beta, double lam, double alpha) const {
    if (!(alpha > 0.0) || lam < 0.0) throw DomainError("layer model requires alpha > 0, lam >= 0");
    Profile p = *this;
    p.near_.kind = NearZeroModel::Kind::layer;
    p.near_.beta = beta;
    p.near_.lam = lam;
    p.near_.alpha = alpha;
    return p;
}

Profile Profile::with_tail(double amp, double rate) const {
    if (amp < 0.0 || rate <= 0.0) throw DomainError("tail requires amp >= 0, rate > 0");
    Profile p = *this;
    p.tail_amp_ = amp;
    p.decay_rate_ = rate;
    return p;
}

double Profile::near_zero_eval(double x) const {
    const double x0 = grid_.x_min, f0 = values_[0];
    if (f0 == 0.0) return 0.0;
    if (near_.kind == NearZeroModel::Kind::exp_slope) {
        return f0 * std::exp(-near_.slope * (x - x0));
    }
    double expo = (near_.beta - 2.0) * std::log(x / x0);
    if (near_.alpha > 0.0)
        expo -= near_.lam * (std::pow(x, -near_.alpha) - std::pow(x0, -near_.alpha));
    if (expo < -740.0) return 0.0;
    return f0 * std::exp(expo);
}

double Profile::eval(double x) const {
    if (!(x > 0.0)) throw DomainError("profile evaluation requires x > 0");
    if (x < grid_.x_min) return near_zero_eval(x);
    if (x > grid_.x_max) {
        double e = -decay_rate_ * x;
        return (e < -740.0) ? 0.0 : tail_amp_ * std::exp(e);
    }
    const int n = grid_.n;
    int i = grid_.cell_of(x);
    // 4-point stencil around cell i, one-sided at the edges
    int j0 = std::clamp(i - 1, 0, n - 4);
    bool positive = true;
    for (int j = j0; j < j0 + 4; ++j)
        if (values_[j] <= 0.0) { positive = false; break; }
    if (positive) {
        const double t = std::log(x);
        double acc = 0.0;
        for (int j = j0; j < j0 + 4; ++j) {
            double lj = 1.0;
            for (int k = j0; k < j0 + 4; ++k) {
                if (k == j) continue;
                lj *= (t - log_x_[k]) / (log_x_[j] - log_x_[k]);
            }
            acc += lj * h_[j];
        }
        return std::exp(acc - interp_trend_ * x);
    }
    // linear in f where values vanish
    double x0 = grid_.nodes[i], x1 = grid_.nodes[i + 1];
    double w = (x - x0) / (x1 - x0);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
}

double Profile::mu(double x) const { return eval(x) * std::exp(x); }

std::function<double(double)> Profile::mu_fn() const {
    Profile copy = *this;
    return [copy](double x) { return copy.mu(x); };
}

double Profile::integrate_weighted(double sigma, double p) const {
    if (sigma <= -1.0) throw DomainError("integrate_weighted requires sigma > -1");
    if (p <= -decay_rate_)
        throw DomainError("integrate_weighted requires p > -decay_rate");

    double total = 0.0;

    // below x_min: quadrature of the extension model on log panels
    {
        const double x0 = grid_.x_min;
        if (values_[0] > 0.0) {
            auto f = [&](double x) {
                return std::pow(x, sigma) * near_zero_eval(x) * std::exp(-p * x);
            };
            auto bp = quad::log_breakpoints(x0 * 1e-12, x0, 30);
            total += quad::integrate_panels(f, bp, 8);
        }
    }

    // grid cells
    {
        const auto& xs = grid_.nodes;
        auto f = [&](double x) { return std::pow(x, sigma) * eval(x) * std::exp(-p * x); };
        const double full_rate = decay_rate_ + p;
        for (int i = 0; i + 1 < grid_.n; ++i) {
            if (full_rate * xs[i] > 760.0) break; // everything beyond underflows
            total += quad::gauss_panel(f, xs[i], xs[i + 1], 10);
        }
    }

    // tail: tail_amp * int_{x_max}^inf x^sigma e^{-(r+p)x} dx
    if (tail_amp_ > 0.0) {
        const double r = decay_rate_ + p;
        const double u = r * grid_.x_max;
        if (u < 700.0) {
            total += tail_amp_ * std::pow(r, -sigma - 1.0) * specfun::gamma_upper(sigma + 1.0, u);
        }
    }
    return total;
}

double Profile::mass() const { return integrate_weighted(1.0, 0.0); }

double Profile::moment(double sigma) const {
    if (!(sigma > -1.0 && sigma <= 2.0)) throw DomainError("moment requires sigma in (-1, 2]");
    return integrate_weighted(sigma, 0.0);
}

Profile Profile::rescale(double a) const {
    if (!(a > 0.0)) throw DomainError("rescale requires a > 0");
    if (a == 1.0) return *this;
    std::vector<double> v(grid_.n);
    for (int i = 0; i < grid_.n; ++i) v[i] = a * eval(a * grid_.nodes[i]);
    Profile out(grid_, std::move(v));
    out.tail_amp_ = a * tail_amp_;
    out.decay_rate_ = a * decay_rate_;
    if (near_.kind == NearZeroModel::Kind::layer) {
        out.near_ = near_;
        out.near_.lam = near_.lam * std::pow(a, -near_.alpha);
    }
    return out;
}

double Profile::fit_decay_rate() const {
    const double lo = kTailFitWindowFraction * grid_.x_max;
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < grid_.n; ++i) {
        double x = grid_.nodes[i];
        if (x < lo) continue;
        if (!(values_[i] > 0.0)) throw FitFailure("tail window contains non-positive values");
        if (i > 0 && grid_.nodes[i - 1] >= lo && values_[i] >= values_[i - 1])
            throw FitFailure("tail window is not monotone decreasing");
        sum += -std::log(values_[i]) / x;
        ++count;
    }
    if (count < 4) throw FitFailure("tail window has too few nodes");
    return sum / count;
}

std::pair<Profile, double> Profile::normalize_decay() const {
    Profile cur = *this;
    double a_used = 1.0;
    for (int round = 0; round < 40; ++round) {
        double b = cur.fit_decay_rate();
        if (!(b > 0.0) || !std::isfinite(b)) throw FitFailure("decay fit failed");
        if (std::fabs(b - 1.0) <= 1e-10) return {cur, a_used};
        a_used /= b;
        cur = rescale(a_used);
    }
    double b = cur.fit_decay_rate();
    if (std::fabs(b - 1.0) <= 1e-3) return {cur, a_used};
    throw FitFailure("decay normalization did not settle");
}

void Profile::to_csv(const std::string& path) const {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        out << "x,f,mu\n";
        char buf[128];
        for (int i = 0; i < grid_.n; ++i) {
            double x = grid_.nodes[i], f = values_[i];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, f, f * std::exp(x));
            out << buf;
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

Profile Profile::from_csv(const std::string& path, const Grid* expected) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv " + path);
    std::vector<double> xs, fs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw std::runtime_error("bad csv row: " + line);
        xs.push_back(std::stod(a));
        fs.push_back(std::stod(b));
    }
    if (xs.size() < 8) throw std::runtime_error("csv has too few rows");
    Grid g = expected ? *expected
                      : Grid::log_uniform(xs.front(), xs.back(), static_cast<int>(xs.size()));
    if (static_cast<int>(xs.size()) != g.n) throw std::runtime_error("csv row count mismatch");
    return Profile(g, std::move(fs));
}

} // namespace coag::profiles
