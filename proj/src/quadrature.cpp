#include "coag/quadrature.hpp"
#include "coag/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace coag::quad {

namespace {

GaussRule make_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    // Roots of P_n by Newton from the Chebyshev-like initial guess.
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[n - 1 - i] = r.weights[i];
    }
    return r;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussRule& r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += r.weights[i] * f(mid + half * r.nodes[i]);
    return sum * half;
}

double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& bp, int n_per_panel) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i)
        sum += gauss_panel(f, bp[i], bp[i + 1], n_per_panel);
    return sum;
}

std::vector<double> geometric_breakpoints(double a, double b, int m, double ratio) {
    std::vector<double> bp(m + 1);
    bp[0] = a;
    bp[m] = b;
    // widths w, w*ratio, ..., w*ratio^{m-1} from a
    double scale = (ratio == 1.0) ? m : (std::pow(ratio, m) - 1.0) / (ratio - 1.0);
    double w = (b - a) / scale;
    double x = a;
    for (int i = 1; i < m; ++i) {
        x += w;
        bp[i] = x;
        w *= ratio;
    }
    return bp;
}

std::vector<double> geometric_breakpoints_to_b(double a, double b, int m, double ratio) {
    auto bp = geometric_breakpoints(0.0, b - a, m, ratio);
    std::vector<double> out(bp.size());
    for (std::size_t i = 0; i < bp.size(); ++i) out[i] = b - bp[bp.size() - 1 - i];
    out.front() = a;
    out.back() = b;
    return out;
}

std::vector<double> log_breakpoints(double a, double b, int m) {
    if (a <= 0.0 || b <= a) throw DomainError("log_breakpoints requires 0 < a < b");
    std::vector<double> bp(m + 1);
    double la = std::log(a), lb = std::log(b);
    for (int i = 0; i <= m; ++i) bp[i] = std::exp(la + (lb - la) * i / m);
    bp.front() = a;
    bp.back() = b;
    return bp;
}

double integrate_exp_tail(const std::function<double(double)>& f,
                          double a, double rate, int panels, int n_per_panel) {
    if (rate <= 0.0) throw DomainError("integrate_exp_tail requires positive decay rate");
    double cutoff = a + 42.0 / rate; // e^{-42} ~ 5e-19
    auto bp = geometric_breakpoints(a, cutoff, panels, 1.6);
    return integrate_panels(f, bp, n_per_panel);
}

double golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol * (1.0 + std::fabs(a) + std::fabs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace coag::quad
