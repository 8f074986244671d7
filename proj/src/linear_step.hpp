// Internal to the solver: the Jacobian of the fixed-point residual
//   F(mu)(x) = mu(x) - B_K(mu, mu)(x)
// at the current iterate, assembled as a dense matrix on hat functions
// (constant extension below the first node, constant tail above the last):
//   J m = m - B_K(m, mu) - B_K(mu, m).
//
// With T^w_s(X) = e^X int_X^inf z^s w(z) e^{-z} dz the two parts of a row
// at x are
//   B_K(m, mu)(x)  = (1/x^2) int_0^x y m(y) [2 T^mu_0 + eps(y^a T^mu_{-a}
//                     + y^{-a} T^mu_{+a})](x-y) dy            (outer slot)
//   B_K(mu, m)(x)  = (1/x^2) int_0^x y mu(y) [2 T^m_0 + eps(y^a T^m_{-a}
//                     + y^{-a} T^m_{+a})](x-y) dy             (inner slot)
// and per hat column the inner-slot kernel splits into the support window
// of the hat plus the closed region X < lo_j where T^(j)_s(X) = e^X I^s_j;
// the latter is accumulated through per-row prefix integrals
//   Theta_{i,s'}(t) = int_0^t (x_i - u)^{1+s'} mu(x_i - u) e^u du,
// which keeps every intermediate positive (no cancellation under the e^X
// weight).
//
// Rows near the origin are regularized by a diagonal shift: there the
// equation rows lose their diagonal (the local terms cancel at x -> 0)
// while the eps-singular coupling grows like x^{-alpha}, and the shift
// turns the solve into a benignly damped local update without moving the
// Newton fixed point F = 0.
//
// Used inside a damped Newton iteration; accuracy of the matrix only
// affects the convergence rate, never the converged profile.

#pragma once

#include "coag/bilinear.hpp"
#include "coag/kernels.hpp"
#include "coag/profiles.hpp"
#include "coag/quadrature.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace coag::solver::detail {

class DenseLU {
public:
    void factor(std::vector<double> a, int n) {
        a_ = std::move(a);
        n_ = n;
        piv_.resize(n);
        for (int k = 0; k < n; ++k) {
            int p = k;
            double best = std::fabs(at(k, k));
            for (int i = k + 1; i < n; ++i) {
                double v = std::fabs(at(i, k));
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
            if (best == 0.0) throw std::runtime_error("singular Jacobian matrix");
            piv_[k] = p;
            if (p != k)
                for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
            double d = at(k, k);
            for (int i = k + 1; i < n; ++i) {
                double f = at(i, k) / d;
                at(i, k) = f;
                if (f != 0.0)
                    for (int j = k + 1; j < n; ++j) at(i, j) -= f * at(k, j);
            }
        }
    }

    std::vector<double> solve(std::vector<double> b) const {
        // all interchanges first (PA = LU), then the triangular solves
        for (int k = 0; k < n_; ++k)
            if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
        for (int k = 0, n = n_; k < n; ++k)
            for (int i = k + 1; i < n; ++i) b[i] -= cat(i, k) * b[k];
        for (int i = n_ - 1; i >= 0; --i) {
            for (int j = i + 1; j < n_; ++j) b[i] -= cat(i, j) * b[j];
            b[i] /= cat(i, i);
        }
        return b;
    }

private:
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double cat(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    std::vector<double> a_;
    std::vector<int> piv_;
    int n_ = 0;
};

class JacobianStep {
public:
    JacobianStep(const kernels::KernelSpec& spec, const profiles::Grid& grid)
        : spec_(spec), grid_(grid), n_(grid.n) {
        const auto& xs = grid_.nodes;
        lo_.resize(n_);
        hi_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            lo_[j] = (j == 0) ? 0.0 : xs[j - 1];
            hi_[j] = (j == n_ - 1) ? xs[n_ - 1] : xs[j + 1];
        }
        sigmas_ = {0.0};
        if (spec_.epsilon > 0.0 && spec_.alpha > 0.0) {
            sigmas_.push_back(spec_.alpha);
            sigmas_.push_back(-spec_.alpha);
        }
    }

    // rank-one family-phase shift is always applied; the optional rank-two
    // term models the dependence of F on the near-origin extension
    // parameters (columns dF/dbeta, dF/dlambda against the measurement
    // weights dbeta/dmu, dlambda/dmu)
    void refresh(const bilinear::BilinearEvaluator& ev_mu,
                 const std::function<double(double)>& mu_fn,
                 const std::vector<double>& mu_values,
                 const std::vector<double>* dF_dbeta = nullptr,
                 const std::vector<double>* w_beta = nullptr,
                 const std::vector<double>* dF_dlam = nullptr,
                 const std::vector<double>* w_lam = nullptr);

    // Gauss-Newton normal matrix with a Levenberg-Marquardt shift:
    //   (J^T J + tau I) u = J^T F.
    // Descends ||F||_2 for any tau large enough, handles the near-singular
    // scaling-family direction gracefully, and recovers the Newton step as
    // tau -> 0 near the solution.
    std::vector<double> lm_solve(const std::vector<double>& F, double tau) const {
        const int n = n_;
        if (jtj_.empty())
            throw std::runtime_error("lm_solve before refresh");
        std::vector<double> A = jtj_;
        double scale = 0.0;
        for (int i = 0; i < n; ++i) scale = std::max(scale, A[static_cast<std::size_t>(i) * n + i]);
        for (int i = 0; i < n; ++i) A[static_cast<std::size_t>(i) * n + i] += tau * std::max(scale, 1e-12);
        std::vector<double> rhs(n, 0.0);
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += rows_[static_cast<std::size_t>(i) * n + j] * F[i];
            rhs[j] = acc;
        }
        DenseLU lu;
        lu.factor(std::move(A), n);
        return lu.solve(rhs);
    }

    void prepare_normal_matrix() {
        const int n = n_;
        jtj_.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int k = 0; k < n; ++k) {
            const double* rk = &rows_[static_cast<std::size_t>(k) * n];
            for (int i = 0; i < n; ++i) {
                double rki = rk[i];
                if (rki == 0.0) continue;
                double* out = &jtj_[static_cast<std::size_t>(i) * n];
                for (int j = i; j < n; ++j) out[j] += rki * rk[j];
            }
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j)
                jtj_[static_cast<std::size_t>(i) * n + j] = jtj_[static_cast<std::size_t>(j) * n + i];
    }

    // forward action of the raw (unregularized) Jacobian rows; diagnostics
    std::vector<double> apply_forward(const std::vector<double>& m) const {
        std::vector<double> out(n_, 0.0);
        for (int i = 0; i < n_; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n_; ++j)
                acc += rows_[static_cast<std::size_t>(i) * n_ + j] * m[j];
            out[i] = acc;
        }
        return out;
    }

private:
    double hat(int j, double z) const {
        const auto& xs = grid_.nodes;
        if (j == 0 && z <= xs[0]) return 1.0;
        if (j == n_ - 1 && z >= xs[n_ - 1]) return 1.0;
        if (j > 0 && z >= xs[j - 1] && z <= xs[j])
            return (z - xs[j - 1]) / (xs[j] - xs[j - 1]);
        if (j < n_ - 1 && z >= xs[j] && z <= xs[j + 1])
            return (xs[j + 1] - z) / (xs[j + 1] - xs[j]);
        return 0.0;
    }

    kernels::KernelSpec spec_;
    profiles::Grid grid_;
    int n_;
    std::vector<double> lo_, hi_;
    std::vector<double> sigmas_; // {0 [, +alpha, -alpha]}
    std::vector<double> rows_;
    std::vector<double> jtj_;
};

inline void JacobianStep::refresh(const bilinear::BilinearEvaluator& ev_mu,
                                  const std::function<double(double)>& mu_fn,
                                  const std::vector<double>& mu_values,
                                  const std::vector<double>* dF_dbeta,
                                  const std::vector<double>* w_beta,
                                  const std::vector<double>* dF_dlam,
                                  const std::vector<double>* w_lam) {
    const auto& xs = grid_.nodes;
    const int n = n_;
    const int ns = static_cast<int>(sigmas_.size());
    const double eps = spec_.epsilon;
    const double alpha = spec_.alpha;
    const bool with_w = ns == 3;
    const auto& g8 = quad::gauss_legendre(8);
    const auto& g4 = quad::gauss_legendre(4);

    // ---- per-column exponential moments I^s_j and support tables of
    //      G^s_j(X) = int_X^{hi_j} z^s hat_j e^{-z} dz
    std::vector<double> Isig(static_cast<std::size_t>(n) * ns, 0.0);
    const int gpts = 14; // G-table resolution per column
    std::vector<double> Gtab(static_cast<std::size_t>(n) * ns * gpts, 0.0);
    std::vector<double> Gx0(n), Gdx(n);
    for (int j = 0; j < n; ++j) {
        double s0 = lo_[j], s1 = hi_[j];
        Gx0[j] = s0;
        Gdx[j] = (s1 - s0) / (gpts - 1);
        for (int is = 0; is < ns; ++is) {
            double s = sigmas_[is];
            auto f = [&](double z) { return std::pow(z, s) * hat(j, z) * std::exp(-z); };
            // backward cumulative over the gpts-1 panels
            double acc = 0.0;
            if (j == n - 1) acc += quad::gauss_panel([&](double z) {
                                       return std::pow(z, s) * std::exp(-z);
                                   }, xs[n - 1], xs[n - 1] + 40.0, 12);
            Gtab[(static_cast<std::size_t>(j) * ns + is) * gpts + gpts - 1] = acc;
            for (int k = gpts - 2; k >= 0; --k) {
                double a = s0 + Gdx[j] * k, b = a + Gdx[j];
                double cell;
                if (j == 0 && a < xs[0] * 0.999999 && a <= 0.0) {
                    // z^s with s possibly negative: graded panels at 0
                    auto bp = quad::log_breakpoints(std::max(b * 1e-10, 1e-300), b, 12);
                    cell = quad::integrate_panels(f, bp, 6);
                } else {
                    double lo_cell = std::max(a, 1e-300);
                    double mid = 0.5 * (lo_cell + b), half = 0.5 * (b - lo_cell);
                    cell = 0.0;
                    for (std::size_t q = 0; q < g4.nodes.size(); ++q)
                        cell += g4.weights[q] * f(mid + half * g4.nodes[q]);
                    cell *= half;
                }
                acc += cell;
                Gtab[(static_cast<std::size_t>(j) * ns + is) * gpts + k] = acc;
            }
            Isig[static_cast<std::size_t>(j) * ns + is] = acc;
        }
    }
    auto G_interp = [&](int j, int is, double X) {
        // linear interpolation is enough: the table only steers the
        // preconditioner
        double t = (X - Gx0[j]) / Gdx[j];
        int k = std::clamp(static_cast<int>(t), 0, gpts - 2);
        double w = t - k;
        const double* base = &Gtab[(static_cast<std::size_t>(j) * ns + is) * gpts];
        return (1.0 - w) * base[k] + w * base[k + 1];
    };

    // ---- per-row prefix integrals Theta_{i,s'}(t) at t = grid nodes up
    // to and including t = x_i, the full range (positive integrands, no
    // cancellation).  Layout: theta[s'][i*n + k] = Theta at t = x_k for
    // k < i; theta[s'][i*n + i] = full value at t = x_i.
    std::vector<std::vector<double>> theta(ns);
    for (auto& t : theta) t.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double x = xs[i];
        double acc[3] = {0.0, 0.0, 0.0};
        double prev_t = 0.0;
        for (int k = 0; k <= i; ++k) {
            double a = prev_t, b = (k < i) ? xs[k] : x;
            if (b <= a) {
                for (int is = 0; is < ns; ++is)
                    theta[is][static_cast<std::size_t>(i) * n + k] = acc[is];
                continue;
            }
            double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            double cell[3] = {0.0, 0.0, 0.0};
            for (std::size_t q = 0; q < g4.nodes.size(); ++q) {
                double u = mid + half * g4.nodes[q];
                double y = x - u;
                double base = y * mu_fn(y) * std::exp(u) * g4.weights[q];
                cell[0] += base;
                if (with_w) {
                    double ya = std::pow(y, alpha);
                    cell[1] += base * ya;       // s' = +alpha
                    cell[2] += base / ya;       // s' = -alpha
                }
            }
            for (int is = 0; is < ns; ++is) {
                acc[is] += cell[is] * half;
                theta[is][static_cast<std::size_t>(i) * n + k] = acc[is];
            }
            prev_t = b;
        }
    }

    // ---- assembly
    std::vector<double> M(static_cast<std::size_t>(n) * n, 0.0);
    auto at = [&](int i, int j) -> double& { return M[static_cast<std::size_t>(i) * n + j]; };

    for (int i = 0; i < n; ++i) {
        const double x = xs[i];
        const double inv_x2 = 1.0 / (x * x);

        for (int j = 0; j < n; ++j) {
            double total = 0.0;

            // outer slot: y inside the hat support, bracket from mu tables
            {
                double a = std::max(lo_[j], x * 1e-12);
                double b = std::min(hi_[j], x);
                if (j == 0) a = std::min(x, xs[0]) * 1e-12;
                if (b > a) {
                    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
                    double acc = 0.0;
                    for (std::size_t q = 0; q < g8.nodes.size(); ++q) {
                        double y = mid + half * g8.nodes[q];
                        double X = x - y;
                        double br = 2.0 * ev_mu.inner_T(0, X);
                        if (with_w) {
                            double ya = std::pow(y, alpha);
                            br += eps * (ya * ev_mu.inner_T(2, X) + ev_mu.inner_T(1, X) / ya);
                        }
                        acc += g8.weights[q] * y * hat(j, y) * br;
                    }
                    total += acc * half;
                }
            }

            // inner slot, support window: X = x - y inside the hat support
            {
                double ya_lo = x - hi_[j], ya_hi = x - lo_[j];
                double a = std::max(ya_lo, x * 1e-12);
                double b = std::min(ya_hi, x * (1.0 - 1e-14));
                if (b > a) {
                    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
                    double acc = 0.0;
                    for (std::size_t q = 0; q < g8.nodes.size(); ++q) {
                        double y = mid + half * g8.nodes[q];
                        double X = x - y;
                        double eX = std::exp(X);
                        double br = 2.0 * G_interp(j, 0, X) * eX;
                        if (with_w) {
                            double ya = std::pow(y, alpha);
                            br += eps * (ya * G_interp(j, 2, X) + G_interp(j, 1, X) / ya) * eX;
                        }
                        acc += g8.weights[q] * y * mu_fn(y) * br;
                    }
                    total += acc * half;
                }
            }

            // inner slot, closed region X < lo_j: T^(j)_s = e^X I^s_j and
            // the y-integral folds into the Theta prefix integrals.  For
            // lo_j >= x the whole range [0, x] lies below the support and
            // the full prefix applies.
            if (j > 0) {
                int k = (lo_[j] < x) ? j - 1 : i;
                double i0 = Isig[static_cast<std::size_t>(j) * ns + 0];
                double contrib = 2.0 * i0 * theta[0][static_cast<std::size_t>(i) * n + k];
                if (with_w) {
                    double ip = Isig[static_cast<std::size_t>(j) * ns + 1];
                    double im = Isig[static_cast<std::size_t>(j) * ns + 2];
                    contrib += eps * (im * theta[1][static_cast<std::size_t>(i) * n + k] +
                                      ip * theta[2][static_cast<std::size_t>(i) * n + k]);
                }
                total += contrib;
            }

            at(i, j) = (i == j ? 1.0 : 0.0) - inv_x2 * total;
        }

    }
    }
    (void)mu_values;
    (void)dF_dbeta;
    (void)w_beta;
    (void)dF_dlam;
    (void)w_lam;
    rows_ = std::move(M);
}

} // namespace coag::solver::detail
