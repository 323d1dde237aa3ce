#pragma once

// 1-D adaptive quadrature on Gauss-Kronrod 7/15 pairs, plus fixed composite
// rules used as independent cross-checks in the verifier reports.

#include <cmath>
#include <stdexcept>
#include <string>

namespace shelab {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

struct QuadratureError : std::runtime_error {
    double achieved;
    explicit QuadratureError(double err)
        : std::runtime_error("adaptive quadrature failed to reach tolerance, achieved " +
                             std::to_string(err)),
          achieved(err) {}
};

namespace detail {

// Kronrod-15 abscissae (nonnegative half) and weights; odd entries are the
// embedded Gauss-7 nodes.
constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kGK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kG7Weights[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                  0.417959183673469};

template <typename F>
inline void gk15(const F& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = h * kGK15Nodes[i];
        double v;
        if (i == 7) {
            v = f(c);
            resk += kGK15Weights[i] * v;
            resg += kG7Weights[3] * v;
        } else {
            v = f(c - x) + f(c + x);
            resk += kGK15Weights[i] * v;
            if (i % 2 == 1) resg += kG7Weights[i / 2] * v;
        }
    }
    kronrod = resk * h;
    err = std::abs((resk - resg) * h);
}

template <typename F>
inline void adapt(const F& f, double a, double b, double tol_abs, int depth, double& sum,
                  double& err_sum) {
    double v, e;
    gk15(f, a, b, v, e);
    if (e <= tol_abs || depth >= 48) {
        sum += v;
        err_sum += e;
        return;
    }
    const double c = 0.5 * (a + b);
    adapt(f, a, c, tol_abs * 0.5, depth + 1, sum, err_sum);
    adapt(f, c, b, tol_abs * 0.5, depth + 1, sum, err_sum);
}

}  // namespace detail

/// Adaptive integral of f over [a,b] to relative tolerance rel_tol (with an
/// absolute floor for integrals near zero).
template <typename F>
QuadratureResult integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                           double abs_floor = 1e-300) {
    double v0, e0;
    detail::gk15(f, a, b, v0, e0);
    const double tol_abs = std::max(rel_tol * std::abs(v0), abs_floor);
    double sum = 0.0, err = 0.0;
    detail::adapt(f, a, b, tol_abs, 0, sum, err);
    QuadratureResult r;
    r.value = sum;
    r.error = err;
    r.converged = err <= std::max(rel_tol * std::abs(sum) * 8.0, abs_floor * 8.0) + 1e-300;
    return r;
}

/// Like integrate() but throws QuadratureError when the estimate did not
/// converge.
template <typename F>
double integrate_or_throw(const F& f, double a, double b, double rel_tol = 1e-10) {
    const auto r = integrate(f, a, b, rel_tol);
    if (!r.converged) throw QuadratureError(r.error);
    return r.value;
}

/// Composite Simpson rule with n (even) panels; the verifier runs it at n and
/// 2n as an independent half-step cross-check of every adaptive result.
template <typename F>
double composite_simpson(const F& f, double a, double b, int n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace shelab
