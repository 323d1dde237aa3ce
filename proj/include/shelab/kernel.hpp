#pragma once

// Heat-kernel analytics: the Gaussian kernel p_t(x), its factorization and
// semigroup identities, box-averaged weights, the second-derivative majorant
// and its kernel integral, and the Fejer spectral weight.  Everything here is
// a pure function of its arguments.

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace shelab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kE = 2.71828182845904523536028747135266250;

/// p_t(x) = (2*pi*t)^{-1/2} exp(-x^2/(2t)); the density of N(0,t).
template <typename Scalar>
Scalar heat_kernel(Scalar t, Scalar x) {
    if (!(t > Scalar(0))) throw std::domain_error("heat_kernel: t must be positive");
    return std::exp(-x * x / (2 * t)) / std::sqrt(Scalar(kTwoPi) * t);
}

struct KernelPoint {
    double t;  // > 0
    double x;
};

inline double heat_kernel(const KernelPoint& q) { return heat_kernel(q.t, q.x); }

/// CDF of N(0,1), evaluated through erfc (cheap enough for hot loops).
template <typename Scalar>
Scalar normal_cdf(Scalar x) {
    return Scalar(0.5) * std::erfc(-x / std::sqrt(Scalar(2)));
}

/// p_{t-s}(a) p_s(b) - p_t(a+b) p_{s(t-s)/t}(b - (s/t)(a+b)), which vanishes
/// identically for 0 < s < t.
template <typename Scalar>
Scalar factorization_residual(Scalar t, Scalar s, Scalar a, Scalar b) {
    if (!(Scalar(0) < s && s < t))
        throw std::domain_error("factorization_residual: need 0 < s < t");
    const Scalar lhs = heat_kernel(t - s, a) * heat_kernel(s, b);
    const Scalar rhs =
        heat_kernel(t, a + b) * heat_kernel(s * (t - s) / t, b - (s / t) * (a + b));
    return lhs - rhs;
}

/// int_{-a}^{a} p_v(x - y) dx for a box half-width a > 0 and variance v > 0.
inline double kernel_box_integral(double a, double v, double y) {
    if (v <= 0.0) return std::abs(y) < a ? 1.0 : (std::abs(y) == a ? 0.5 : 0.0);
    const double inv = 1.0 / std::sqrt(2.0 * v);
    return 0.5 * (std::erf((a - y) * inv) + std::erf((a + y) * inv));
}

/// int_{Q_a^2} p_tau(x1 - x2) dx1 dx2 in closed form,
/// = 2a erf(sqrt(2) a / sqrt(tau)) - 2 tau (p_tau(0) - p_tau(2a)).
inline double box_cross_mass(double a, double tau) {
    if (a <= 0.0) return 0.0;
    if (tau <= 0.0) return 2.0 * a;
    return 2.0 * a * std::erf(std::sqrt(2.0) * a / std::sqrt(tau)) -
           2.0 * tau * (heat_kernel(tau, 0.0) - heat_kernel(tau, 2.0 * a));
}

/// Arguments of the box-averaged kernel weights.  The normalizer slot carries
/// the caller-supplied sigma_{R,t} or Sigma_{R,t} (sample or quadrature).
struct WeightQuery {
    double R;           // > 0
    double t;           // > 0
    double s;           // in (0, t)
    double y;
    double normalizer;  // > 0

    void validate() const {
        if (!(R > 0) || !(t > 0) || !(normalizer > 0) || !(0 < s && s < t))
            throw std::domain_error("WeightQuery: invariant violated");
    }
};

/// phi_{R,t}(s,y) = (1/normalizer) int_{Q_R} p_{t-s}(x-y) dx; bounded by
/// 1/normalizer.
inline double phi_weight(const WeightQuery& q) {
    q.validate();
    const double w = kernel_box_integral(q.R, q.t - q.s, q.y) / q.normalizer;
    assert(w <= 1.0 / q.normalizer * (1.0 + 1e-12));
    return w;
}

/// varphi_{R,t}(s,y) = (1/normalizer) int_{Q_R} p_{s(t-s)/t}(y - (s/t) x) dx;
/// bounded by t/(s*normalizer).
inline double varphi_weight(const WeightQuery& q) {
    q.validate();
    const double v = q.s * (q.t - q.s) / q.t;
    const double w =
        (q.t / q.s) * kernel_box_integral(q.s * q.R / q.t, v, q.y) / q.normalizer;
    assert(w <= q.t / (q.s * q.normalizer) * (1.0 + 1e-12));
    return w;
}

/// Time-ordered argument pack of the second-derivative majorant Phi and the
/// kernel integral K.
struct SecondDerivArgs {
    double r, s, t;  // 0 < r < s < t
    double z, y, x;

    void validate() const {
        if (!(0 < r && r < s && s < t))
            throw std::domain_error("SecondDerivArgs: need 0 < r < s < t");
    }
};

/// Phi_{r,z,s,y}(t,x) = p_{t-s}(x-y) ( p_{s-r}(y-z)
///   + [p_{t-r}(z-y) + p_{t-r}(z-x) + 1{|y-x| > |z-y|}] / (s-r)^{1/4} ).
double big_phi(const SecondDerivArgs& a);

/// K_{r,z,s,y}(t,x) = sqrt(atom + bulk), where atom is the delta part
/// p^2_{t-s}(x-y) p^2_{s-r}(y-z) and bulk is the theta-integral of the triple
/// squared-kernel product (spatial integral reduced in closed form, theta
/// integrated adaptively to 1e-8 relative).
double k_integral(const SecondDerivArgs& a, double rel_tol = 1e-8);

/// Fejer weight (1 - cos xi)/xi^2 with the removable singularity filled by a
/// truncated Taylor series below |xi| < 1e-4.
template <typename Scalar>
Scalar fejer_weight(Scalar xi) {
    const Scalar a = std::abs(xi);
    if (a < Scalar(1e-4)) {
        const Scalar x2 = xi * xi;
        return Scalar(0.5) - x2 / Scalar(24) + x2 * x2 / Scalar(720);
    }
    return (Scalar(1) - std::cos(xi)) / (xi * xi);
}

/// int_R fejer(xi) exp(-a xi^2) dxi for a >= 0 (pi at a = 0).  Evaluated by
/// adaptive quadrature of the smooth erf reduction; no oscillatory integrals.
double fejer_gauss_integral(double a, double rel_tol = 1e-10);

/// Closed form of the same integral, used as a cross-check:
/// pi erf(1/(2 sqrt(a))) + 2 sqrt(pi a) (exp(-1/(4a)) - 1).
double fejer_gauss_integral_closed(double a);

}  // namespace shelab
