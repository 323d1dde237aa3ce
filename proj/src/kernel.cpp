#include "shelab/kernel.hpp"

#include "shelab/quadrature.hpp"

namespace shelab {

double big_phi(const SecondDerivArgs& a) {
    a.validate();
    if (a.s == a.r) throw std::domain_error("big_phi: singular at s == r");
    const double indicator = std::abs(a.y - a.x) > std::abs(a.z - a.y) ? 1.0 : 0.0;
    const double tail = heat_kernel(a.t - a.r, a.z - a.y) + heat_kernel(a.t - a.r, a.z - a.x) +
                        indicator;
    return heat_kernel(a.t - a.s, a.x - a.y) *
           (heat_kernel(a.s - a.r, a.y - a.z) + tail / std::pow(a.s - a.r, 0.25));
}

double k_integral(const SecondDerivArgs& a, double rel_tol) {
    a.validate();
    const double pts = heat_kernel(a.t - a.s, a.x - a.y);
    const double psr = heat_kernel(a.s - a.r, a.y - a.z);
    const double atom = pts * pts * psr * psr;

    // Spatial integral of p^2_{t-th}(x-w) p^2_{th-r}(w-z) p^2_{th-s}(w-y)
    // reduced via p_t^2 = p_{t/2} / sqrt(4 pi t) and the factorization
    // identity; only the theta integral stays numeric.  The endpoint
    // inverse-square-root factors are removed by theta = s + (t-s) sin^2(v).
    const double ts = a.t - a.s;
    const double dxy = a.x - a.y;
    const double head = heat_kernel(0.5 * ts, dxy) / std::pow(kTwoPi, 1.5);
    const auto integrand = [&](double v) {
        const double sv = std::sin(v);
        const double gamma = sv * sv;                  // (theta - s)/(t - s)
        const double theta = a.s + ts * gamma;
        const double var = 0.5 * (ts * gamma * (1.0 - gamma) + (theta - a.r));
        return heat_kernel(var, a.z - a.y - gamma * dxy) / std::sqrt(theta - a.r);
    };
    const double bulk = head * 2.0 * integrate_or_throw(integrand, 0.0, kPi / 2.0, rel_tol);
    return std::sqrt(atom + bulk);
}

double fejer_gauss_integral(double a, double rel_tol) {
    if (a < 0.0) throw std::domain_error("fejer_gauss_integral: a must be >= 0");
    if (a == 0.0) return kPi;
    const double c = 2.0 * std::sqrt(a);
    return kPi * integrate_or_throw([&](double b) { return std::erf(b / c); }, 0.0, 1.0,
                                    rel_tol);
}

double fejer_gauss_integral_closed(double a) {
    if (a <= 0.0) return kPi;
    const double inv = 1.0 / (2.0 * std::sqrt(a));
    return kPi * std::erf(inv) + 2.0 * std::sqrt(kPi * a) * std::expm1(-inv * inv);
}

}  // namespace shelab
