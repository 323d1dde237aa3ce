#include "shelab/spde.hpp"

#include <algorithm>
#include <cmath>

#include "shelab/detail/stepping.hpp"
#include "shelab/kernel.hpp"

namespace shelab {

namespace {

using Eigen::ArrayXd;
using detail::PamRatioCoeffs;
using detail::stencil3;
using detail::stencil3_weighted;

void check_slice(const ArrayXd& f, double clip, int step) {
    const double mx = f.abs().maxCoeff();
    if (!(mx <= clip)) throw ReplicaDiverged(step);
}

}  // namespace

CoefficientSpec CoefficientSpec::constant_one() {
    CoefficientSpec c;
    c.name = "constant-1";
    c.sigma = [](double) { return 1.0; };
    c.sigma_prime = [](double) { return 0.0; };
    c.sigma_second = [](double) { return 0.0; };
    c.sigma_vec = [](const ArrayXd& u, ArrayXd& out) { out.setConstant(u.size(), 1.0); };
    c.sigma_prime_vec = [](const ArrayXd& u, ArrayXd& out) { out.setZero(u.size()); };
    c.sigma_second_vec = [](const ArrayXd& u, ArrayXd& out) { out.setZero(u.size()); };
    c.lipschitz_bound = 0.0;
    c.growth_exponent = 0.0;
    c.lower_bound = 1.0;
    return c;
}

CoefficientSpec CoefficientSpec::identity() {
    CoefficientSpec c;
    c.name = "identity";
    c.sigma = [](double a) { return a; };
    c.sigma_prime = [](double) { return 1.0; };
    c.sigma_second = [](double) { return 0.0; };
    c.sigma_vec = [](const ArrayXd& u, ArrayXd& out) { out = u; };
    c.sigma_prime_vec = [](const ArrayXd& u, ArrayXd& out) { out.setConstant(u.size(), 1.0); };
    c.sigma_second_vec = [](const ArrayXd& u, ArrayXd& out) { out.setZero(u.size()); };
    c.lipschitz_bound = 1.0;
    c.growth_exponent = 0.0;
    c.lower_bound = 0.0;
    return c;
}

CoefficientSpec CoefficientSpec::two_plus_sine() {
    CoefficientSpec c;
    c.name = "two-plus-sine";
    c.sigma = [](double a) { return 2.0 + std::sin(a); };
    c.sigma_prime = [](double a) { return std::cos(a); };
    c.sigma_second = [](double a) { return -std::sin(a); };
    c.sigma_vec = [](const ArrayXd& u, ArrayXd& out) { out = 2.0 + u.sin(); };
    c.sigma_prime_vec = [](const ArrayXd& u, ArrayXd& out) { out = u.cos(); };
    c.sigma_second_vec = [](const ArrayXd& u, ArrayXd& out) { out = -u.sin(); };
    c.lipschitz_bound = 1.0;
    c.growth_exponent = 0.0;
    c.lower_bound = 1.0;
    return c;
}

CoefficientSpec CoefficientSpec::from_spline_table(const std::vector<double>& xs,
                                                   const std::vector<double>& ys,
                                                   const std::string& name) {
    const std::size_t n = xs.size();
    if (n < 3 || ys.size() != n)
        throw std::domain_error("spline table needs >= 3 matched knots");
    for (std::size_t i = 1; i < n; ++i)
        if (xs[i] <= xs[i - 1]) throw std::domain_error("spline knots must increase");

    // Natural cubic spline second derivatives by the Thomas algorithm.
    auto x = std::make_shared<std::vector<double>>(xs);
    auto y = std::make_shared<std::vector<double>>(ys);
    auto m2 = std::make_shared<std::vector<double>>(n, 0.0);
    {
        std::vector<double> diag(n, 2.0), rhs(n, 0.0), sub(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = xs[i] - xs[i - 1], h1 = xs[i + 1] - xs[i];
            sub[i] = h0 / (h0 + h1);
            rhs[i] = 6.0 / (h0 + h1) *
                     ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double w = sub[i] / diag[i - 1];
            diag[i] -= w * (1.0 - sub[i - 1]);
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            (*m2)[i] = (rhs[i] - (1.0 - sub[i]) * (i + 2 < n ? (*m2)[i + 1] : 0.0)) / diag[i];
            if (i == 1) break;
        }
    }

    auto locate = [x](double a) -> std::size_t {
        const auto it = std::upper_bound(x->begin(), x->end(), a);
        const std::size_t k = it - x->begin();
        return std::clamp<std::size_t>(k, 1, x->size() - 1) - 1;
    };
    auto eval = [x, y, m2, locate](double a, int deriv) {
        const std::size_t i = locate(a);
        const double h = (*x)[i + 1] - (*x)[i];
        const double A = ((*x)[i + 1] - a) / h, B = (a - (*x)[i]) / h;
        switch (deriv) {
            case 0:
                return A * (*y)[i] + B * (*y)[i + 1] +
                       ((A * A * A - A) * (*m2)[i] + (B * B * B - B) * (*m2)[i + 1]) * h * h /
                           6.0;
            case 1:
                return ((*y)[i + 1] - (*y)[i]) / h +
                       h / 6.0 *
                           ((3.0 * B * B - 1.0) * (*m2)[i + 1] - (3.0 * A * A - 1.0) * (*m2)[i]);
            default:
                return A * (*m2)[i] + B * (*m2)[i + 1];
        }
    };

    CoefficientSpec c;
    c.name = name;
    c.sigma = [eval](double a) { return eval(a, 0); };
    c.sigma_prime = [eval](double a) { return eval(a, 1); };
    c.sigma_second = [eval](double a) { return eval(a, 2); };
    auto lift = [](std::function<double(double)> f) {
        return [f](const ArrayXd& u, ArrayXd& out) {
            out.resize(u.size());
            for (Eigen::Index j = 0; j < u.size(); ++j) out[j] = f(u[j]);
        };
    };
    c.sigma_vec = lift(c.sigma);
    c.sigma_prime_vec = lift(c.sigma_prime);
    c.sigma_second_vec = lift(c.sigma_second);
    double lip = 0.0, curv = 0.0, low = std::abs(ys[0]);
    for (std::size_t i = 0; i < n; ++i) {
        lip = std::max(lip, std::abs(c.sigma_prime(xs[i])));
        curv = std::max(curv, std::abs((*m2)[i]));
        low = std::min(low, std::abs(ys[i]));
    }
    c.lipschitz_bound = lip * 1.0000001 + 1e-12;
    c.growth_exponent = 0.0;  // spline curvature is bounded
    c.lower_bound = low;
    return c;
}

CoefficientSpec CoefficientSpec::preset(const std::string& name) {
    if (name == "constant-1") return constant_one();
    if (name == "identity") return identity();
    if (name == "two-plus-sine") return two_plus_sine();
    throw std::domain_error("unknown coefficient preset: " + name);
}

void CoefficientSpec::spot_check(std::uint64_t seed, bool require_sigma1_nonzero) const {
    if (require_sigma1_nonzero && sigma(1.0) == 0.0)
        throw std::domain_error("coefficient has sigma(1) == 0");
    NoiseStream s(StreamKey{seed, 0, Lane::quadrature});
    const double growth_c = std::max(1.0, std::abs(sigma_second(0.0)));
    for (int i = 0; i < 256; ++i) {
        const double a = 2.0 * s.normal(2 * i);
        const double b = 2.0 * s.normal(2 * i + 1);
        if (lipschitz_bound > 0.0 &&
            std::abs(sigma(a) - sigma(b)) > lipschitz_bound * std::abs(a - b) + 1e-9)
            throw std::domain_error("coefficient violates its Lipschitz bound");
        if (std::abs(sigma_second(a)) >
            growth_c * (1.0 + std::pow(std::abs(a), growth_exponent)) + 1e-9)
            throw std::domain_error("coefficient violates the sigma'' growth bound");
    }
}

double FieldPath::u_value(int n, int j) const {
    if (case_tag == Case::flat || n == 0) return values(n, j);
    return values(n, j) * heat_kernel(n * grid.dt(), grid.x(j));
}

double box_average(const GridSpec& grid, const double* slice, double R) {
    const double dx = grid.dx();
    const int c = grid.center();
    const int m = static_cast<int>(std::lround(R / dx));
    double sum = 0.5 * (slice[c - m] + slice[c + m]);
    for (int j = c - m + 1; j < c + m; ++j) sum += slice[j];
    return sum * dx;
}

double spatial_average(const FieldPath& path, double R, double normalizer, double centering) {
    if (R > path.grid.L) throw std::domain_error("spatial_average: R outside the domain");
    const auto last = path.values.row(path.grid.n_t);
    return (box_average(path.grid, last.data(), R) - centering) / normalizer;
}

WeightTable WeightTable::build(const GridSpec& grid, double R, Case c) {
    WeightTable w;
    w.grid = grid;
    w.R = R;
    w.case_tag = c;
    w.rows.resize(grid.n_t, grid.n_x);
    const double t = grid.t_end;
    for (int n = 0; n < grid.n_t; ++n) {
        const double s = grid.time(n);
        for (int j = 0; j < grid.n_x; ++j) {
            const double y = grid.x(j);
            if (c == Case::flat) {
                w.rows(n, j) = kernel_box_integral(R, t - s, y);
            } else {
                w.rows(n, j) =
                    s == 0.0 ? 0.0
                             : (t / s) * kernel_box_integral(s * R / t, s * (t - s) / t, y);
            }
        }
    }
    return w;
}

namespace {

struct ProbePlan {
    std::vector<int> holder_record_steps;  // absolute step indices, one per offset
    explicit ProbePlan(const GridSpec& grid, const std::vector<int>& offsets) {
        for (int off : offsets) holder_record_steps.push_back(grid.n_t - off);
    }
    // Slot index of the offset recorded at this step, or -1.
    int slot(int step) const {
        for (std::size_t k = 0; k < holder_record_steps.size(); ++k)
            if (holder_record_steps[k] == step) return static_cast<int>(k);
        return -1;
    }
};

// Shared driver: evolves the solution field (and optionally the tangent
// field) one replica forward, either streaming statistics or recording every
// slice into `path_rows`.
template <bool kStorePath>
ReplicaStats drive(Case c, const GridSpec& grid, const CoefficientSpec& coeff,
                   const NoiseTape& tape, const StreamOptions& opts,
                   Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>*
                       path_rows) {
    const int n_x = grid.n_x, n_t = grid.n_t;
    const double dx = grid.dx(), dt = grid.dt();
    const double r = dt / (2.0 * dx * dx);
    const double snoise = std::sqrt(dt / dx);
    const bool tangent = opts.weights != nullptr;

    ArrayXd u(n_x), unew(n_x), sig(n_x), sigp(n_x), scratch;
    ArrayXd z, znew;
    if (tangent) {
        z.setZero(n_x);
        znew.setZero(n_x);
    }
    ArrayXd xs(n_x);
    for (int j = 0; j < n_x; ++j) xs[j] = grid.x(j);

    ReplicaStats out;
    ProbePlan plan(grid, opts.holder_steps);
    std::vector<double> holder_marks(opts.holder_steps.size(), 0.0);

    int start_step = 0;
    if (c == Case::flat) {
        u.setConstant(1.0);
    } else if (opts.pam_init.heat_start) {
        start_step = static_cast<int>(std::lround(opts.pam_init.t0 / dt));
        if (start_step < 1 || start_step >= n_t)
            throw std::domain_error("pam heat_start t0 outside (0, t_end)");
        u.setConstant(1.0);  // ratio field is exactly 1 on the p_{t0} profile
        if (kStorePath)
            for (int n = 0; n <= start_step; ++n) path_rows->row(n) = u.transpose();
    } else {
        // Discrete Dirac slice, then one raw step before switching to the
        // ratio field (U is undefined at t = 0 off the origin).
        u.setZero();
        u[grid.center()] = 1.0 / dx;
        if (kStorePath) path_rows->row(0) = u.transpose();
        const double* xi = tape.row(0, scratch);
        unew = u;
        const int cidx = grid.center();
        unew[cidx] = u[cidx] * (1.0 - 2.0 * r) + u[cidx] * xi[cidx] * snoise;
        unew[cidx - 1] = r * u[cidx] + u[cidx - 1] * xi[cidx - 1] * snoise;
        unew[cidx + 1] = r * u[cidx] + u[cidx + 1] * xi[cidx + 1] * snoise;
        for (int j = 0; j < n_x; ++j)
            unew[j] = j >= cidx - 1 && j <= cidx + 1
                          ? unew[j] / heat_kernel(dt, grid.x(j))
                          : 0.0;
        u = unew;
        start_step = 1;
        if (kStorePath) path_rows->row(1) = u.transpose();
    }
    if (kStorePath && c == Case::flat) path_rows->row(0) = u.transpose();

    PamRatioCoeffs pc;
    try {
        for (int n = start_step; n < n_t; ++n) {
            const double* xi_ptr = tape.row(n, scratch);
            Eigen::Map<const ArrayXd> xi(xi_ptr, n_x);

            if (c == Case::flat) {
                coeff.sigma_vec(u, sig);
                stencil3(u, unew, 1.0 - 2.0 * r, r);
                unew += sig * xi * snoise;
                if (tangent) {
                    coeff.sigma_prime_vec(u, sigp);
                    Eigen::Map<const ArrayXd> wt(opts.weights->rows.row(n).data(), n_x);
                    stencil3(z, znew, 1.0 - 2.0 * r, r);
                    znew += sigp * z * xi * snoise + dt * wt * sig.square();
                    z.swap(znew);
                }
            } else {
                pc.compute(grid, xs, n);
                stencil3_weighted(u, unew, 1.0 - 2.0 * r, r * pc.beta, pc.e2p, pc.e2m);
                unew += u * xi * snoise;
                unew *= pc.m;
                if (tangent) {
                    Eigen::Map<const ArrayXd> wt(opts.weights->rows.row(n).data(), n_x);
                    stencil3_weighted(z, znew, 1.0 - 2.0 * r, r * pc.beta, pc.e2p, pc.e2m);
                    znew += z * xi * snoise + dt * wt * u.square();
                    znew *= pc.m;
                    z.swap(znew);
                }
            }
            check_slice(unew, opts.divergence_clip, n + 1);
            u.swap(unew);
            if (kStorePath) path_rows->row(n + 1) = u.transpose();
            if (const int k = plan.slot(n + 1); k >= 0) holder_marks[k] = u[grid.center()];
        }
    } catch (const ReplicaDiverged& e) {
        out.aborted = true;
        out.abort_step = e.step;
        return out;
    }

    if (!u.isFinite().all()) {
        out.aborted = true;
        out.abort_step = n_t;
        return out;
    }

    out.box_raw = opts.R > 0.0 ? box_average(grid, u.data(), opts.R) : 0.0;
    if (tangent) out.tangent_raw = box_average(grid, z.data(), opts.R);
    for (int j : opts.probe_nodes) out.node_values.push_back(u[j]);
    for (std::size_t k = 0; k < holder_marks.size(); ++k)
        out.holder_deltas.push_back(u[grid.center()] - holder_marks[k]);
    if (opts.keep_final_slice) out.final_slice.assign(u.data(), u.data() + n_x);
    return out;
}

}  // namespace

FieldPath solve_case1(const GridSpec& grid, const CoefficientSpec& coeff,
                      const NoiseTape& tape) {
    FieldPath p;
    p.grid = grid;
    p.case_tag = Case::flat;
    p.key = tape.key();
    p.values.resize(grid.n_t + 1, grid.n_x);
    StreamOptions opts;
    auto stats = drive<true>(Case::flat, grid, coeff, tape, opts, &p.values);
    if (stats.aborted) throw ReplicaDiverged(stats.abort_step);
    return p;
}

FieldPath solve_case2_pam(const GridSpec& grid, const NoiseTape& tape, const PamInit& init) {
    FieldPath p;
    p.grid = grid;
    p.case_tag = Case::pam;
    p.key = tape.key();
    p.values.resize(grid.n_t + 1, grid.n_x);
    StreamOptions opts;
    opts.pam_init = init;
    auto stats = drive<true>(Case::pam, grid, CoefficientSpec::identity(), tape, opts,
                             &p.values);
    if (stats.aborted) throw ReplicaDiverged(stats.abort_step);
    return p;
}

/// Discrete mass dx * sum_j u(n, j); equals 1 up to scheme error in the
/// noiseless PAM test mode.
double pam_mass(const FieldPath& path, int step) {
    double sum = 0.0;
    for (int j = 0; j < path.grid.n_x; ++j) sum += path.u_value(step, j);
    return sum * path.grid.dx();
}

TangentState tangent_projection(const FieldPath& path, const CoefficientSpec& coeff,
                                const NoiseTape& tape, double R, double normalizer) {
    const GridSpec& grid = path.grid;
    if (tape.key().master_seed != path.key.master_seed ||
        tape.key().replica != path.key.replica || tape.key().lane != path.key.lane)
        throw std::invalid_argument("tangent_projection: tape does not match the path replica");
    if (R > grid.L - 6.0 * std::sqrt(grid.t_end))
        throw std::domain_error("tangent_projection: R too close to the truncation boundary");
    if (normalizer <= 0.0) throw std::domain_error("tangent_projection: normalizer <= 0");

    const int n_x = grid.n_x, n_t = grid.n_t;
    const double dx = grid.dx(), dt = grid.dt();
    const double r = dt / (2.0 * dx * dx);
    const double snoise = std::sqrt(dt / dx);
    const WeightTable wt = WeightTable::build(grid, R, path.case_tag);

    ArrayXd z = ArrayXd::Zero(n_x), znew(n_x), sig(n_x), sigp(n_x), scratch;
    ArrayXd xs(n_x);
    for (int j = 0; j < n_x; ++j) xs[j] = grid.x(j);
    PamRatioCoeffs pc;

    const int start = path.case_tag == Case::flat ? 0 : 1;
    for (int n = start; n < n_t; ++n) {
        const double* xi_ptr = tape.row(n, scratch);
        Eigen::Map<const ArrayXd> xi(xi_ptr, n_x);
        const ArrayXd u = path.values.row(n).transpose();
        Eigen::Map<const ArrayXd> w(wt.rows.row(n).data(), n_x);
        if (path.case_tag == Case::flat) {
            coeff.sigma_vec(u, sig);
            coeff.sigma_prime_vec(u, sigp);
            stencil3(z, znew, 1.0 - 2.0 * r, r);
            znew += sigp * z * xi * snoise + dt * w * sig.square();
        } else {
            pc.compute(grid, xs, n);
            stencil3_weighted(z, znew, 1.0 - 2.0 * r, r * pc.beta, pc.e2p, pc.e2m);
            znew += z * xi * snoise + dt * w * u.square();
            znew *= pc.m;
        }
        check_slice(znew, 1e12, n + 1);
        z.swap(znew);
    }

    TangentState ts;
    ts.grid = grid;
    ts.z = z;
    ts.raw = box_average(grid, z.data(), R);
    ts.normalizer = normalizer;
    ts.projection = ts.raw / (normalizer * normalizer);
    return ts;
}

ReplicaStats run_replica(Case c, const GridSpec& grid, const CoefficientSpec& coeff,
                         const NoiseTape& tape, const StreamOptions& opts) {
    return drive<false>(c, grid, coeff, tape, opts, nullptr);
}

}  // namespace shelab
