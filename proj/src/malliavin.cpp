#include "shelab/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shelab/detail/stepping.hpp"
#include "shelab/kernel.hpp"
#include "shelab/util.hpp"

namespace shelab {

namespace {

using Eigen::ArrayXd;
using detail::PamRatioCoeffs;
using detail::stencil3;
using detail::stencil3_weighted;
using detail::stencil3_weighted_transpose;

void check_keys(const FieldPath& path, const NoiseTape& tape) {
    const auto k = tape.key();
    if (k.master_seed != path.key.master_seed || k.replica != path.key.replica ||
        k.lane != path.key.lane)
        throw std::invalid_argument("derivative field: tape does not match the path replica");
}

// Unnormalized weight row: phi-hat (flat) or varphi-hat (pam) at time step n.
ArrayXd weight_row(const GridSpec& grid, double R, Case c, int n) {
    ArrayXd w(grid.n_x);
    const double t = grid.t_end, s = grid.time(n);
    for (int j = 0; j < grid.n_x; ++j) {
        const double y = grid.x(j);
        if (c == Case::flat)
            w[j] = kernel_box_integral(R, t - s, y);
        else
            w[j] = s == 0.0 ? 0.0
                            : (t / s) * kernel_box_integral(s * R / t, s * (t - s) / t, y);
    }
    return w;
}

ArrayXd box_weights(const GridSpec& grid, double R) {
    ArrayXd w = ArrayXd::Zero(grid.n_x);
    const int c = grid.center();
    const int m = static_cast<int>(std::lround(R / grid.dx()));
    for (int j = c - m + 1; j < c + m; ++j) w[j] = grid.dx();
    w[c - m] = w[c + m] = 0.5 * grid.dx();
    return w;
}

double lp_norm(const std::vector<double>& xs, double p) {
    if (xs.empty()) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += std::pow(std::abs(x), p);
    return std::pow(acc / xs.size(), 1.0 / p);
}

}  // namespace

void Anchor::validate(const GridSpec& grid) const {
    if (s_step <= 0 || s_step >= grid.n_t)
        throw std::domain_error("anchor time must lie strictly inside (0, t_end)");
    if (y_node < 0 || y_node >= grid.n_x) throw std::domain_error("anchor node off grid");
    if (has_pair()) {
        if (r_step <= 0 || r_step >= s_step)
            throw std::domain_error("second-order anchor pair must satisfy 0 < r < s");
        if (z_node < 0 || z_node >= grid.n_x) throw std::domain_error("anchor node off grid");
    }
}

DerivativeField first_derivative_field(const FieldPath& path, const CoefficientSpec& coeff,
                                       const NoiseTape& tape, const Anchor& anchor) {
    anchor.validate(path.grid);
    check_keys(path, tape);
    const GridSpec& grid = path.grid;
    const int n_x = grid.n_x, n_t = grid.n_t, s0 = anchor.s_step;
    const double dx = grid.dx(), dt = grid.dt();
    const double r = dt / (2.0 * dx * dx), snoise = std::sqrt(dt / dx);

    DerivativeField f;
    f.anchor = anchor;
    f.order = 1;
    f.grid = grid;
    f.case_tag = path.case_tag;
    f.start_step = s0;
    f.values.resize(n_t - s0 + 1, n_x);

    ArrayXd h = ArrayXd::Zero(n_x), hn(n_x), sigp(n_x), scratch;
    if (path.case_tag == Case::flat)
        h[anchor.y_node] = coeff.sigma(path.values(s0, anchor.y_node)) / dx;
    else
        h[anchor.y_node] = path.values(s0, anchor.y_node) / dx;
    f.values.row(0) = h.transpose();

    const ArrayXd xs = detail::grid_nodes(grid);
    PamRatioCoeffs pc;
    for (int n = s0; n < n_t; ++n) {
        Eigen::Map<const ArrayXd> xi(tape.row(n, scratch), n_x);
        if (path.case_tag == Case::flat) {
            const ArrayXd u = path.values.row(n).transpose();
            coeff.sigma_prime_vec(u, sigp);
            stencil3(h, hn, 1.0 - 2.0 * r, r);
            hn += sigp * h * xi * snoise;
        } else {
            pc.compute(grid, xs, n);
            stencil3_weighted(h, hn, 1.0 - 2.0 * r, r * pc.beta, pc.e2p, pc.e2m);
            hn += h * xi * snoise;
            hn *= pc.m;
        }
        h.swap(hn);
        f.values.row(n - s0 + 1) = h.transpose();
    }
    return f;
}

DerivativeField second_derivative_field(const FieldPath& path, const CoefficientSpec& coeff,
                                        const NoiseTape& tape, const Anchor& pair,
                                        const DerivativeField& d_rz) {
    pair.validate(path.grid);
    if (!pair.has_pair()) throw std::domain_error("second_derivative_field needs an (r,z) pair");
    if (d_rz.anchor.s_step != pair.r_step || d_rz.anchor.y_node != pair.z_node ||
        d_rz.order != 1)
        throw std::invalid_argument("second_derivative_field: d_rz is not the pair's field");
    check_keys(path, tape);

    const GridSpec& grid = path.grid;
    const int n_x = grid.n_x, n_t = grid.n_t, s0 = pair.s_step;
    const double dx = grid.dx(), dt = grid.dt();
    const double r = dt / (2.0 * dx * dx), snoise = std::sqrt(dt / dx);
    const bool flat = path.case_tag == Case::flat;

    // The sigma'' source needs the (s,y) first-derivative field alongside.
    std::optional<DerivativeField> d_sy;
    if (flat)
        d_sy = first_derivative_field(path, coeff, tape, Anchor{pair.s_step, pair.y_node});

    DerivativeField f;
    f.anchor = pair;
    f.order = 2;
    f.grid = grid;
    f.case_tag = path.case_tag;
    f.start_step = s0;
    f.values.resize(n_t - s0 + 1, n_x);

    ArrayXd h = ArrayXd::Zero(n_x), hn(n_x), sigp(n_x), sigpp(n_x), scratch;
    if (flat)
        h[pair.y_node] =
            coeff.sigma_prime(path.values(s0, pair.y_node)) * d_rz.at(s0, pair.y_node) / dx;
    else
        h[pair.y_node] = d_rz.at(s0, pair.y_node) / dx;
    f.values.row(0) = h.transpose();

    const ArrayXd xs = detail::grid_nodes(grid);
    PamRatioCoeffs pc;
    for (int n = s0; n < n_t; ++n) {
        Eigen::Map<const ArrayXd> xi(tape.row(n, scratch), n_x);
        if (flat) {
            const ArrayXd u = path.values.row(n).transpose();
            coeff.sigma_prime_vec(u, sigp);
            coeff.sigma_second_vec(u, sigpp);
            stencil3(h, hn, 1.0 - 2.0 * r, r);
            const auto rz = d_rz.slice(n);
            const auto sy = d_sy->slice(n);
            hn += (sigp * h +
                   sigpp * Eigen::Map<const ArrayXd>(rz.data(), n_x) *
                       Eigen::Map<const ArrayXd>(sy.data(), n_x)) *
                  xi * snoise;
        } else {
            pc.compute(grid, xs, n);
            stencil3_weighted(h, hn, 1.0 - 2.0 * r, r * pc.beta, pc.e2p, pc.e2m);
            hn += h * xi * snoise;
            hn *= pc.m;
        }
        h.swap(hn);
        f.values.row(n - s0 + 1) = h.transpose();
    }
    return f;
}

// Adjoint weights lambda^n: <lambda^n, h^n> equals the terminal Q_R box
// integral of any field h evolving by the homogeneous tangent dynamics.  One
// backward pass gives the box integrals of every anchored first- or
// second-derivative field at once.
namespace {

Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> adjoint_path(
    const FieldPath& path, const CoefficientSpec& coeff, const NoiseTape& tape, double R) {
    const GridSpec& grid = path.grid;
    const int n_x = grid.n_x, n_t = grid.n_t;
    const double dx = grid.dx(), dt = grid.dt();
    const double r = dt / (2.0 * dx * dx), snoise = std::sqrt(dt / dx);
    const bool flat = path.case_tag == Case::flat;

    Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> lam(n_t + 1, n_x);
    ArrayXd cur = box_weights(grid, R), nxt(n_x), sigp(n_x), scratch, tmp(n_x);
    lam.row(n_t) = cur.transpose();
    const ArrayXd xs = detail::grid_nodes(grid);
    PamRatioCoeffs pc;
    for (int n = n_t - 1; n >= 0; --n) {
        Eigen::Map<const ArrayXd> xi(tape.row(n, scratch), n_x);
        if (flat) {
            const ArrayXd u = path.values.row(n).transpose();
            coeff.sigma_prime_vec(u, sigp);
            stencil3(cur, nxt, 1.0 - 2.0 * r, r);
            nxt += sigp * cur * xi * snoise;
        } else {
            if (n == 0) {
                lam.row(0).setZero();
                break;
            }
            pc.compute(grid, xs, n);
            tmp = pc.m * cur;
            stencil3_weighted_transpose(tmp, nxt, 1.0 - 2.0 * r, r * pc.beta, pc.e2p, pc.e2m);
            nxt += tmp * xi * snoise;
        }
        cur.swap(nxt);
        lam.row(n) = cur.transpose();
    }
    return lam;
}

}  // namespace

double dv_dv_projection(const FieldPath& path, const CoefficientSpec& coeff,
                        const NoiseTape& tape, double R, double normalizer,
                        const AnchorLattice& lattice) {
    check_keys(path, tape);
    if (normalizer <= 0.0) throw std::domain_error("dv_dv_projection: normalizer <= 0");
    const GridSpec& grid = path.grid;
    const int n_x = grid.n_x, n_t = grid.n_t, K = lattice.n_time;
    const double dx = grid.dx(), dt = grid.dt(), t = grid.t_end;
    const double r = dt / (2.0 * dx * dx), snoise = std::sqrt(dt / dx);
    const bool flat = path.case_tag == Case::flat;

    const std::int64_t cost =
        static_cast<std::int64_t>(3 * K + 3) * n_t * static_cast<std::int64_t>(n_x);
    if (cost > lattice.budget_cells) throw BudgetExceeded(cost);

    const auto lam = adjoint_path(path, coeff, tape, R);

    // Midpoint r/s levels, staggered so that r_k < s_k < r_{k+1}.
    const double h_level = t / K;
    std::vector<int> r_idx(K), s_idx(K);
    for (int k = 0; k < K; ++k) {
        r_idx[k] = std::clamp(static_cast<int>(std::lround((k + 0.25) * h_level / dt)), 1,
                              n_t - 2);
        s_idx[k] = std::clamp(static_cast<int>(std::lround((k + 0.75) * h_level / dt)),
                              r_idx[k] + 1, n_t - 1);
    }

    std::vector<ArrayXd> B(K, ArrayXd::Zero(n_x)), C, W(K, ArrayXd::Zero(n_x));
    if (flat) C.assign(K, ArrayXd::Zero(n_x));
    std::vector<bool> b_live(K, false), w_live(K, false);

    ArrayXd sig(n_x), sigp(n_x), sigpp(n_x), fn(n_x), prefix(n_x), atil(n_x), scratch;
    const ArrayXd xs = detail::grid_nodes(grid);
    PamRatioCoeffs pc;

    double t1 = 0.0;
    const int start = flat ? 0 : 1;
    for (int n = start; n < n_t; ++n) {
        Eigen::Map<const ArrayXd> xi(tape.row(n, scratch), n_x);
        const ArrayXd u = path.values.row(n).transpose();
        const ArrayXd w = weight_row(grid, R, path.case_tag, n);
        if (flat) {
            coeff.sigma_vec(u, sig);
            coeff.sigma_prime_vec(u, sigp);
            coeff.sigma_second_vec(u, sigpp);
        }

        // T1 term at time tau_n: the running prefix holds every level with
        // r_k < tau_n, which realizes the ordered r < s constraint.
        prefix.setZero();
        for (int k = 0; k < K; ++k)
            if (b_live[k]) prefix += B[k];
        const Eigen::Map<const ArrayXd> lam_n(lam.row(n).data(), n_x);
        if (flat)
            t1 += dt * h_level * (w * sigp * sig * prefix * lam_n).sum();
        else
            t1 += dt * h_level * (w * prefix * lam_n * u).sum();

        // Level injections at their midpoint steps.
        for (int k = 0; k < K; ++k) {
            if (r_idx[k] == n) {
                B[k] = flat ? ArrayXd(w * sig.square()) : ArrayXd(w * u.square());
                if (flat) C[k] = B[k];
                b_live[k] = true;
            }
            if (s_idx[k] == n) {
                // A-tilde at this level: full lower levels, half of level k
                // (the ordered half of the diagonal time cell).
                atil.setZero();
                for (int kk = 0; kk < k; ++kk) atil += B[kk];
                atil += 0.5 * B[k];
                atil *= h_level;
                W[k] = flat ? ArrayXd(w * sig * sigp * atil) : ArrayXd(w * u * atil);
                w_live[k] = true;
            }
        }

        // Evolve every live field one step on the shared noise.
        if (!flat) pc.compute(grid, xs, n);
        auto evolve_plain = [&](ArrayXd& f) {
            if (flat) {
                stencil3(f, fn, 1.0 - 2.0 * r, r);
                fn += sigp * f * xi * snoise;
            } else {
                stencil3_weighted(f, fn, 1.0 - 2.0 * r, r * pc.beta, pc.e2p, pc.e2m);
                fn += f * xi * snoise;
                fn *= pc.m;
            }
            f.swap(fn);
        };
        // W first: its sigma'' source needs B and C at the current time.
        for (int k = 0; k < K; ++k) {
            if (!w_live[k]) continue;
            if (flat) {
                atil.setZero();
                for (int kk = 0; kk < k; ++kk)
                    if (b_live[kk]) atil += B[kk];
                atil += 0.5 * B[k];
                atil *= h_level;
                stencil3(W[k], fn, 1.0 - 2.0 * r, r);
                fn += (sigp * W[k] + sigpp * atil * C[k]) * xi * snoise;
                W[k].swap(fn);
            } else {
                evolve_plain(W[k]);
            }
        }
        for (int k = 0; k < K; ++k) {
            if (!b_live[k]) continue;
            evolve_plain(B[k]);
            if (flat) evolve_plain(C[k]);
        }
    }

    double t2 = 0.0;
    for (int k = 0; k < K; ++k)
        if (w_live[k]) t2 += h_level * box_average(grid, W[k].data(), R);

    return (t1 + 2.0 * t2) / (normalizer * normalizer * normalizer);
}

double dv_dv_projection_lattice(const FieldPath& path, const CoefficientSpec& coeff,
                                const NoiseTape& tape, double R, double normalizer,
                                const AnchorLattice& lattice) {
    check_keys(path, tape);
    const GridSpec& grid = path.grid;
    const int n_t = grid.n_t, K = lattice.n_time, M = lattice.n_space;
    const double dt = grid.dt(), t = grid.t_end;
    const bool flat = path.case_tag == Case::flat;

    const std::int64_t fields =
        static_cast<std::int64_t>(K) * M * (1 + K * M);  // first fields + pair fields
    const std::int64_t cost = fields * n_t * grid.n_x;
    if (cost > lattice.budget_cells) throw BudgetExceeded(cost);

    const double h_level = t / K;
    std::vector<int> r_idx(K), s_idx(K);
    for (int k = 0; k < K; ++k) {
        r_idx[k] = std::clamp(static_cast<int>(std::lround((k + 0.25) * h_level / dt)), 1,
                              n_t - 2);
        s_idx[k] = std::clamp(static_cast<int>(std::lround((k + 0.75) * h_level / dt)),
                              r_idx[k] + 1, n_t - 1);
    }
    // Trapezoid space nodes across the weight support.
    const double half = R + 3.0 * std::sqrt(t);
    std::vector<int> nodes(M);
    std::vector<double> wz(M);
    for (int m = 0; m < M; ++m) {
        const double x = -half + 2.0 * half * m / (M - 1);
        nodes[m] = std::clamp(static_cast<int>(std::lround((x + grid.L) / grid.dx())), 0,
                              grid.n_x - 1);
        wz[m] = 2.0 * half / (M - 1) * (m == 0 || m == M - 1 ? 0.5 : 1.0);
    }

    auto weight_at = [&](int step, int node) {
        const double s = grid.time(step), y = grid.x(node);
        if (flat) return kernel_box_integral(R, t - s, y);
        return s == 0.0 ? 0.0
                        : (t / s) * kernel_box_integral(s * R / t, s * (t - s) / t, y);
    };
    auto v_factor = [&](int step, int node) {  // sigma(u) (flat) or U (pam)
        return flat ? coeff.sigma(path.values(step, node)) : path.values(step, node);
    };

    // First-derivative fields for every (r_k, z) and (s_k, y) anchor.
    std::vector<std::vector<DerivativeField>> d_r(K), d_s(K);
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m) {
            d_r[k].push_back(
                first_derivative_field(path, coeff, tape, Anchor{r_idx[k], nodes[m]}));
            d_s[k].push_back(
                first_derivative_field(path, coeff, tape, Anchor{s_idx[k], nodes[m]}));
        }

    double t1 = 0.0, t2 = 0.0;
    for (int kr = 0; kr < K; ++kr)
        for (int ks = kr; ks < K; ++ks) {
            const double wt = h_level * h_level * (kr == ks ? 0.5 : 1.0);
            for (int mr = 0; mr < M; ++mr)
                for (int ms = 0; ms < M; ++ms) {
                    const Anchor pair{s_idx[ks], nodes[ms], r_idx[kr], nodes[mr]};
                    const double phr = weight_at(r_idx[kr], nodes[mr]);
                    const double phs = weight_at(s_idx[ks], nodes[ms]);
                    const double vr = v_factor(r_idx[kr], nodes[mr]);
                    const double drz_sy = d_r[kr][mr].at(s_idx[ks], nodes[ms]);
                    double box1 = box_average(grid, d_s[ks][ms].values.row(n_t - s_idx[ks]).data(), R);
                    const double bracket1 =
                        flat ? coeff.sigma_prime(path.values(s_idx[ks], nodes[ms])) : 1.0;
                    t1 += wt * wz[mr] * wz[ms] * phr * phs * vr * bracket1 * drz_sy * box1;

                    const auto d2 =
                        second_derivative_field(path, coeff, tape, pair, d_r[kr][mr]);
                    const double vs = v_factor(s_idx[ks], nodes[ms]);
                    const double box2 =
                        box_average(grid, d2.values.row(n_t - s_idx[ks]).data(), R);
                    t2 += wt * wz[mr] * wz[ms] * phr * phs * vr * vs * box2;
                }
        }
    return (t1 + 2.0 * t2) / (normalizer * normalizer * normalizer);
}

SteinIngredients stein_report(const std::vector<double>& f_samples,
                              const std::vector<double>& dvf_samples,
                              const std::vector<double>& dvdvf_samples) {
    if (f_samples.empty() || dvf_samples.empty())
        throw std::invalid_argument("stein_report: empty sample set");
    SteinIngredients out;
    out.norm_F_4 = lp_norm(f_samples, 4.0);
    out.norm_DvDvF_2 = lp_norm(dvdvf_samples, 2.0);
    out.n_dvdv = dvdvf_samples.size();

    double acc2 = 0.0, rms = 0.0;
    for (double v : dvf_samples) {
        acc2 += (1.0 - v) * (1.0 - v);
        rms += v * v;
    }
    out.norm_one_minus_DvF_2 = std::sqrt(acc2 / dvf_samples.size());
    rms = std::sqrt(rms / dvf_samples.size());

    const double tol = -1e-6 * std::max(rms, 1e-30);
    std::size_t nonpos = 0, below_tol = 0;
    for (double v : dvf_samples) {
        if (v <= 0.0) ++nonpos;
        if (v < tol) ++below_tol;
    }
    out.negative_fraction = static_cast<double>(below_tol) / dvf_samples.size();
    out.inverse_valid = static_cast<double>(nonpos) / dvf_samples.size() <= 0.01;

    auto inv4 = [](const std::vector<double>& xs) {
        double acc = 0.0;
        for (double v : xs) {
            if (v <= 0.0) return std::numeric_limits<double>::infinity();
            acc += 1.0 / (v * v * v * v);
        }
        return std::pow(acc / xs.size(), 0.25);
    };
    out.norm_inv_DvF_4_raw = inv4(dvf_samples);

    std::vector<double> wins = dvf_samples;
    std::sort(wins.begin(), wins.end());
    const std::size_t qi =
        std::min(wins.size() - 1, static_cast<std::size_t>(0.001 * wins.size()));
    const double q = wins[qi];
    for (double& v : wins) v = std::max(v, q);
    out.norm_inv_DvF_4_winsorized = inv4(wins);

    auto assemble = [&](double inv) {
        return (out.norm_F_4 * inv + 2.0) * out.norm_one_minus_DvF_2 +
               inv * inv * out.norm_DvDvF_2;
    };
    out.rhs_e85 = assemble(out.norm_inv_DvF_4_winsorized);
    out.rhs_e85_raw = assemble(out.norm_inv_DvF_4_raw);
    return out;
}

namespace {

MomentRatioReport moment_probe_impl(Case c, const GridSpec& grid, const CoefficientSpec& coeff,
                                    std::uint64_t master_seed, int n_replicas, int order,
                                    const std::vector<Anchor>& anchors,
                                    const std::vector<int>& eval_nodes, double p_norm,
                                    int workers) {
    for (const auto& a : anchors) a.validate(grid);
    const std::size_t combos = anchors.size() * eval_nodes.size();
    std::vector<double> acc(static_cast<std::size_t>(n_replicas) * combos, 0.0);

    parallel_for_index(n_replicas, workers, [&](std::int64_t i) {
        const StreamKey key{master_seed, static_cast<std::uint32_t>(i), Lane::solution};
        const NoiseTape tape = sample_tape(grid, key);
        const FieldPath path = c == Case::flat ? solve_case1(grid, coeff, tape)
                                               : solve_case2_pam(grid, tape);
        std::size_t slot = static_cast<std::size_t>(i) * combos;
        for (const auto& a : anchors) {
            DerivativeField field = [&] {
                if (order == 1) return first_derivative_field(path, coeff, tape, a);
                const auto d_rz =
                    first_derivative_field(path, coeff, tape, Anchor{a.r_step, a.z_node});
                return second_derivative_field(path, coeff, tape, a, d_rz);
            }();
            for (int node : eval_nodes)
                acc[slot++] = std::pow(std::abs(field.at(grid.n_t, node)), p_norm);
        }
    });

    MomentRatioReport rep;
    const double t = grid.t_end;
    std::size_t combo = 0;
    for (const auto& a : anchors) {
        const double s = grid.time(a.s_step), y = grid.x(a.y_node);
        for (int node : eval_nodes) {
            const double x = grid.x(node);
            double mean = 0.0;
            for (int i = 0; i < n_replicas; ++i) mean += acc[i * combos + combo];
            mean /= n_replicas;
            const double norm = std::pow(mean, 1.0 / p_norm);
            double majorant;
            if (order == 1) {
                majorant = c == Case::flat ? heat_kernel(t - s, x - y)
                                           : heat_kernel(s * (t - s) / t, y - s / t * x);
            } else {
                const double r = grid.time(a.r_step), z = grid.x(a.z_node);
                majorant = c == Case::flat
                               ? big_phi(SecondDerivArgs{r, s, t, z, y, x})
                               : heat_kernel(s * (t - s) / t, y - s / t * x) *
                                     heat_kernel(r * (s - r) / s, z - r / s * y);
            }
            rep.ratios.push_back(norm / majorant);
            rep.max_ratio = std::max(rep.max_ratio, rep.ratios.back());
            ++combo;
        }
    }
    return rep;
}

}  // namespace

MomentRatioReport first_moment_ratio_probe(Case c, const GridSpec& grid,
                                           const CoefficientSpec& coeff,
                                           std::uint64_t master_seed, int n_replicas,
                                           const std::vector<Anchor>& anchors,
                                           const std::vector<int>& eval_nodes, double p_norm,
                                           int workers) {
    return moment_probe_impl(c, grid, coeff, master_seed, n_replicas, 1, anchors, eval_nodes,
                             p_norm, workers);
}

MomentRatioReport second_moment_ratio_probe(Case c, const GridSpec& grid,
                                            const CoefficientSpec& coeff,
                                            std::uint64_t master_seed, int n_replicas,
                                            const std::vector<Anchor>& pairs,
                                            const std::vector<int>& eval_nodes, double p_norm,
                                            int workers) {
    return moment_probe_impl(c, grid, coeff, master_seed, n_replicas, 2, pairs, eval_nodes,
                             p_norm, workers);
}

}  // namespace shelab
