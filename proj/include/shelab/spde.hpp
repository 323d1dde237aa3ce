#pragma once

// Explicit finite-difference solvers for the two mild equations (flat initial
// data with general sigma, and the parabolic Anderson model with Dirac data),
// plus the single-pass tangent field whose terminal box average is the
// Malliavin projection D_v F (resp. D_w G) on the same noise.
//
// Scheme: u^{n+1}_j = u^n_j + (dt/(2 dx^2)) (u^n_{j+1} - 2 u^n_j + u^n_{j-1})
//                   + sigma(u^n_j) xi^n_j sqrt(dt/dx),  periodic wrap at +-L.
//
// The PAM path evolves the ratio field U^n_j = u^n_j / p_{n dt}(x_j) with the
// same update rewritten in exactly rescaled stencil weights: the raw field
// spans hundreds of orders of magnitude across the box and is not
// representable in doubles, while U is O(1) everywhere.

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shelab/noise.hpp"

namespace shelab {

enum class Case { flat, pam };

/// Diffusion coefficient sigma with its first two derivatives and the bounds
/// used for (H1)-style spot checks.  The vectorized appliers are what the hot
/// loops call; presets define them with Eigen expressions.
struct CoefficientSpec {
    std::string name;
    std::function<double(double)> sigma;
    std::function<double(double)> sigma_prime;
    std::function<double(double)> sigma_second;
    std::function<void(const Eigen::ArrayXd&, Eigen::ArrayXd&)> sigma_vec;
    std::function<void(const Eigen::ArrayXd&, Eigen::ArrayXd&)> sigma_prime_vec;
    std::function<void(const Eigen::ArrayXd&, Eigen::ArrayXd&)> sigma_second_vec;
    double lipschitz_bound = 0.0;
    double growth_exponent = 0.0;  // |sigma''(a)| <= C (1 + |a|^m)
    double lower_bound = 0.0;      // inf |sigma| when bounded away from 0, else 0

    static CoefficientSpec constant_one();
    static CoefficientSpec identity();
    static CoefficientSpec two_plus_sine();
    /// Natural cubic spline through (x_i, sigma_i); derivatives come from the
    /// spline coefficients.
    static CoefficientSpec from_spline_table(const std::vector<double>& xs,
                                             const std::vector<double>& ys,
                                             const std::string& name = "custom");
    static CoefficientSpec preset(const std::string& name);

    /// Random spot checks of the Lipschitz bound, the sigma'' growth bound,
    /// and sigma(1) != 0 when required; throws on violation.
    void spot_check(std::uint64_t seed, bool require_sigma1_nonzero) const;
};

/// Thrown when a replica exceeds the divergence guard; names the first bad
/// step.
struct ReplicaDiverged : std::runtime_error {
    int step;
    explicit ReplicaDiverged(int step_)
        : std::runtime_error("replica diverged at step " + std::to_string(step_)),
          step(step_) {}
};

/// Full discrete trajectory of one replica.  Flat case: rows are u-slices.
/// PAM case: row 0 is the raw discrete Dirac slice (1/dx at the center node),
/// rows n >= 1 are the ratio slices U^n = u^n / p_{n dt}; raw u values are
/// recovered through u_value().
struct FieldPath {
    GridSpec grid;
    Case case_tag = Case::flat;
    StreamKey key;
    Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values;

    double u_value(int n, int j) const;
    const auto slice(int n) const { return values.row(n); }
};

/// How the PAM run is initialized: the discrete Dirac (default), or the
/// cross-check mode that starts at time t0 from the exact profile p_{t0}
/// (i.e. ratio field identically 1).
struct PamInit {
    bool heat_start = false;
    double t0 = 0.0;
};

FieldPath solve_case1(const GridSpec& grid, const CoefficientSpec& coeff,
                      const NoiseTape& tape);
FieldPath solve_case2_pam(const GridSpec& grid, const NoiseTape& tape,
                          const PamInit& init = {});

/// Trapezoid box sum dx * sum_{|x_j| <= R} w_j f_j with half weights at +-R;
/// exact on the grid when R is a node (GridSpec::make guarantees it).
double box_average(const GridSpec& grid, const double* slice, double R);

/// (box integral of the terminal slice - centering) / normalizer; the field
/// is u for flat paths and U for PAM paths.
double spatial_average(const FieldPath& path, double R, double normalizer,
                       double centering);

/// Discrete mass dx * sum_j u(step, j); stays within scheme error of 1 in the
/// noiseless PAM test mode.
double pam_mass(const FieldPath& path, int step);

/// Tangent field state after the single co-simulation pass.
struct TangentState {
    GridSpec grid;
    Eigen::ArrayXd z;          // terminal slice of the tangent field
    double projection = 0.0;   // D_v F (resp. D_w G) at the given normalizer
    double raw = 0.0;          // projection at normalizer == 1
    double normalizer = 1.0;
};

/// Unnormalized weight rows: phi-hat(tau_n, x_j) = int_{Q_R} p_{t-tau}(x-y) dx
/// for flat runs, varphi-hat for PAM runs.  Shared read-only by all replicas
/// of one configuration.
struct WeightTable {
    GridSpec grid;
    double R = 0.0;
    Case case_tag = Case::flat;
    Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows;

    static WeightTable build(const GridSpec& grid, double R, Case c);
};

/// Evolves the single linear tangent field with deterministic source
/// phi-hat sigma(u)^2 (flat) / varphi-hat U^2 (PAM) and multiplicative noise
/// sigma'(u) Z dW on the replayed tape; the terminal box average divided by
/// normalizer^2 is D_v F (one 1/normalizer lives inside the weight, one in
/// the projection).
TangentState tangent_projection(const FieldPath& path, const CoefficientSpec& coeff,
                                const NoiseTape& tape, double R, double normalizer);

/// Streaming replica row: everything an ensemble needs from one replica
/// without storing the path.
struct ReplicaStats {
    double box_raw = 0.0;        // trapezoid box integral of the terminal field
    double tangent_raw = 0.0;    // unnormalized tangent projection
    bool aborted = false;
    int abort_step = -1;
    std::vector<double> node_values;    // terminal field at probe nodes
    std::vector<double> holder_deltas;  // field(t) - field(t - delta) at x = 0
    std::vector<double> final_slice;    // only when keep_final_slice
};

struct StreamOptions {
    double R = 0.0;
    const WeightTable* weights = nullptr;  // enables the tangent co-simulation
    std::vector<int> probe_nodes;
    std::vector<int> holder_steps;  // offsets (in steps) back from the end
    bool keep_final_slice = false;
    double divergence_clip = 1e12;
    PamInit pam_init;
};

/// Fused solver + tangent pass for one replica (no path storage).
ReplicaStats run_replica(Case c, const GridSpec& grid, const CoefficientSpec& coeff,
                         const NoiseTape& tape, const StreamOptions& opts);

}  // namespace shelab
