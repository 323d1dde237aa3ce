#pragma once

// Co-simulated Malliavin-derivative fields on the replayed noise: anchored
// first and second derivative fields, the double projection D_v(D_v F), and
// the empirical Stein-bound ingredients.

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "shelab/spde.hpp"

namespace shelab {

/// Grid-aligned derivative anchor (s, y), optionally paired with an earlier
/// (r, z) for second-order fields.  Anchors lie strictly inside (0, t_end).
struct Anchor {
    int s_step = 0;
    int y_node = 0;
    int r_step = -1;  // second-order pair when >= 0
    int z_node = -1;

    bool has_pair() const { return r_step >= 0; }
    void validate(const GridSpec& grid) const;
};

/// Field D_{s,y}u(tau, x) (order 1) or D_{r,z}D_{s,y}u(tau, x) (order 2) for
/// tau >= s; identically zero before the anchor time.  PAM fields are stored
/// in ratio form D.../p_tau, i.e. as derivatives of U.
struct DerivativeField {
    Anchor anchor;
    int order = 1;
    GridSpec grid;
    Case case_tag = Case::flat;
    int start_step = 0;
    Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values;

    const auto slice(int step) const { return values.row(step - start_step); }
    double at(int step, int j) const { return values(step - start_step, j); }
};

DerivativeField first_derivative_field(const FieldPath& path, const CoefficientSpec& coeff,
                                       const NoiseTape& tape, const Anchor& anchor);

/// Requires the first-derivative field of the pair's (r,z) anchor, already
/// evolved on [r, t]; the (s,y) first-derivative field (needed by the
/// sigma'' source) is computed internally.
DerivativeField second_derivative_field(const FieldPath& path, const CoefficientSpec& coeff,
                                        const NoiseTape& tape, const Anchor& pair,
                                        const DerivativeField& d_rz);

/// Time-level count and cost guard for the double-projection quadrature.
struct AnchorLattice {
    int n_time = 6;
    int n_space = 6;  // only the reference lattice evaluator uses this
    std::int64_t budget_cells = std::int64_t(4) << 30;
};

struct BudgetExceeded : std::runtime_error {
    std::int64_t estimated_cells;
    explicit BudgetExceeded(std::int64_t cells)
        : std::runtime_error("double-projection cost estimate " + std::to_string(cells) +
                             " cells exceeds the budget"),
          estimated_cells(cells) {}
};

/// D_v(D_v F) for one replica: the ordered double time integral of
/// phi phi x [bracket of first/second derivative fields], divided by
/// normalizer^3.  The r-integral is quantized to lattice.n_time midpoint
/// levels; the (z, s, y) integrals are carried at full grid resolution by
/// superposing the anchored fields level-wise and by one adjoint pass for the
/// terminal box integrals.
double dv_dv_projection(const FieldPath& path, const CoefficientSpec& coeff,
                        const NoiseTape& tape, double R, double normalizer,
                        const AnchorLattice& lattice = {});

/// Literal per-lattice-point evaluation of the same quantity (n_time x
/// n_space anchors per level, trapezoidal space weights), kept as a
/// cross-check oracle for dv_dv_projection on small grids.
double dv_dv_projection_lattice(const FieldPath& path, const CoefficientSpec& coeff,
                                const NoiseTape& tape, double R, double normalizer,
                                const AnchorLattice& lattice = {});

/// Empirical Stein-bound ingredients assembled per Eq. rhs =
/// (|F|_4 |(DvF)^{-1}|_4 + 2) |1 - DvF|_2 + |(DvF)^{-1}|_4^2 |Dv(DvF)|_2.
/// The inverse moment is reported raw and winsorized (smallest 0.1% of the
/// DvF sample clipped to the quantile); more than 1% nonpositive DvF values
/// invalidate it.
struct SteinIngredients {
    double norm_F_4 = 0.0;
    double norm_inv_DvF_4_raw = 0.0;
    double norm_inv_DvF_4_winsorized = 0.0;
    double norm_one_minus_DvF_2 = 0.0;
    double norm_DvDvF_2 = 0.0;
    double rhs_e85 = 0.0;            // assembled with the winsorized inverse moment
    double rhs_e85_raw = 0.0;        // assembled with the raw inverse moment
    double negative_fraction = 0.0;  // DvF below -1e-6 * scale
    bool inverse_valid = true;
    std::size_t n_dvdv = 0;
};

SteinIngredients stein_report(const std::vector<double>& f_samples,
                              const std::vector<double>& dvf_samples,
                              const std::vector<double>& dvdvf_samples);

/// Ensemble max of |D_{s,y}u(t,x)|_p / majorant over an anchor/evaluation
/// sweep; used for the first- and second-derivative moment-bound ratios.
struct MomentRatioReport {
    double max_ratio = 0.0;
    std::vector<double> ratios;  // one per (anchor, eval) combination
};

MomentRatioReport first_moment_ratio_probe(Case c, const GridSpec& grid,
                                           const CoefficientSpec& coeff,
                                           std::uint64_t master_seed, int n_replicas,
                                           const std::vector<Anchor>& anchors,
                                           const std::vector<int>& eval_nodes, double p_norm,
                                           int workers);

MomentRatioReport second_moment_ratio_probe(Case c, const GridSpec& grid,
                                            const CoefficientSpec& coeff,
                                            std::uint64_t master_seed, int n_replicas,
                                            const std::vector<Anchor>& pairs,
                                            const std::vector<int>& eval_nodes, double p_norm,
                                            int workers);

}  // namespace shelab
