#pragma once

// Configuration, orchestration, persistence and the reproducibility envelope:
// flat key-value config files with CLI overrides, a hashed per-configuration
// output directory, an atomically written JSON manifest, and the replica
// orchestrator whose reductions are ordered and deterministic for any worker
// count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shelab/malliavin.hpp"
#include "shelab/spde.hpp"
#include "shelab/stats.hpp"

namespace shelab {

struct RunConfig {
    std::string case_name = "flat";  // flat | pam
    double t_end = 0.5;
    std::vector<double> r_ladder;  // empty = per-case default
    double dx = 0.05;
    int replicas = 10000;
    std::uint64_t master_seed = 20250810;
    int workers = 0;  // 0 = hardware concurrency
    std::string out_dir = "runs";
    std::string preset = "two-plus-sine";  // coefficient preset (flat case)
    std::string coeff_table;               // spline table path for preset=custom
    std::string normalizer = "sample";     // sample | quadrature
    bool with_density = true;
    bool with_variance = true;
    bool with_holder = false;
    bool dump_slices = false;
    int stein_replicas = 2000;
    int dvdv_replicas = 64;
    int dvdv_levels = 6;
    bool pam_heat_start = false;
    double pam_t0 = 0.05;

    static RunConfig from_file(const std::string& path);
    void set_key(const std::string& key, const std::string& value);

    Case case_tag() const;
    CoefficientSpec coefficient() const;
    std::vector<double> ladder() const;
    int effective_workers() const;
    /// Output root after honoring the SHELAB_OUT_ROOT environment override.
    std::string out_root() const;
    std::string run_dir() const { return out_root() + "/" + hash(); }

    /// Canonical serialization of every result-affecting field (workers and
    /// output paths excluded) and its FNV-1a hash.
    std::string canonical() const;
    std::string hash() const;
};

/// Per-R grid: pam grids additionally cap dx at 2t/L so the scheme's
/// numerical light cone covers the whole box, and snap R onto a node.
GridSpec grid_for(const RunConfig& cfg, double R);

/// One rung of an R ladder after the ordered reduction.
struct LadderResult {
    double R = 0.0;
    GridSpec grid;
    int n_replicas = 0;
    int aborted = 0;
    std::vector<double> box_raw;      // per replica, aborted excluded
    std::vector<double> tangent_raw;  // when the tangent was co-simulated
    std::vector<std::vector<double>> holder_deltas;  // [offset][replica]
    std::vector<int> holder_offsets;                 // in steps
    std::vector<std::vector<double>> final_slices;   // when dump_slices

    double center = 0.0;      // centering used for F
    double normalizer = 0.0;  // sigma_{R,t} (or Sigma_{R,t}) used for F
    double sample_var = 0.0;  // unbiased variance of the box integrals
    std::vector<double> f_samples;
    std::vector<double> dvf_samples;

    std::optional<double> sup_dist, tv_dist, ks;
};

struct LadderOptions {
    bool with_tangent = false;
    bool with_density = false;
    bool with_holder = false;
    std::optional<int> replicas_override;
};

LadderResult run_ladder_rung(const RunConfig& cfg, double R, const LadderOptions& opts);

/// Stein ingredient computation for one rung: tangent ensemble plus the
/// double-projection subset, self-normalized with the ensemble sigma.
struct SteinRung {
    double R = 0.0;
    SteinIngredients ingredients;
    double sup_dist = 0.0;
    int n_replicas = 0;
    std::size_t n_dvdv = 0;
    std::vector<double> f_samples;
    std::vector<double> dvf_samples;
    std::vector<double> dvdv_samples;
};

SteinRung run_stein_rung(const RunConfig& cfg, double R);

// ---- commands (return process exit codes) --------------------------------

int cmd_simulate(const RunConfig& cfg);
int cmd_density(const RunConfig& cfg);
int cmd_stein(const RunConfig& cfg);
int cmd_rates(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

}  // namespace shelab
