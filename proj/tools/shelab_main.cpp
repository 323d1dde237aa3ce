// Command-line front end: simulate | density | stein | rates | verify.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "shelab/runner.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::string seed, workers, out, case_name, preset, r_ladder, t, replicas;
    std::string dx, normalizer, stein_replicas, dvdv_replicas, dvdv_levels;
    bool with_holder = false;
    bool dump_slices = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value configuration file");
        cmd->add_option("--seed", seed, "master seed (uint64)");
        cmd->add_option("--workers", workers, "worker thread count (0 = hardware)");
        cmd->add_option("--out", out, "output root directory");
        cmd->add_option("--case", case_name, "flat | pam");
        cmd->add_option("--preset", preset,
                        "coefficient preset: constant-1 | identity | two-plus-sine | custom");
        cmd->add_option("--r-ladder", r_ladder, "comma-separated R values");
        cmd->add_option("--t", t, "time horizon t_end");
        cmd->add_option("--replicas", replicas, "replica count per R");
        cmd->add_option("--dx", dx, "target spatial step");
        cmd->add_option("--normalizer", normalizer, "sample | quadrature");
        cmd->add_option("--stein-replicas", stein_replicas, "tangent ensemble size for stein");
        cmd->add_option("--dvdv-replicas", dvdv_replicas, "double-projection ensemble size");
        cmd->add_option("--dvdv-levels", dvdv_levels, "time levels of the r-quadrature");
        cmd->add_flag("--with-holder", with_holder, "record the temporal-increment ladder");
        cmd->add_flag("--dump-slices", dump_slices, "binary dump of final-time slices");
    }

    shelab::RunConfig build() const {
        shelab::RunConfig cfg;
        if (!config_path.empty()) cfg = shelab::RunConfig::from_file(config_path);
        auto set = [&cfg](const char* key, const std::string& v) {
            if (!v.empty()) cfg.set_key(key, v);
        };
        set("master_seed", seed);
        set("workers", workers);
        set("out_dir", out);
        set("case", case_name);
        set("preset", preset);
        set("r_ladder", r_ladder);
        set("t_end", t);
        set("replicas", replicas);
        set("dx", dx);
        set("normalizer", normalizer);
        set("stein_replicas", stein_replicas);
        set("dvdv_replicas", dvdv_replicas);
        set("dvdv_levels", dvdv_levels);
        if (with_holder) cfg.with_holder = true;
        if (dump_slices) cfg.dump_slices = true;
        return cfg;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic heat equation density-convergence laboratory"};
    app.require_subcommand(1);

    CliOverrides ov;
    auto* simulate = app.add_subcommand("simulate", "run the replica ensembles per R");
    auto* density = app.add_subcommand("density", "ensembles + KDE distances + rate fits");
    auto* stein = app.add_subcommand("stein", "Stein-bound ingredient ensembles per R");
    auto* rates = app.add_subcommand("rates", "re-fit rates from existing results.csv");
    auto* verify = app.add_subcommand("verify", "appendix lemma certification reports");
    for (auto* cmd : {simulate, density, stein, rates, verify}) ov.add_to(cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        const shelab::RunConfig cfg = ov.build();
        int rc = 0;
        if (simulate->parsed()) rc = shelab::cmd_simulate(cfg);
        if (density->parsed()) rc = shelab::cmd_density(cfg);
        if (stein->parsed()) rc = shelab::cmd_stein(cfg);
        if (rates->parsed()) rc = shelab::cmd_rates(cfg);
        if (verify->parsed()) rc = shelab::cmd_verify(cfg);
        if (rc == 0)
            std::cout << "done: outputs under " << cfg.run_dir() << "\n";
        else
            std::cerr << "run finished with failures (exit " << rc << ")\n";
        return rc;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
