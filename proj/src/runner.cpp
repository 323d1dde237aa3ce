#include "shelab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "shelab/appendix.hpp"
#include "shelab/kernel.hpp"
#include "shelab/util.hpp"

namespace shelab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kCodeVersion = "shelab 1.0.0";

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::string format_list(const std::vector<double>& v) {
    std::ostringstream ss;
    ss << std::setprecision(17);
    for (std::size_t i = 0; i < v.size(); ++i) ss << (i ? "," : "") << v[i];
    return ss.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string num(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    RunConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const auto hashpos = line.find('#');
        if (hashpos != std::string::npos) line = line.substr(0, hashpos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line without '=': " + line);
        cfg.set_key(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::set_key(const std::string& key, const std::string& value) {
    if (key == "case") case_name = value;
    else if (key == "t_end") t_end = std::stod(value);
    else if (key == "r_ladder") r_ladder = parse_list(value);
    else if (key == "dx") dx = std::stod(value);
    else if (key == "replicas") replicas = std::stoi(value);
    else if (key == "master_seed") master_seed = std::stoull(value);
    else if (key == "workers") workers = std::stoi(value);
    else if (key == "out_dir") out_dir = value;
    else if (key == "preset") preset = value;
    else if (key == "coeff_table") coeff_table = value;
    else if (key == "normalizer") normalizer = value;
    else if (key == "with_density") with_density = value == "1" || value == "true";
    else if (key == "with_variance") with_variance = value == "1" || value == "true";
    else if (key == "with_holder") with_holder = value == "1" || value == "true";
    else if (key == "dump_slices") dump_slices = value == "1" || value == "true";
    else if (key == "stein_replicas") stein_replicas = std::stoi(value);
    else if (key == "dvdv_replicas") dvdv_replicas = std::stoi(value);
    else if (key == "dvdv_levels") dvdv_levels = std::stoi(value);
    else if (key == "pam_heat_start") pam_heat_start = value == "1" || value == "true";
    else if (key == "pam_t0") pam_t0 = std::stod(value);
    else throw std::runtime_error("unknown config key: " + key);
}

Case RunConfig::case_tag() const {
    if (case_name == "flat") return Case::flat;
    if (case_name == "pam") return Case::pam;
    throw std::domain_error("case must be flat or pam");
}

CoefficientSpec RunConfig::coefficient() const {
    if (case_tag() == Case::pam) return CoefficientSpec::identity();
    CoefficientSpec c;
    if (preset == "custom") {
        std::ifstream in(coeff_table);
        if (!in) throw std::runtime_error("cannot open coefficient table " + coeff_table);
        std::vector<double> xs, ys;
        double a, b;
        while (in >> a >> b) {
            xs.push_back(a);
            ys.push_back(b);
        }
        c = CoefficientSpec::from_spline_table(xs, ys);
    } else {
        c = CoefficientSpec::preset(preset);
    }
    c.spot_check(master_seed ^ 0x5eedull, /*require_sigma1_nonzero=*/true);
    return c;
}

std::vector<double> RunConfig::ladder() const {
    if (!r_ladder.empty()) return r_ladder;
    return case_tag() == Case::flat ? std::vector<double>{4, 8, 16, 32}
                                    : std::vector<double>{8, 16, 32, 64};
}

int RunConfig::effective_workers() const {
    if (workers > 0) return workers;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

std::string RunConfig::out_root() const {
    if (const char* env = std::getenv("SHELAB_OUT_ROOT")) return env;
    return out_dir;
}

std::string RunConfig::canonical() const {
    std::ostringstream ss;
    ss << "case=" << case_name << '\n'
       << "coeff_table=" << coeff_table << '\n'
       << "dump_slices=" << dump_slices << '\n'
       << "dvdv_levels=" << dvdv_levels << '\n'
       << "dvdv_replicas=" << dvdv_replicas << '\n'
       << "dx=" << num(dx) << '\n'
       << "master_seed=" << master_seed << '\n'
       << "normalizer=" << normalizer << '\n'
       << "pam_heat_start=" << pam_heat_start << '\n'
       << "pam_t0=" << num(pam_t0) << '\n'
       << "preset=" << preset << '\n'
       << "r_ladder=" << format_list(ladder()) << '\n'
       << "replicas=" << replicas << '\n'
       << "stein_replicas=" << stein_replicas << '\n'
       << "t_end=" << num(t_end) << '\n'
       << "with_density=" << with_density << '\n'
       << "with_holder=" << with_holder << '\n'
       << "with_variance=" << with_variance << '\n';
    return ss.str();
}

std::string RunConfig::hash() const {
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << fnv1a(canonical());
    return ss.str();
}

GridSpec grid_for(const RunConfig& cfg, double R) {
    double dx_target = cfg.dx;
    if (cfg.case_tag() == Case::pam) {
        // The discrete Dirac spreads one cell per step; dx <= 2t/L keeps the
        // numerical light cone ahead of the parabolic influence cone of Q_R.
        const double l_raw = R + 6.0 * std::sqrt(cfg.t_end);
        dx_target = std::min(dx_target, 2.0 * cfg.t_end / l_raw);
    }
    const double dx_snap = R / std::ceil(R / dx_target);
    return GridSpec::make(R, cfg.t_end, dx_snap);
}

namespace {

struct Manifest {
    const RunConfig& cfg;
    std::string started = timestamp_now();
    std::vector<std::string> outputs;
    std::int64_t aborted = 0;
    std::int64_t total = 0;

    void write(const std::string& status) const {
        json j;
        j["config"] = {{"case", cfg.case_name},
                       {"t_end", cfg.t_end},
                       {"r_ladder", cfg.ladder()},
                       {"dx", cfg.dx},
                       {"replicas", cfg.replicas},
                       {"master_seed", cfg.master_seed},
                       {"workers", cfg.workers},
                       {"out_dir", cfg.out_dir},
                       {"preset", cfg.preset},
                       {"coeff_table", cfg.coeff_table},
                       {"normalizer", cfg.normalizer},
                       {"with_density", cfg.with_density},
                       {"with_variance", cfg.with_variance},
                       {"with_holder", cfg.with_holder},
                       {"dump_slices", cfg.dump_slices},
                       {"stein_replicas", cfg.stein_replicas},
                       {"dvdv_replicas", cfg.dvdv_replicas},
                       {"dvdv_levels", cfg.dvdv_levels},
                       {"pam_heat_start", cfg.pam_heat_start},
                       {"pam_t0", cfg.pam_t0}};
        j["config_hash"] = cfg.hash();
        j["code_version"] = kCodeVersion;
        j["started_at"] = started;
        j["finished_at"] = timestamp_now();
        j["aborted_replicas"] = aborted;
        j["total_replicas"] = total;
        j["outputs"] = outputs;
        j["status"] = status;
        if (const char* env = std::getenv("SHELAB_OUT_ROOT")) j["out_root_env"] = env;

        const fs::path dir = cfg.run_dir();
        fs::create_directories(dir);
        const fs::path tmp = dir / "manifest.json.tmp";
        {
            std::ofstream out(tmp);
            out << j.dump(2) << '\n';
        }
        fs::rename(tmp, dir / "manifest.json");
    }
};

std::ofstream open_csv(const RunConfig& cfg, Manifest& man, const std::string& name) {
    const fs::path dir = cfg.run_dir();
    fs::create_directories(dir);
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot open output " + (dir / name).string());
    out << "# config_hash=" << cfg.hash() << '\n';
    out << std::setprecision(17);
    man.outputs.push_back(name);
    return out;
}

std::string rung_label(double R) {
    std::ostringstream ss;
    ss << R;
    std::string s = ss.str();
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

void write_slices(const RunConfig& cfg, Manifest& man, const LadderResult& rung) {
    const std::string name = "slices_R" + rung_label(rung.R) + ".bin";
    const fs::path path = fs::path(cfg.run_dir()) / name;
    std::ofstream out(path, std::ios::binary);
    const char magic[4] = {'S', 'H', 'E', 'L'};
    const std::uint32_t version = 1;
    const std::uint32_t n_x = rung.grid.n_x, n_t = rung.grid.n_t;
    const std::uint32_t n_rep = static_cast<std::uint32_t>(rung.final_slices.size());
    const double L = rung.grid.L, t_end = rung.grid.t_end;
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&L), 8);
    out.write(reinterpret_cast<const char*>(&t_end), 8);
    out.write(reinterpret_cast<const char*>(&n_x), 4);
    out.write(reinterpret_cast<const char*>(&n_t), 4);
    out.write(reinterpret_cast<const char*>(&n_rep), 4);
    for (const auto& slice : rung.final_slices)
        out.write(reinterpret_cast<const char*>(slice.data()),
                  static_cast<std::streamsize>(slice.size() * sizeof(double)));
    man.outputs.push_back(name);
}

}  // namespace

LadderResult run_ladder_rung(const RunConfig& cfg, double R, const LadderOptions& opts) {
    LadderResult rung;
    rung.R = R;
    rung.grid = grid_for(cfg, R);
    const GridSpec& grid = rung.grid;
    const CoefficientSpec coeff = cfg.coefficient();
    const Case c = cfg.case_tag();
    const int n = opts.replicas_override.value_or(cfg.replicas);
    rung.n_replicas = n;

    std::optional<WeightTable> weights;
    if (opts.with_tangent) weights = WeightTable::build(grid, R, c);

    StreamOptions sopts;
    sopts.R = R;
    sopts.weights = weights ? &*weights : nullptr;
    sopts.keep_final_slice = cfg.dump_slices;
    if (c == Case::pam && cfg.pam_heat_start) sopts.pam_init = PamInit{true, cfg.pam_t0};
    if (opts.with_holder) {
        for (int div : {8, 16, 32, 64}) sopts.holder_steps.push_back(grid.n_t / div);
        rung.holder_offsets = sopts.holder_steps;
    }

    std::vector<ReplicaStats> records(n);
    parallel_for_index(n, cfg.effective_workers(), [&](std::int64_t i) {
        const StreamKey key{cfg.master_seed, static_cast<std::uint32_t>(i), Lane::solution};
        const NoiseTape tape(grid, key, NoiseTape::Mode::regenerable);
        records[i] = run_replica(c, grid, coeff, tape, sopts);
    });

    rung.holder_deltas.assign(sopts.holder_steps.size(), {});
    for (const auto& rec : records) {
        if (rec.aborted) {
            ++rung.aborted;
            continue;
        }
        rung.box_raw.push_back(rec.box_raw);
        if (opts.with_tangent) rung.tangent_raw.push_back(rec.tangent_raw);
        for (std::size_t k = 0; k < rec.holder_deltas.size(); ++k)
            rung.holder_deltas[k].push_back(rec.holder_deltas[k]);
        if (cfg.dump_slices) rung.final_slices.push_back(rec.final_slice);
    }

    // Normalization: the sample mode matches the exact-variance definitions
    // with ensemble estimates; the quadrature mode is reserved for the
    // sigma == 1 exact-Gaussian oracle.
    double mean = 0.0;
    for (double a : rung.box_raw) mean += a;
    mean /= std::max<std::size_t>(1, rung.box_raw.size());
    double ss = 0.0;
    for (double a : rung.box_raw) ss += (a - mean) * (a - mean);
    rung.sample_var = rung.box_raw.size() > 1 ? ss / (rung.box_raw.size() - 1) : 0.0;

    if (cfg.normalizer == "quadrature") {
        if (c != Case::flat || cfg.preset != "constant-1")
            throw std::domain_error(
                "quadrature normalizer is only defined for the flat constant-1 oracle");
        const std::vector<double> ones(2, 1.0);
        rung.center = 2.0 * R;
        rung.normalizer = std::sqrt(variance_quadrature_flat(R, cfg.t_end, ones));
    } else if (cfg.normalizer == "sample") {
        rung.center = mean;
        rung.normalizer = std::sqrt(rung.sample_var);
    } else {
        throw std::domain_error("normalizer must be sample or quadrature");
    }

    rung.f_samples.reserve(rung.box_raw.size());
    for (double a : rung.box_raw)
        rung.f_samples.push_back((a - rung.center) / rung.normalizer);
    for (double z : rung.tangent_raw)
        rung.dvf_samples.push_back(z / (rung.normalizer * rung.normalizer));

    if (opts.with_density) {
        const DensityEstimate d = kde_density(rung.f_samples);
        rung.sup_dist = sup_distance(d);
        rung.tv_dist = tv_distance(d);
        rung.ks = ks_statistic(rung.f_samples);
    }
    return rung;
}

SteinRung run_stein_rung(const RunConfig& cfg, double R) {
    LadderOptions lo;
    lo.with_tangent = true;
    lo.with_density = true;
    lo.replicas_override = cfg.stein_replicas;
    LadderResult rung = run_ladder_rung(cfg, R, lo);

    SteinRung out;
    out.R = R;
    out.n_replicas = rung.n_replicas;
    out.sup_dist = rung.sup_dist.value_or(0.0);
    out.f_samples = rung.f_samples;
    out.dvf_samples = rung.dvf_samples;

    // Double-projection subset on the same replica ids (stored paths and
    // in-memory tapes; heavier per replica, so a smaller ensemble).
    const GridSpec& grid = rung.grid;
    const CoefficientSpec coeff = cfg.coefficient();
    const Case c = cfg.case_tag();
    const int n_dvdv = std::min(cfg.dvdv_replicas, rung.n_replicas);
    std::vector<double> dvdv(n_dvdv);
    AnchorLattice lattice;
    lattice.n_time = cfg.dvdv_levels;
    parallel_for_index(n_dvdv, cfg.effective_workers(), [&](std::int64_t i) {
        const StreamKey key{cfg.master_seed, static_cast<std::uint32_t>(i), Lane::solution};
        const NoiseTape tape(grid, key, NoiseTape::Mode::in_memory);
        const FieldPath path = c == Case::flat
                                   ? solve_case1(grid, coeff, tape)
                                   : solve_case2_pam(grid, tape,
                                                     cfg.pam_heat_start
                                                         ? PamInit{true, cfg.pam_t0}
                                                         : PamInit{});
        dvdv[i] = dv_dv_projection(path, coeff, tape, R, rung.normalizer, lattice);
    });
    out.dvdv_samples = dvdv;
    out.n_dvdv = dvdv.size();
    out.ingredients = stein_report(out.f_samples, out.dvf_samples, out.dvdv_samples);
    return out;
}

namespace {

void write_results_csv(const RunConfig& cfg, Manifest& man,
                       const std::vector<LadderResult>& rungs) {
    auto out = open_csv(cfg, man, "results.csv");
    out << "config_id,case,t,R,n_replicas,sample_var,sup_dist,tv_dist\n";
    for (const auto& r : rungs) {
        out << cfg.hash() << ',' << cfg.case_name << ',' << cfg.t_end << ',' << r.R << ','
            << r.n_replicas - r.aborted << ',' << r.sample_var << ','
            << (r.sup_dist ? *r.sup_dist : std::nan("")) << ','
            << (r.tv_dist ? *r.tv_dist : std::nan("")) << '\n';
    }
}

void write_variance_csv(const RunConfig& cfg, Manifest& man,
                        const std::vector<LadderResult>& rungs) {
    std::vector<double> oracle;
    if (cfg.case_tag() == Case::pam)
        oracle = pam_ratio_second_moment(cfg.t_end, 512);
    else if (cfg.preset == "identity")
        oracle = flat_identity_second_moment(cfg.t_end, 2048);
    else if (cfg.preset == "constant-1")
        oracle.assign(2, 1.0);
    else
        return;  // no second-moment oracle for this coefficient

    auto out = open_csv(cfg, man, "variance.csv");
    out << "config_id,case,t,R,sample_var,sample_ratio,printed_target,verified_target,"
           "quadrature_ratio,ratio_to_verified,ratio_to_quadrature\n";
    for (const auto& r : rungs) {
        const VarianceCheck v =
            cfg.case_tag() == Case::pam
                ? variance_check_pam(r.sample_var, r.R, cfg.t_end, oracle)
                : variance_check_flat(r.sample_var, r.R, cfg.t_end, oracle);
        out << cfg.hash() << ',' << cfg.case_name << ',' << cfg.t_end << ',' << r.R << ','
            << r.sample_var << ',' << v.sample_ratio << ',' << v.printed_target << ','
            << v.verified_target << ',' << v.quadrature_ratio << ',' << v.ratio_to_verified
            << ',' << v.ratio_to_quadrature << '\n';
    }
}

void write_density_csvs(const RunConfig& cfg, Manifest& man,
                        const std::vector<LadderResult>& rungs) {
    for (const auto& r : rungs) {
        const DensityEstimate d = kde_density(r.f_samples);
        auto out = open_csv(cfg, man, "density_R" + rung_label(r.R) + ".csv");
        out << "x,density\n";
        for (std::size_t i = 0; i < d.grid.size(); ++i)
            out << d.grid[i] << ',' << d.values[i] << '\n';
    }
}

void append_rate(std::ofstream& out, const RunConfig& cfg, const std::string& metric,
                 const RateFit& fit) {
    out << cfg.hash() << ',' << cfg.case_name << ',' << cfg.t_end << ',' << metric << ','
        << fit.slope << ',' << fit.slope_stderr << ',' << fit.intercept << ','
        << fit.r_values.size() << '\n';
}

int finalize(const RunConfig& cfg, Manifest& man) {
    const bool failed =
        man.total > 0 && man.aborted > 0 &&
        static_cast<double>(man.aborted) / static_cast<double>(man.total) > 1e-3;
    man.write(failed ? "failed" : "ok");
    return failed ? 1 : 0;
}

}  // namespace

int cmd_simulate(const RunConfig& cfg) {
    Manifest man{cfg};
    std::vector<LadderResult> rungs;
    for (double R : cfg.ladder()) {
        LadderOptions lo;
        lo.with_density = cfg.with_density;
        rungs.push_back(run_ladder_rung(cfg, R, lo));
        man.aborted += rungs.back().aborted;
        man.total += rungs.back().n_replicas;
        if (cfg.dump_slices) write_slices(cfg, man, rungs.back());
    }
    write_results_csv(cfg, man, rungs);
    if (cfg.with_variance) write_variance_csv(cfg, man, rungs);
    return finalize(cfg, man);
}

int cmd_density(const RunConfig& cfg) {
    Manifest man{cfg};
    std::vector<LadderResult> rungs;
    for (double R : cfg.ladder()) {
        LadderOptions lo;
        lo.with_density = true;
        lo.with_holder = cfg.with_holder;
        rungs.push_back(run_ladder_rung(cfg, R, lo));
        man.aborted += rungs.back().aborted;
        man.total += rungs.back().n_replicas;
    }
    write_results_csv(cfg, man, rungs);
    if (cfg.with_variance) write_variance_csv(cfg, man, rungs);
    write_density_csvs(cfg, man, rungs);

    auto rates = open_csv(cfg, man, "rates.csv");
    rates << "config_id,case,t,metric,slope,slope_stderr,intercept,n_points\n";
    std::vector<std::pair<double, double>> sup_ladder, tv_ladder;
    for (const auto& r : rungs) {
        sup_ladder.emplace_back(r.R, r.sup_dist.value_or(0.0));
        tv_ladder.emplace_back(r.R, r.tv_dist.value_or(0.0));
    }
    if (sup_ladder.size() >= 3) {
        append_rate(rates, cfg, "sup_dist", rate_fit(sup_ladder));
        append_rate(rates, cfg, "tv_dist", rate_fit(tv_ladder));
    }
    if (cfg.with_holder && !rungs.empty()) {
        // temporal-increment exponent from the largest rung
        const auto& r = rungs.back();
        auto holder = open_csv(cfg, man, "holder.csv");
        holder << "delta_t,l2_increment\n";
        std::vector<std::pair<double, double>> lad;
        for (std::size_t k = 0; k < r.holder_offsets.size(); ++k) {
            double acc = 0.0;
            for (double d : r.holder_deltas[k]) acc += d * d;
            const double l2 = std::sqrt(acc / std::max<std::size_t>(1, r.holder_deltas[k].size()));
            const double dt = r.holder_offsets[k] * r.grid.dt();
            holder << dt << ',' << l2 << '\n';
            lad.emplace_back(dt, l2);
        }
        if (lad.size() >= 3) append_rate(rates, cfg, "holder_increment", rate_fit(lad));
    }
    return finalize(cfg, man);
}

int cmd_stein(const RunConfig& cfg) {
    Manifest man{cfg};
    std::vector<SteinRung> rungs;
    for (double R : cfg.ladder()) {
        rungs.push_back(run_stein_rung(cfg, R));
        man.total += rungs.back().n_replicas;
    }
    auto out = open_csv(cfg, man, "stein.csv");
    out << "config_id,case,t,R,n_replicas,n_dvdv,norm_F_4,norm_inv_DvF_4_raw,"
           "norm_inv_DvF_4_winsorized,norm_one_minus_DvF_2,norm_DvDvF_2,rhs_e85,"
           "rhs_e85_raw,sup_dist,negative_fraction,inverse_valid\n";
    for (const auto& r : rungs) {
        const auto& s = r.ingredients;
        out << cfg.hash() << ',' << cfg.case_name << ',' << cfg.t_end << ',' << r.R << ','
            << r.n_replicas << ',' << r.n_dvdv << ',' << s.norm_F_4 << ','
            << s.norm_inv_DvF_4_raw << ',' << s.norm_inv_DvF_4_winsorized << ','
            << s.norm_one_minus_DvF_2 << ',' << s.norm_DvDvF_2 << ',' << s.rhs_e85 << ','
            << s.rhs_e85_raw << ',' << r.sup_dist << ',' << s.negative_fraction << ','
            << (s.inverse_valid ? 1 : 0) << '\n';
    }
    if (rungs.size() >= 3) {
        auto rates = open_csv(cfg, man, "rates.csv");
        rates << "config_id,case,t,metric,slope,slope_stderr,intercept,n_points\n";
        std::vector<std::pair<double, double>> lad;
        for (const auto& r : rungs) lad.emplace_back(r.R, r.ingredients.norm_one_minus_DvF_2);
        append_rate(rates, cfg, "one_minus_dvf_2", rate_fit(lad));
    }
    return finalize(cfg, man);
}

int cmd_rates(const RunConfig& cfg) {
    const fs::path path = fs::path(cfg.run_dir()) / "results.csv";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cmd_rates: missing " + path.string());
    std::string line;
    std::vector<std::pair<double, double>> sup_ladder, tv_ladder;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("config_id", 0) == 0) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 8) continue;
        const double R = std::stod(fields[3]);
        const double sup = std::stod(fields[6]);
        const double tv = std::stod(fields[7]);
        if (std::isfinite(sup)) sup_ladder.emplace_back(R, sup);
        if (std::isfinite(tv)) tv_ladder.emplace_back(R, tv);
    }
    Manifest man{cfg};
    auto rates = open_csv(cfg, man, "rates.csv");
    rates << "config_id,case,t,metric,slope,slope_stderr,intercept,n_points\n";
    if (sup_ladder.size() >= 3) append_rate(rates, cfg, "sup_dist", rate_fit(sup_ladder));
    if (tv_ladder.size() >= 3) append_rate(rates, cfg, "tv_dist", rate_fit(tv_ladder));
    man.write("ok");
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    Manifest man{cfg};
    std::vector<LemmaReport> reports;
    const bool pass = run_all_checks(cfg.run_dir(), cfg.hash(), &reports);
    for (const auto& r : reports) man.outputs.push_back("lemma_" + r.name + ".csv");
    man.write(pass ? "ok" : "failed");
    return pass ? 0 : 2;
}

}  // namespace shelab
