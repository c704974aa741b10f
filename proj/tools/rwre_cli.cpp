#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rwre/env.hpp"
#include "rwre/errors.hpp"
#include "rwre/experiments.hpp"
#include "rwre/io.hpp"
#include "rwre/ladder.hpp"
#include "rwre/limit_laws.hpp"
#include "rwre/parallel.hpp"
#include "rwre/point_process.hpp"
#include "rwre/quenched.hpp"
#include "rwre/stats.hpp"
#include "rwre/walk.hpp"

namespace {

using namespace rwre;

struct CommonOpts {
    std::uint64_t seed = 20260814;
    int threads = 1;
    std::string out;
};

void add_common_options(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "base seed for every random draw");
    cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "output directory for samples and records");
}

struct FamilyOpts {
    std::string family = "reference";
    double kappa_target = 0.75;
    std::vector<double> omega;
    std::vector<double> weight;
    double p_a = 0.5;
    double lo = 0.55, hi = 0.95;
};

void add_family_options(CLI::App* cmd, FamilyOpts& f) {
    cmd->add_option("--family", f.family, "site law: reference, two-point, finite, uniform")
        ->check(CLI::IsMember({"reference", "two-point", "finite", "uniform"}));
    cmd->add_option("--kappa-target", f.kappa_target,
                    "tail exponent of the reference family (default 0.75)");
    cmd->add_option("--omega", f.omega, "support values for two-point/finite families");
    cmd->add_option("--weight", f.weight, "probabilities for the finite family");
    cmd->add_option("--p-a", f.p_a, "probability of the first omega for two-point");
    cmd->add_option("--lo", f.lo, "lower endpoint for the uniform family");
    cmd->add_option("--hi", f.hi, "upper endpoint for the uniform family");
}

EnvDistribution build_family(const FamilyOpts& f) {
    if (f.family == "reference") return reference_family(f.kappa_target);
    if (f.family == "two-point") {
        if (f.omega.size() != 2) throw parameter_error("two-point needs exactly two --omega values");
        return EnvDistribution::two_point(f.omega[0], f.omega[1], f.p_a);
    }
    if (f.family == "finite") return EnvDistribution::finite_support(f.omega, f.weight);
    return EnvDistribution::uniform_interval(f.lo, f.hi);
}

long window_left(const EnvDistribution& dist, long requested_depth) {
    if (requested_depth > 0) return -requested_depth;
    return -std::max<long>(suggested_left_depth(dist, 1e-12), 64);
}

void dump_column(const CommonOpts& c, const std::string& name, const std::vector<double>& values) {
    if (c.out.empty()) return;
    ensure_directory(c.out);
    CsvColumn col;
    col.metadata["series"] = name;
    col.metadata["seed"] = std::to_string(c.seed);
    col.values = values;
    const std::string path = c.out + "/" + name + ".csv";
    write_csv_column(path, col);
    std::printf("wrote %s (%zu values)\n", path.c_str(), values.size());
}

void print_summary(const char* label, const std::vector<double>& v) {
    EmpiricalDistribution emp(v);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    std::printf("%s: n=%zu mean=%.6g q10=%.6g q50=%.6g q90=%.6g max=%.6g\n", label, v.size(), mean,
                emp.quantile(0.10), emp.quantile(0.50), emp.quantile(0.90), emp.quantile(1.0));
}

int cmd_env(const CommonOpts& c, const FamilyOpts& f, long left_depth, long right, bool q_cond) {
    const EnvDistribution dist = build_family(f);
    const long left = window_left(dist, left_depth);
    const Environment env = q_cond ? sample_env_Q(dist, left, right, c.seed)
                                   : sample_env_P(dist, left, right, c.seed);
    std::printf("environment on [%ld, %ld], %s measure, seed=%llu\n", env.left(), env.right(),
                q_cond ? "ladder-conditioned" : "product", (unsigned long long)c.seed);
    std::printf("E[log rho]=%.6g  E[rho]=%.6g\n", dist.e_log_rho(), dist.e_rho());
    try {
        const KappaSolution k = solve_kappa(dist);
        std::printf("kappa=%.12g (residual %.2g, %s)\n", k.kappa, k.residual,
                    k.lattice ? "lattice" : "non-lattice");
    } catch (const std::exception& e) {
        std::printf("kappa: %s\n", e.what());
    }
    if (dist.e_rho() < 1.0) std::printf("speed=%.12g\n", dist.speed());
    if (!c.out.empty()) {
        ensure_directory(c.out);
        const std::string path = c.out + "/environment.csv";
        env.dump_csv(path);
        std::printf("wrote %s\n", path.c_str());
    }
    return 0;
}

int cmd_kappa(const CommonOpts& c, const FamilyOpts& f) {
    const EnvDistribution dist = build_family(f);
    const KappaSolution k = solve_kappa(dist);
    std::printf("kappa=%.15g\n", k.kappa);
    std::printf("residual=%.3g  E[rho^k log rho]=%.6g  %s\n", k.residual, k.e_rho_k_log_rho,
                k.lattice ? "lattice" : "non-lattice");
    if (dist.e_rho() < 1.0) std::printf("speed=%.15g\n", dist.speed());
    std::printf("suggested left depth=%ld\n", suggested_left_depth(dist, 1e-12));
    if (!c.out.empty()) {
        ensure_directory(c.out);
        write_text_file(c.out + "/family.json", dist.to_json());
        std::printf("wrote %s/family.json\n", c.out.c_str());
    }
    return 0;
}

int cmd_simulate(const CommonOpts& c, const FamilyOpts& f, long target, long long steps,
                 std::size_t n_paths, long left_depth) {
    const EnvDistribution dist = build_family(f);
    const long left = window_left(dist, left_depth);
    const long right = target > 0 ? target : static_cast<long>(steps);
    std::vector<double> out(n_paths);
    parallel_for(n_paths, c.threads, [&](std::size_t i) {
        const std::uint64_t key = derive(c.seed, i);
        const Environment env = sample_env_P(dist, left, right, key);
        Rng rng(derive(key, stream::paths));
        if (target > 0)
            out[i] = static_cast<double>(run_to_hit(env, target, rng).hit_time);
        else
            out[i] = static_cast<double>(run_fixed_steps(env, steps, rng).final_pos);
    });
    print_summary(target > 0 ? "hitting time" : "final position", out);
    dump_column(c, target > 0 ? "hitting_time" : "final_position", out);
    return 0;
}

int cmd_ladder(const CommonOpts& c, const FamilyOpts& f, std::size_t n_blocks,
               std::size_t n_envs) {
    const EnvDistribution dist = build_family(f);
    std::vector<double> betas;
    if (n_envs <= 1) {
        const BlockSequence bs = sample_block_sequence(dist, n_blocks, c.seed);
        betas = bs.beta;
        std::printf("one environment, %zu blocks, last ladder point nu=%ld\n", n_blocks,
                    bs.nu.back());
    } else {
        betas.resize(n_envs);
        parallel_for(n_envs, c.threads, [&](std::size_t i) {
            betas[i] = sample_block_sequence(dist, 1, derive(c.seed, i)).beta[0];
        });
        std::printf("first-block crossing means over %zu environments\n", n_envs);
    }
    print_summary("beta", betas);
    if (betas.size() >= 500) {
        const TailEstimate est = estimate_tail(betas);
        std::printf("tail: kappa_hat=%.4g c_tilde=%.4g lambda_hat=%.4g (k=%ld)\n", est.kappa_hat,
                    est.c_tilde_hat, est.lambda_hat, est.k_used);
    }
    dump_column(c, "beta", betas);
    return 0;
}

int cmd_pp(const CommonOpts& c, const FamilyOpts& f, std::size_t n_blocks, double lambda,
           double kappa, double eps_min, bool poisson) {
    FinitePointProcess pp;
    if (poisson) {
        Rng rng(c.seed);
        pp = sample_poisson_Nlk(lambda, kappa, eps_min, rng);
        std::printf("Poisson configuration: lambda=%g kappa=%g eps_min=%g\n", lambda, kappa,
                    eps_min);
    } else {
        const EnvDistribution dist = build_family(f);
        const double k = solve_kappa(dist).kappa;
        const BlockSequence bs = sample_block_sequence(dist, n_blocks, c.seed);
        pp = extract_Nn(bs.beta, n_blocks, k);
        std::printf("rescaled block configuration: %zu blocks, kappa=%.6g\n", n_blocks, k);
    }
    std::printf("atoms=%zu floor=%g count_above(1)=%zu sum=%.6g sum_squares=%.6g\n",
                pp.atoms.size(), pp.eps_floor, count_above(pp, 1.0), sum_atoms(pp),
                sum_squares(pp));
    dump_column(c, "atoms", pp.atoms);
    return 0;
}

int cmd_limit(const CommonOpts& c, double kappa, double b, std::vector<double> at,
              std::size_t n_samples) {
    for (double x : at)
        std::printf("F(%g) = %.12g\n", x, stable_cdf(x, kappa, b));
    if (n_samples > 0) {
        Rng rng(c.seed);
        std::vector<double> s(n_samples);
        for (auto& x : s) x = stable_sample(kappa, b, rng);
        print_summary("stable sample", s);
        dump_column(c, "stable_sample", s);
    }
    return 0;
}

int print_record(const RunRecord& rec) {
    for (const TestReport& r : rec.reports) {
        std::printf("  [%s] %-36s statistic=%-12.6g", r.pass ? "PASS" : "FAIL", r.test.c_str(),
                    r.statistic);
        if (r.p_value >= 0.0) std::printf(" p=%-10.4g", r.p_value);
        std::printf(" n=%zu\n", r.n);
        if (!r.details.empty()) std::printf("         %s\n", r.details.c_str());
    }
    std::size_t ok = 0;
    for (const TestReport& r : rec.reports) ok += r.pass ? 1 : 0;
    std::printf("experiment %s: %s (%zu/%zu tests, %.1f s, hash %s)\n", rec.config.id.c_str(),
                rec.all_pass ? "PASS" : "FAIL", ok, rec.reports.size(), rec.wall_seconds,
                rec.config_hash.c_str());
    return rec.all_pass ? 0 : 1;
}

int cmd_verify(const CommonOpts& c, const std::string& id, bool smoke,
               const std::string& config_path, std::size_t n_envs, std::size_t n_paths,
               std::size_t n_blocks, double eps) {
    ExperimentConfig base;
    if (!config_path.empty()) base = ExperimentConfig::from_json(read_text_file(config_path));
    base.seed = c.seed;
    base.threads = c.threads;
    if (!c.out.empty()) base.out_dir = c.out;
    if (smoke) base.smoke = true;
    if (n_envs > 0) base.n_envs = n_envs;
    if (n_paths > 0) base.n_paths = n_paths;
    if (n_blocks > 0) base.n_blocks = n_blocks;
    if (eps > 0.0) base.eps = eps;

    std::vector<std::string> ids;
    if (id == "all")
        ids = experiment_ids();
    else
        ids.push_back(id);

    int rc = 0;
    for (const std::string& one : ids) {
        ExperimentConfig cfg = base;
        cfg.id = one;
        rc |= print_record(run_experiment(cfg));
    }
    return rc;
}

int cmd_report(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 12 && name.substr(name.size() - 12) == ".record.json")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::printf("no .record.json files under %s\n", dir.c_str());
        return 1;
    }
    int rc = 0;
    std::size_t total = 0, passed = 0;
    for (const std::string& path : files) {
        const RunRecord rec = RunRecord::from_json(read_text_file(path));
        std::size_t ok = 0;
        for (const TestReport& r : rec.reports) ok += r.pass ? 1 : 0;
        total += rec.reports.size();
        passed += ok;
        std::printf("%-24s %s  %zu/%zu tests  seed=%llu  hash=%s\n", rec.config.id.c_str(),
                    rec.all_pass ? "PASS" : "FAIL", ok, rec.reports.size(),
                    (unsigned long long)rec.config.seed, rec.config_hash.c_str());
        if (!rec.all_pass) {
            rc = 1;
            for (const TestReport& r : rec.reports)
                if (!r.pass)
                    std::printf("    failing: %s (statistic=%.6g p=%.4g)\n", r.test.c_str(),
                                r.statistic, r.p_value);
        }
    }
    std::printf("total: %zu/%zu tests passing across %zu records\n", passed, total, files.size());
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and verification laboratory for one-dimensional random walks in "
                 "random environment"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kCodeVersion));

    CommonOpts c_env, c_kappa, c_sim, c_ladder, c_pp, c_limit, c_verify, c_report;
    FamilyOpts f_env, f_kappa, f_sim, f_ladder, f_pp;

    auto* env_cmd = app.add_subcommand("env", "sample one environment and report its law");
    long env_left_depth = 0, env_right = 100;
    bool env_q = false;
    add_common_options(env_cmd, c_env);
    add_family_options(env_cmd, f_env);
    env_cmd->add_option("--left-depth", env_left_depth, "window depth left of the origin");
    env_cmd->add_option("--right", env_right, "right window edge");
    env_cmd->add_flag("--ladder-conditioned", env_q,
                      "condition sites left of 0 on never favoring a return");

    auto* kappa_cmd = app.add_subcommand("kappa", "solve the tail-exponent moment equation");
    add_common_options(kappa_cmd, c_kappa);
    add_family_options(kappa_cmd, f_kappa);

    auto* sim_cmd = app.add_subcommand("simulate", "run walks to a target or for a fixed time");
    long sim_target = 0, sim_left_depth = 0;
    long long sim_steps = 10000;
    std::size_t sim_paths = 1000;
    add_common_options(sim_cmd, c_sim);
    add_family_options(sim_cmd, f_sim);
    sim_cmd->add_option("--target", sim_target, "hit this site (0 means fixed-length runs)");
    sim_cmd->add_option("--steps", sim_steps, "steps per fixed-length run");
    sim_cmd->add_option("--n-paths", sim_paths, "independent (environment, walk) draws");
    sim_cmd->add_option("--left-depth", sim_left_depth, "window depth left of the origin");

    auto* ladder_cmd = app.add_subcommand("ladder", "block structure and crossing-time tails");
    std::size_t ladder_blocks = 1000, ladder_envs = 1;
    add_common_options(ladder_cmd, c_ladder);
    add_family_options(ladder_cmd, f_ladder);
    ladder_cmd->add_option("--n-blocks", ladder_blocks, "blocks per environment");
    ladder_cmd->add_option("--n-envs", ladder_envs,
                           "environments (>1 samples one first block from each)");

    auto* pp_cmd = app.add_subcommand("pp", "point configurations of rescaled block times");
    std::size_t pp_blocks = 10000;
    double pp_lambda = 1.0, pp_kappa = 0.75, pp_eps = 0.01;
    bool pp_poisson = false;
    add_common_options(pp_cmd, c_pp);
    add_family_options(pp_cmd, f_pp);
    pp_cmd->add_option("--n-blocks", pp_blocks, "blocks per environment");
    pp_cmd->add_flag("--poisson", pp_poisson, "sample the limiting Poisson configuration instead");
    pp_cmd->add_option("--lambda", pp_lambda, "intensity scale for --poisson");
    pp_cmd->add_option("--kappa", pp_kappa, "tail exponent for --poisson");
    pp_cmd->add_option("--eps-min", pp_eps, "smallest retained atom for --poisson");

    auto* limit_cmd = app.add_subcommand("limit", "one-sided stable distribution utilities");
    double limit_kappa = 0.75, limit_b = 1.0;
    std::vector<double> limit_at;
    std::size_t limit_samples = 0;
    add_common_options(limit_cmd, c_limit);
    limit_cmd->add_option("--kappa", limit_kappa, "stability index in (0,2)");
    limit_cmd->add_option("--b", limit_b, "tail scale: x^kappa P(X > x) -> b^kappa");
    limit_cmd->add_option("--cdf-at", limit_at, "evaluate the distribution function here");
    limit_cmd->add_option("--sample", limit_samples, "draw this many variates");

    auto* verify_cmd = app.add_subcommand("verify", "run a named experiment and report pass/fail");
    std::string verify_id;
    bool verify_smoke = false;
    std::string verify_config;
    std::size_t v_envs = 0, v_paths = 0, v_blocks = 0;
    double v_eps = 0.0;
    verify_cmd->add_option("experiment", verify_id, "experiment id or 'all'")->required();
    add_common_options(verify_cmd, c_verify);
    verify_cmd->add_flag("--smoke", verify_smoke, "reduced-scale run for quick checks");
    verify_cmd->add_option("--config", verify_config, "JSON experiment config to start from");
    verify_cmd->add_option("--n-envs", v_envs, "override environment count");
    verify_cmd->add_option("--n-paths", v_paths, "override path/draw count");
    verify_cmd->add_option("--n-blocks", v_blocks, "override blocks per environment");
    verify_cmd->add_option("--eps", v_eps, "override truncation level");

    auto* report_cmd = app.add_subcommand("report", "summarize saved run records");
    std::string report_dir = ".";
    report_cmd->add_option("dir", report_dir, "directory holding .record.json files");
    add_common_options(report_cmd, c_report);

    CLI11_PARSE(app, argc, argv);

    try {
        if (env_cmd->parsed()) return cmd_env(c_env, f_env, env_left_depth, env_right, env_q);
        if (kappa_cmd->parsed()) return cmd_kappa(c_kappa, f_kappa);
        if (sim_cmd->parsed())
            return cmd_simulate(c_sim, f_sim, sim_target, sim_steps, sim_paths, sim_left_depth);
        if (ladder_cmd->parsed()) return cmd_ladder(c_ladder, f_ladder, ladder_blocks, ladder_envs);
        if (pp_cmd->parsed())
            return cmd_pp(c_pp, f_pp, pp_blocks, pp_lambda, pp_kappa, pp_eps, pp_poisson);
        if (limit_cmd->parsed())
            return cmd_limit(c_limit, limit_kappa, limit_b, limit_at, limit_samples);
        if (verify_cmd->parsed())
            return cmd_verify(c_verify, verify_id, verify_smoke, verify_config, v_envs, v_paths,
                              v_blocks, v_eps);
        if (report_cmd->parsed()) return cmd_report(report_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
