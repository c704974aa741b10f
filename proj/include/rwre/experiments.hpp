#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rwre/stats.hpp"
#include "rwre/walk.hpp"

namespace rwre {

inline constexpr const char* kCodeVersion = "rwre 0.1.0";

// Declarative description of one verification experiment. Seeds are always
// explicit (the default is a constant, never the clock); counts left at 0 use
// the experiment's own scale.
struct ExperimentConfig {
    std::string id;
    double kappa_target = 0.75;  // reference-family parameter, where one applies
    std::uint64_t seed = 20260814;
    int threads = 1;
    std::string out_dir;  // empty: keep samples in memory only, write nothing
    bool smoke = false;   // tiny scales, for wiring and determinism checks
    std::size_t n_envs = 0;
    std::size_t n_paths = 0;
    std::size_t n_blocks = 0;
    double eps = 0.0;

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
};

// One statistical check inside an experiment. p_value is -1 when the check is
// a plain threshold rather than a significance test.
struct TestReport {
    std::string test;
    double statistic = 0.0;
    double p_value = -1.0;
    bool pass = false;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string details;
};

struct RunRecord {
    ExperimentConfig config;
    std::string config_hash;
    std::string code_version;
    std::vector<TestReport> reports;
    std::vector<std::string> artifacts;  // CSV paths, relative to out_dir
    bool all_pass = false;
    // Informational only, deliberately absent from the JSON so records stay
    // byte-reproducible.
    double wall_seconds = 0.0;

    // The thread-invariant part: reports alone, for byte comparisons.
    std::string reports_json() const;
    std::string to_json() const;
    static RunRecord from_json(const std::string& text);
};

const std::vector<std::string>& experiment_ids();

// Runs one experiment end to end. Every random draw derives from config.seed
// through fixed substream ids, and parallel sections write indexed slots with
// serial reductions, so the reports are identical for any thread count.
RunRecord run_experiment(const ExperimentConfig& config);

std::string config_hash(const ExperimentConfig& config);

// Walk-functional normalizations at time n for the three fluctuation regimes.
enum class WalkLimitCase { sub_ballistic, critical, ballistic };

struct TimeSpaceParams {
    double kappa = 0.0;
    double vp = 0.0;       // limiting speed, ballistic centering
    double delta_n = 0.0;  // centering sequence value, critical case only
};

// Converts fixed-length path summaries into the case-appropriate normalized
// positions: X_n / n^kappa, (X_n - delta_n) / (n / log^2 n), or
// (X_n - n vp) / n^{1/kappa}. Paths that carry level passage times and
// running-maximum checkpoints are re-checked for the duality
// {max-to-date >= x} = {first passage of x <= t}; a violation throws.
EmpiricalDistribution time_space_convert(const std::vector<PathSummary>& paths, long long n,
                                         WalkLimitCase limit_case, const TimeSpaceParams& params);

// Number of levels x >= 1 first reached by time t, from recorded passage
// times; equals the running maximum at t whenever the duality holds.
long levels_reached_by(const PathSummary& path, long long t);

// Smallest root of delta * d_curve(delta) = n, for nondecreasing d_curve > 0;
// bracket expansion plus bisection.
double solve_delta(double n, const std::function<double(double)>& d_curve);

}  // namespace rwre
