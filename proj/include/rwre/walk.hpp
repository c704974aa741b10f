#pragma once

#include <cstdint>
#include <vector>

#include "rwre/env.hpp"

namespace rwre {

struct WalkOptions {
    // Sorted times at which to record the running maximum.
    const std::vector<long long>* checkpoints = nullptr;
    // Record the first-passage time of every level above 0 reached by the walk.
    bool record_level_times = false;
    // Hard step cap; run_to_hit throws budget_error when it is reached.
    long long max_steps = 4'000'000'000LL;
};

struct PathSummary {
    long target = 0;
    long long hit_time = -1;  // steps to first reach the target (-1 for fixed-length runs)
    long long steps = 0;      // steps actually simulated
    long final_pos = 0;
    long min_pos = 0;
    long max_pos = 0;                         // running maximum at the end
    long long time_below_zero = 0;            // # path indices with position < 0
    std::vector<long> max_at_checkpoint;      // running maximum at each requested time
    std::vector<long long> level_hit_time;    // first-passage time of level x at [x-1]
};

// Simulate from 0 until the walk first reaches `target` (> 0). Stepping below
// the window is a window_error, exceeding max_steps a budget_error.
PathSummary run_to_hit(const Environment& env, long target, Rng& rng, const WalkOptions& opts = {});

// Simulate exactly n_steps steps from 0.
PathSummary run_fixed_steps(const Environment& env, long long n_steps, Rng& rng,
                            const WalkOptions& opts = {});

struct CoupledPair {
    PathSummary first, second;
};

// Run one walk in each environment to the common target, feeding both from
// the same per-(site, visit) uniforms, so they move identically wherever the
// two environments agree. Time spent at non-negative sites then matches step
// for step, which pins |T - T'| = |L - L'| for the below-zero occupations.
CoupledPair coupled_pair_run(const Environment& env_a, const Environment& env_b, long target,
                             std::uint64_t pair_key, const WalkOptions& opts = {});

struct ExcursionDraw {
    double p_success = 0.0;   // chance an excursion from 0 reaches nu before returning
    double c_omega = 0.0;     // -1 / log(1 - p)
    double tau = 0.0;         // the coupled Exp(1) variable
    long long n_failures = 0; // floor(c_omega * tau), geometric with success p
    long long failure_steps_total = 0;
    long long success_steps = 0;  // duration of the final, successful excursion
    long long t_nu = 0;           // total: failures + success
};

// Decompose T_nu into failed return excursions plus one successful crossing,
// each excursion drawn by rejection against its conditioning event. The
// failure count is floor(c_omega * tau) with tau exponential, which is the
// geometric law coupled to tau.
ExcursionDraw excursion_decomposition_sample(const Environment& env, long nu, Rng& rng,
                                             long long step_budget = 1LL << 33);

struct CouplingVarianceReport {
    double beta = 0.0;       // E[T_nu], exact up to window truncation
    double p_success = 0.0;
    double e_s = 0.0, se_e_s = 0.0;  // conditioned MC mean of the success leg
    double e_f = 0.0, se_e_f = 0.0;  // conditioned MC mean of one failure
    double var_t_exact = 0.0;        // summed per-site crossing variances
    double var_n_exact = 0.0;        // (1-p)/p^2
    double lhs = 0.0, se_lhs = 0.0;  // MC variance of T_nu - beta * tau
    double rhs = 0.0, se_rhs = 0.0;
    bool pass = false;               // lhs <= rhs + 3 * combined SE
};

// Monte Carlo check that Var(T_nu - beta*tau) is controlled by
// (E S)^2 + (E F)^2 / 3 + Var(T_nu) - (E F)^2 Var(N).
CouplingVarianceReport coupling_variance_check(const Environment& env, long nu, std::size_t n_draws,
                                               Rng& rng);

}  // namespace rwre
