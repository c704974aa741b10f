#include "rwre/walk.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/quenched.hpp"

namespace rwre {

namespace {

// One nearest-neighbour trajectory driven by next_u(); stops when stop(x)
// says so or the step budget runs out (stopping then is only legal for
// fixed-length runs).
template <class NextU, class Stop>
PathSummary walk_core(const Environment& env, NextU&& next_u, Stop&& stop, const WalkOptions& opts,
                      bool budget_is_error) {
    PathSummary out;
    const long left = env.left();
    const std::vector<long long>* cps = opts.checkpoints;
    std::size_t cp_idx = 0;
    if (cps)
        while (cp_idx < cps->size() && (*cps)[cp_idx] <= 0) {
            out.max_at_checkpoint.push_back(0);
            ++cp_idx;
        }

    long x = 0;
    long long t = 0;
    long max_pos = 0, min_pos = 0;
    long long below = 0;
    while (!stop(x)) {
        if (t >= opts.max_steps) {
            if (budget_is_error)
                throw budget_error("walk exceeded max_steps = " + std::to_string(opts.max_steps));
            break;
        }
        const double u = next_u(x);
        x += u < env.omega(x) ? 1 : -1;
        ++t;
        if (x < left)
            throw window_error("walk stepped below the environment window at site " + std::to_string(x));
        if (x < 0) ++below;
        if (x > max_pos) {
            max_pos = x;
            if (opts.record_level_times) out.level_hit_time.push_back(t);
        }
        if (x < min_pos) min_pos = x;
        if (cps)
            while (cp_idx < cps->size() && (*cps)[cp_idx] == t) {
                out.max_at_checkpoint.push_back(max_pos);
                ++cp_idx;
            }
    }
    out.steps = t;
    out.final_pos = x;
    out.min_pos = min_pos;
    out.max_pos = max_pos;
    out.time_below_zero = below;
    return out;
}

}  // namespace

PathSummary run_to_hit(const Environment& env, long target, Rng& rng, const WalkOptions& opts) {
    if (target <= 0) throw parameter_error("run_to_hit needs target > 0");
    if (!env.contains(target - 1)) throw window_error("run_to_hit target beyond the window");
    PathSummary out = walk_core(
        env, [&rng](long) { return rng.uniform(); }, [target](long x) { return x == target; }, opts,
        /*budget_is_error=*/true);
    out.target = target;
    out.hit_time = out.steps;
    return out;
}

PathSummary run_fixed_steps(const Environment& env, long long n_steps, Rng& rng,
                            const WalkOptions& opts) {
    if (n_steps < 0) throw parameter_error("run_fixed_steps needs n_steps >= 0");
    WalkOptions o = opts;
    o.max_steps = n_steps;
    PathSummary out = walk_core(
        env, [&rng](long) { return rng.uniform(); }, [](long) { return false; }, o,
        /*budget_is_error=*/false);
    out.hit_time = -1;
    return out;
}

CoupledPair coupled_pair_run(const Environment& env_a, const Environment& env_b, long target,
                             std::uint64_t pair_key, const WalkOptions& opts) {
    if (target <= 0) throw parameter_error("coupled_pair_run needs target > 0");
    // The i-th decision at site x reads the same uniform in both runs.
    auto table_u = [pair_key](long x, long long visit) {
        return u01(derive(derive(pair_key, static_cast<std::uint64_t>(x)),
                          static_cast<std::uint64_t>(visit)));
    };
    auto run_one = [&](const Environment& env) {
        const std::size_t span = static_cast<std::size_t>(env.right() - env.left() + 1);
        std::vector<long long> visits(span, 0);
        PathSummary s = walk_core(
            env,
            [&](long x) {
                long long& v = visits[static_cast<std::size_t>(x - env.left())];
                return table_u(x, v++);
            },
            [target](long x) { return x == target; }, opts, /*budget_is_error=*/true);
        s.target = target;
        s.hit_time = s.steps;
        return s;
    };
    return CoupledPair{run_one(env_a), run_one(env_b)};
}

namespace {

// Raw excursion from 0: first step unconditioned, then walk until back at 0
// or at nu. Returns steps taken; reached_nu tells which end closed it.
long long raw_excursion(const Environment& env, long nu, Rng& rng, bool& reached_nu,
                        long long& budget) {
    long x = 0;
    long long t = 0;
    do {
        if (--budget < 0)
            throw budget_error("excursion sampling exhausted its step budget on block [0," +
                               std::to_string(nu) + ")");
        const double u = rng.uniform();
        x += u < env.omega(x) ? 1 : -1;
        ++t;
        if (x < env.left()) throw window_error("excursion stepped below the environment window");
    } while (x != 0 && x != nu);
    reached_nu = x == nu;
    return t;
}

long long conditioned_excursion(const Environment& env, long nu, Rng& rng, bool want_success,
                                long long& budget) {
    for (;;) {
        bool reached_nu = false;
        const long long t = raw_excursion(env, nu, rng, reached_nu, budget);
        if (reached_nu == want_success) return t;
    }
}

}  // namespace

ExcursionDraw excursion_decomposition_sample(const Environment& env, long nu, Rng& rng,
                                             long long step_budget) {
    if (nu < 1) throw parameter_error("excursion decomposition needs nu >= 1");
    if (!env.contains(nu - 1) || env.left() > -1)
        throw window_error("excursion decomposition needs sites [left, nu-1] with left <= -1");

    ExcursionDraw out;
    out.p_success = env.omega(0) * r_sum(env, 0, 0) / r_sum(env, 0, nu - 1);
    out.c_omega = -1.0 / std::log1p(-out.p_success);
    out.tau = rng.exponential();
    out.n_failures = static_cast<long long>(std::floor(out.c_omega * out.tau));

    long long budget = step_budget;
    for (long long j = 0; j < out.n_failures; ++j)
        out.failure_steps_total += conditioned_excursion(env, nu, rng, /*want_success=*/false, budget);
    out.success_steps = conditioned_excursion(env, nu, rng, /*want_success=*/true, budget);
    out.t_nu = out.failure_steps_total + out.success_steps;
    return out;
}

namespace {

struct MeanSeAcc {
    double mean = 0.0, se = 0.0;
};

MeanSeAcc mean_se(const std::vector<double>& v) {
    MeanSeAcc r;
    const double n = static_cast<double>(v.size());
    for (double x : v) r.mean += x;
    r.mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / (n - 1.0) / n);
    return r;
}

}  // namespace

CouplingVarianceReport coupling_variance_check(const Environment& env, long nu, std::size_t n_draws,
                                               Rng& rng) {
    if (n_draws < 256) throw parameter_error("coupling_variance_check needs at least 256 draws");
    CouplingVarianceReport rep;
    rep.beta = quenched_mean_T(env, nu).value;
    rep.p_success = env.omega(0) * r_sum(env, 0, 0) / r_sum(env, 0, nu - 1);
    rep.var_n_exact = (1.0 - rep.p_success) / (rep.p_success * rep.p_success);
    rep.var_t_exact = crossing_second_moments(env, 0, nu - 1).variance_sum();

    long long budget = 1LL << 34;
    std::vector<double> s_samples(n_draws), f_samples(n_draws);
    Rng leg_rng = rng.child(1);
    for (std::size_t i = 0; i < n_draws; ++i)
        s_samples[i] = static_cast<double>(conditioned_excursion(env, nu, leg_rng, true, budget));
    for (std::size_t i = 0; i < n_draws; ++i)
        f_samples[i] = static_cast<double>(conditioned_excursion(env, nu, leg_rng, false, budget));
    const MeanSeAcc s_stat = mean_se(s_samples), f_stat = mean_se(f_samples);
    rep.e_s = s_stat.mean;
    rep.se_e_s = s_stat.se;
    rep.e_f = f_stat.mean;
    rep.se_e_f = f_stat.se;

    // LHS by batched MC over coupled (T_nu, tau) draws
    constexpr std::size_t kBatches = 16;
    std::vector<double> diffs(n_draws);
    Rng draw_rng = rng.child(2);
    for (std::size_t i = 0; i < n_draws; ++i) {
        const ExcursionDraw d = excursion_decomposition_sample(env, nu, draw_rng);
        diffs[i] = static_cast<double>(d.t_nu) - rep.beta * d.tau;
    }
    std::vector<double> batch_var;
    batch_var.reserve(kBatches);
    const std::size_t per = n_draws / kBatches;
    double var_acc = 0.0;
    for (std::size_t b = 0; b < kBatches; ++b) {
        std::vector<double> chunk(diffs.begin() + b * per, diffs.begin() + (b + 1) * per);
        const MeanSeAcc m = mean_se(chunk);
        double ss = 0.0;
        for (double x : chunk) ss += (x - m.mean) * (x - m.mean);
        batch_var.push_back(ss / (static_cast<double>(per) - 1.0));
        var_acc += batch_var.back();
    }
    rep.lhs = var_acc / static_cast<double>(kBatches);
    const MeanSeAcc bv = mean_se(batch_var);
    rep.se_lhs = bv.se;

    rep.rhs = rep.e_s * rep.e_s + rep.e_f * rep.e_f / 3.0 + rep.var_t_exact -
              rep.e_f * rep.e_f * rep.var_n_exact;
    rep.se_rhs = std::sqrt(std::pow(2.0 * rep.e_s * rep.se_e_s, 2) +
                           std::pow(2.0 * rep.e_f * rep.se_e_f * std::abs(1.0 / 3.0 - rep.var_n_exact), 2));
    const double se = std::sqrt(rep.se_lhs * rep.se_lhs + rep.se_rhs * rep.se_rhs);
    rep.pass = rep.lhs <= rep.rhs + 3.0 * se;
    return rep;
}

}  // namespace rwre
