#include "rwre/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"

namespace rwre {

std::vector<long> ladder_locations(const Environment& env, std::size_t n_blocks) {
    if (n_blocks == 0) throw parameter_error("ladder_locations needs n_blocks >= 1");
    if (!env.contains(0)) throw window_error("ladder scan starts at site 0");
    std::vector<long> nu;
    nu.reserve(n_blocks);
    double log_pi = 0.0;  // running log product over the open block
    for (long x = 0; x <= env.right(); ++x) {
        log_pi += env.log_rho(x);
        if (log_pi < 0.0) {
            nu.push_back(x + 1);
            if (nu.size() == n_blocks) return nu;
            log_pi = 0.0;
        }
    }
    throw insufficient_window_error("window exhausted after " + std::to_string(nu.size()) + " of " +
                                    std::to_string(n_blocks) + " ladder locations");
}

std::vector<double> beta_sequence(const Environment& env, const std::vector<long>& nu, double tol) {
    if (nu.empty()) throw parameter_error("beta_sequence needs at least one block");
    if (env.left() > -1) throw insufficient_window_error("beta_sequence needs a left tail");
    std::vector<double> beta;
    beta.reserve(nu.size());
    double w = w_inf(env, -1, tol).value;
    long x = 0;
    for (long end : nu) {
        if (end <= x) throw parameter_error("ladder locations must be strictly increasing");
        double acc = 0.0;
        for (; x < end; ++x) {
            const double rho = env.rho(x);
            w = rho * (1.0 + w);
            acc += 1.0 + 2.0 * w;
        }
        beta.push_back(acc);
    }
    return beta;
}

TailEstimate estimate_tail(std::vector<double> sample, long k) {
    const std::size_t n = sample.size();
    if (n < 32) throw parameter_error("estimate_tail needs at least 32 points");
    if (k < 0) k = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n))));
    if (k < 2 || static_cast<std::size_t>(k) + 1 > n)
        throw parameter_error("estimate_tail order-statistic count k out of range");
    std::sort(sample.begin(), sample.end(), std::greater<double>());
    if (!(sample[static_cast<std::size_t>(k)] > 0.0))
        throw parameter_error("estimate_tail needs positive order statistics at the threshold");

    double acc = 0.0;
    const double log_thr = std::log(sample[static_cast<std::size_t>(k)]);
    for (long i = 0; i < k; ++i) acc += std::log(sample[static_cast<std::size_t>(i)]) - log_thr;
    TailEstimate out;
    out.kappa_hat = static_cast<double>(k) / acc;
    out.k_used = k;
    out.n = n;
    out.x_k = sample[static_cast<std::size_t>(k - 1)];
    out.c_tilde_hat =
        static_cast<double>(k) / static_cast<double>(n) * std::pow(out.x_k, out.kappa_hat);
    out.lambda_hat = out.kappa_hat * out.c_tilde_hat;
    return out;
}

double local_tail_constant(const std::vector<double>& sample, double x, double kappa) {
    if (sample.empty()) throw parameter_error("local_tail_constant needs a non-empty sample");
    if (!(x > 0.0) || !(kappa > 0.0))
        throw parameter_error("local_tail_constant needs x > 0 and kappa > 0");
    std::size_t above = 0;
    for (double v : sample)
        if (v > x) ++above;
    if (above == 0) throw parameter_error("local_tail_constant threshold exceeds every sample");
    return static_cast<double>(above) / static_cast<double>(sample.size()) * std::pow(x, kappa);
}

double d_prime(const std::vector<double>& betas, double nu_bar, double n) {
    if (betas.empty()) throw parameter_error("d_prime needs a non-empty sample");
    const double cut = nu_bar * n;
    double acc = 0.0;
    for (double b : betas)
        if (b <= cut) acc += b;
    return acc / static_cast<double>(betas.size());
}

double d_of(const std::vector<double>& betas, double nu_bar, double n) {
    const double m = std::floor(n / nu_bar);
    if (m < 1.0) throw parameter_error("d_of needs n >= nu_bar");
    return m / n * d_prime(betas, nu_bar, m);
}

double d_double_prime(const std::vector<double>& betas, double n) {
    if (betas.empty()) throw parameter_error("d_double_prime needs a non-empty sample");
    double acc = 0.0;
    for (double b : betas)
        if (b <= n) acc += b;
    return acc / static_cast<double>(betas.size());
}

BlockSequence sample_block_sequence(const EnvDistribution& dist, std::size_t n_blocks,
                                    std::uint64_t key, double tol, long left_depth) {
    if (n_blocks == 0) throw parameter_error("sample_block_sequence needs n_blocks >= 1");
    const long depth = left_depth > 0 ? left_depth : suggested_left_depth(dist, tol);

    BlockSequence out;
    // Left tail: rejection until every partial product of rho ending at -1
    // stays below 1, then W_{-1} from the accepted block. A draw that is
    // still above tol at the suggested depth keeps scanning deeper under the
    // same conditioning until the product resolves, so the truncation error
    // of W_{-1} is below tol on every accepted attempt.
    const std::uint64_t attempt_base = derive(key, stream::env_left_attempt);
    const long depth_cap = depth * 64;
    std::vector<double> rho_left;
    rho_left.reserve(static_cast<std::size_t>(depth));
    for (int attempt = 0;; ++attempt) {
        if (attempt >= (1 << 20))
            throw budget_error("left-tail conditioning acceptance too low in sample_block_sequence");
        const std::uint64_t akey = derive(attempt_base, static_cast<std::uint64_t>(attempt));
        rho_left.clear();
        bool ok = true;
        double prod = 1.0;
        for (long d = 1; ok && (d <= depth || prod > tol); ++d) {  // site -d
            if (d > depth_cap)
                throw insufficient_window_error("left tail not resolved: product " +
                                                std::to_string(prod) + " above tol at depth cap");
            const double w = dist.omega_from_u(indexed_u01(akey, -d));
            const double rho = (1.0 - w) / w;
            rho_left.push_back(rho);
            prod *= rho;
            ok = prod < 1.0;
        }
        if (!ok) continue;
        out.left_attempts = attempt + 1;
        break;
    }
    // W_{-1} = sum over k <= -1 of prod rho over [k, -1]
    double pi = 1.0;
    for (double rho : rho_left) {
        pi *= rho;
        out.w_left += pi;
    }

    // Right scan: per-site counter-based draws, so no environment is stored.
    const std::uint64_t site_key = derive(key, stream::env_sites);
    out.nu.reserve(n_blocks);
    out.beta.reserve(n_blocks);
    double w = out.w_left;
    double log_pi = 0.0;
    double acc = 0.0;
    const long max_site = 1L << 26;
    for (long x = 0; x < max_site; ++x) {
        const double omega = dist.omega_from_u(indexed_u01(site_key, x));
        const double rho = (1.0 - omega) / omega;
        w = rho * (1.0 + w);
        acc += 1.0 + 2.0 * w;
        log_pi += std::log1p(-omega) - std::log(omega);  // same rounding as Environment::log_rho
        if (log_pi < 0.0) {
            out.nu.push_back(x + 1);
            out.beta.push_back(acc);
            if (out.nu.size() == n_blocks) return out;
            log_pi = 0.0;
            acc = 0.0;
        }
    }
    throw insufficient_window_error("block scan ran past the site cap");
}

MeanSe estimate_nu_bar(const EnvDistribution& dist, std::size_t n_samples, std::uint64_t seed,
                       int threads) {
    if (n_samples < 2) throw parameter_error("estimate_nu_bar needs n_samples >= 2");
    std::vector<double> lengths(n_samples);
    parallel_for(n_samples, threads, [&](std::size_t i) {
        const std::uint64_t key = derive(derive(seed, stream::scratch), i);
        double log_pi = 0.0;
        for (long x = 0;; ++x) {
            const double omega = dist.omega_from_u(indexed_u01(key, x));
            log_pi += std::log1p(-omega) - std::log(omega);
            if (log_pi < 0.0) {
                lengths[i] = static_cast<double>(x + 1);
                break;
            }
            if (x > (1L << 22)) throw insufficient_window_error("ladder spacing scan ran away");
        }
    });
    MeanSe out;
    for (double v : lengths) out.mean += v;
    out.mean /= static_cast<double>(n_samples);
    double ss = 0.0;
    for (double v : lengths) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (static_cast<double>(n_samples) - 1.0) / static_cast<double>(n_samples));
    return out;
}

}  // namespace rwre
