#pragma once

#include <cstdint>
#include <vector>

#include "rwre/env.hpp"

namespace rwre {

// Ladder locations nu_1 < nu_2 < ... scanning right from 0: each nu is the
// first site after the previous one at which the running product of rho over
// the open block drops below 1. Returns exactly n_blocks locations or throws
// insufficient_window_error naming how many were found.
std::vector<long> ladder_locations(const Environment& env, std::size_t n_blocks);

// Expected block crossing times beta_i = E[T_{nu_i} - T_{nu_{i-1}}], computed
// from per-site crossing means 1 + 2*W_x with the W recursion seeded by the
// left-tail value W_{-1}.
std::vector<double> beta_sequence(const Environment& env, const std::vector<long>& nu,
                                  double tol = 1e-9);

struct TailEstimate {
    double kappa_hat = 0.0;
    double c_tilde_hat = 0.0;  // tail constant: P(X > x) ~ c_tilde * x^{-kappa}
    double lambda_hat = 0.0;   // kappa_hat * c_tilde_hat
    long k_used = 0;
    std::size_t n = 0;
    double x_k = 0.0;          // k-th largest order statistic (threshold)
};

// Hill estimator over the top k order statistics; k < 0 selects the default
// ceil(sqrt(n)), deep enough to tame the variance while keeping the threshold
// far enough out that pre-asymptotic curvature of the tail stays below the
// sampling error.
TailEstimate estimate_tail(std::vector<double> sample, long k = -1);

// Empirical tail constant read off at a fixed threshold: with q the fraction
// of samples strictly above x, returns q * x^kappa. Anchoring the constant at
// the threshold where it will be used makes the estimate a pure counting
// statistic there; an exponent error no longer gets amplified through the
// x^kappa factor. Throws parameter_error when no sample exceeds x.
double local_tail_constant(const std::vector<double>& sample, double x, double kappa);

// Truncated-mean centering statistics from a sample of block crossing times.
double d_prime(const std::vector<double>& betas, double nu_bar, double n);  // mean of beta on {beta <= nu_bar*n}
double d_of(const std::vector<double>& betas, double nu_bar, double n);     // (floor(n/nu_bar)/n) * d_prime at floor(n/nu_bar)
double d_double_prime(const std::vector<double>& betas, double n);          // mean of beta on {beta <= n}

struct BlockSequence {
    std::vector<long> nu;      // ladder locations, nu[i] for block i+1
    std::vector<double> beta;  // matching expected block crossing times
    double w_left = 0.0;       // W_{-1} used to seed the crossing means
    int left_attempts = 0;     // rejections while conditioning the left tail
};

// Fresh ladder-conditioned environment sampled from (dist, key), scanned for
// its first n_blocks blocks. Pure function of its arguments: parallel callers
// just derive one key per index. The environment itself is streamed, never
// materialized, so arbitrarily long block sequences use O(1) memory.
BlockSequence sample_block_sequence(const EnvDistribution& dist, std::size_t n_blocks,
                                    std::uint64_t key, double tol = 1e-12,
                                    long left_depth = -1 /* -1: suggested_left_depth */);

struct MeanSe {
    double mean = 0.0, se = 0.0;
};

// Mean block length under the ladder-conditioned law (equals the spacing mean
// under the plain law); block lengths don't depend on the left tail, so this
// streams sites from 0 with no conditioning step.
MeanSe estimate_nu_bar(const EnvDistribution& dist, std::size_t n_samples, std::uint64_t seed,
                       int threads = 1);

}  // namespace rwre
