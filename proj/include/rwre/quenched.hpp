#pragma once

#include <vector>

#include "rwre/env.hpp"

namespace rwre {

enum class ExitSide { left, right };

// Exit probabilities for the walk started at x strictly between i and j:
// right means hitting j before i, left means hitting i before j.
double exit_prob(const Environment& env, long i, long x, long j, ExitSide side);

// E^x[T_{x+1}] = 1 + 2*W_x, the W tail truncated at the window edge.
double crossing_mean(const Environment& env, long x, double tol = 1e-9);

struct QuenchedMeanT {
    double value = 0.0;
    double walk_term = 0.0;      // n
    double interior_term = 0.0;  // 2 * sum_{i<n} W(0,i)
    double boundary_term = 0.0;  // 2 * W_{-1} * R(0,n-1)
};

// Expected hitting time of site n from 0, split into the deterministic part,
// the window-interior sums, and the left-tail boundary contribution.
QuenchedMeanT quenched_mean_T(const Environment& env, long n, double tol = 1e-9);

struct CrossingMoments {
    long first_site = 0;
    std::vector<double> mean;    // E^x[T_{x+1}]
    std::vector<double> second;  // E^x[T_{x+1}^2]
    double truncation_estimate = 0.0;

    double mean_at(long x) const { return mean.at(static_cast<std::size_t>(x - first_site)); }
    double second_at(long x) const { return second.at(static_cast<std::size_t>(x - first_site)); }
    double variance_at(long x) const {
        const double m = mean_at(x);
        return second_at(x) - m * m;
    }
    // Var of T_{x1+1} - T_{x0}: crossing increments are independent.
    double variance_sum() const;
};

// First and second moments of the single-site crossing times for x in
// [x0, x1]. The upward recursion starts at the window edge with a virtual
// below-window site that crosses in exactly one step (left tail absent); the
// seeding error decays by the product of rho across the window.
CrossingMoments crossing_second_moments(const Environment& env, long x0, long x1);

// E^i[T_{i+1} | T_nu < T_0] for 0 <= i < nu, by running the crossing-mean
// recursion on the chain reweighted by the harmonic function
// h(x) = P^x(T_nu < T_0). At i = 0 the conditioned first step is right, so
// the value is exactly 1.
double conditioned_crossing_mean(const Environment& env, long i, long nu);

struct HittingMoments {
    double mean = 0.0;
    double variance = 0.0;
    double mu3 = 0.0;  // central third moment
    double mu4 = 0.0;  // central fourth moment
};

// Moments of the hitting time of n from 0, up to order four, by solving the
// absorbing-chain recursions E^x[(1 + T)^k] with one tridiagonal
// factorization. A down-step at the window edge keeps the walk in place; the
// error of that truncation decays with the product of rho across the window,
// the same convention as the W-based formulas.
HittingMoments hitting_time_moments(const Environment& env, long n);

struct TrapStats {
    long nu = 0;          // block length
    double m_big = 0.0;   // largest prefix product of rho over the block
    long i0 = 0;          // last block-local index attaining it, in [1, nu]
    double m_minus = 1.0; // min interior product strictly left of i0, capped at 1
    double m_plus = 1.0;  // max interior product strictly right of i0, floored at 1
    double conditioned_bound() const {
        const double nv = static_cast<double>(nu);
        return 3.0 * nv * nv * nv * m_plus / (m_minus * m_minus * m_minus);
    }
};

// Trap geometry of the block [a, b): the prefix-product peak and the worst
// interior excursions on each side of it.
TrapStats trap_stats(const Environment& env, long a, long b);

}  // namespace rwre
