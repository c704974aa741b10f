#include "rwre/quenched.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rwre/errors.hpp"

namespace rwre {

double exit_prob(const Environment& env, long i, long x, long j, ExitSide side) {
    if (!(i < x && x < j)) throw parameter_error("exit_prob requires i < x < j");
    if (!env.contains(i) || !env.contains(j - 1))
        throw window_error("exit_prob needs rho on [i, j-1] inside the window");
    const double denom = r_sum(env, i, j - 1);
    if (side == ExitSide::right) return r_sum(env, i, x - 1) / denom;
    return big_pi(env, i, x - 1) * r_sum(env, x, j - 1) / denom;
}

double crossing_mean(const Environment& env, long x, double tol) {
    return 1.0 + 2.0 * w_inf(env, x, tol).value;
}

QuenchedMeanT quenched_mean_T(const Environment& env, long n, double tol) {
    if (n < 1) throw parameter_error("quenched_mean_T needs n >= 1");
    if (env.left() > -1)
        throw insufficient_window_error("quenched_mean_T needs a left tail (window must reach site -1)");
    if (!env.contains(n - 1)) throw window_error("quenched_mean_T needs sites [0, n-1] in the window");

    const double w_left = w_inf(env, -1, tol).value;
    double w0i = 0.0;       // W(0, i), forward recursion
    double pi = 1.0;        // running product of rho over [0, i]
    double sum_w = 0.0;
    double r0 = 0.0;        // R(0, n-1) accumulated as a sum of prefix products
    for (long i = 0; i < n; ++i) {
        const double rho = env.rho(i);
        w0i = rho * (1.0 + w0i);
        sum_w += w0i;
        pi *= rho;
        r0 += pi;
    }
    QuenchedMeanT out;
    out.walk_term = static_cast<double>(n);
    out.interior_term = 2.0 * sum_w;
    out.boundary_term = 2.0 * w_left * r0;
    out.value = out.walk_term + out.interior_term + out.boundary_term;
    return out;
}

double CrossingMoments::variance_sum() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) acc += second[i] - mean[i] * mean[i];
    return acc;
}

CrossingMoments crossingmoments_impl(const Environment& env, long x0, long x1) {
    CrossingMoments out;
    out.first_site = x0;
    out.mean.reserve(static_cast<std::size_t>(x1 - x0 + 1));
    out.second.reserve(static_cast<std::size_t>(x1 - x0 + 1));

    // virtual site below the window: deterministic unit-time crossing
    double m_prev = 1.0, s_prev = 1.0;
    double log_pi = 0.0;
    for (long x = env.left(); x <= x1; ++x) {
        const double w = env.omega(x);
        const double q = 1.0 - w;
        const double m = (1.0 + q * m_prev) / w;
        const double s = (1.0 + q * (s_prev + 2.0 * m_prev * m + 2.0 * (m_prev + m))) / w;
        if (x >= x0) {
            out.mean.push_back(m);
            out.second.push_back(s);
        } else {
            log_pi += env.log_rho(x);
        }
        m_prev = m;
        s_prev = s;
    }
    // seeding error at x0 scales like the product of rho across [left, x0)
    const long depth = x0 - env.left();
    if (depth > 0) {
        const double r = std::exp(log_pi / static_cast<double>(depth));
        const double w_typ = r < 1.0 ? r / (1.0 - r) : std::numeric_limits<double>::infinity();
        out.truncation_estimate = 2.0 * std::exp(log_pi) * std::max(w_typ, 1.0);
    } else {
        out.truncation_estimate = std::numeric_limits<double>::infinity();
    }
    return out;
}

CrossingMoments crossing_second_moments(const Environment& env, long x0, long x1) {
    if (x0 > x1) throw empty_range_error("crossing_second_moments over empty site range");
    if (!env.contains(x0) || !env.contains(x1)) throw window_error("crossing_second_moments outside window");
    return crossingmoments_impl(env, x0, x1);
}

double conditioned_crossing_mean(const Environment& env, long i, long nu) {
    if (nu < 1 || i < 0 || i >= nu) throw parameter_error("conditioned_crossing_mean needs 0 <= i < nu");
    if (!env.contains(0) || !env.contains(nu - 1))
        throw window_error("conditioned_crossing_mean needs sites [0, nu-1] in the window");
    if (i == 0) return 1.0;

    // Unnormalized harmonic function H(x) = R(0, x-1), H(0) = 0; the ratio
    // against H(nu) never matters because the reweighted transition only uses
    // ratios of H at neighbouring sites.
    std::vector<double> H(static_cast<std::size_t>(i) + 2);
    H[0] = 0.0;
    double pi = 1.0;
    double r = 0.0;
    for (long x = 0; x <= i; ++x) {
        pi *= env.rho(x);
        r += pi;
        H[static_cast<std::size_t>(x) + 1] = r;  // H(x+1) = R(0, x)
    }

    double m_prev = 1.0;  // conditioned crossing mean at site 1 (always steps right)
    for (long x = 2; x <= i; ++x) {
        const double w = env.omega(x);
        const double up = w * H[static_cast<std::size_t>(x) + 1];
        const double down = (1.0 - w) * H[static_cast<std::size_t>(x) - 1];
        const double w_hat = up / (up + down);
        m_prev = (1.0 + (1.0 - w_hat) * m_prev) / w_hat;
    }
    return m_prev;
}

HittingMoments hitting_time_moments(const Environment& env, long n) {
    if (n < 1) throw parameter_error("hitting_time_moments needs n >= 1");
    if (!env.contains(n - 1)) throw window_error("hitting_time_moments needs sites [0, n-1] in the window");
    if (env.left() > -1)
        throw insufficient_window_error(
            "hitting_time_moments needs a left tail (window must reach site -1)");

    // Transient sites env.left() .. n-1; the site n is absorbing. A = I - Q
    // is tridiagonal with sub = -(1-omega), diag = 1, super = -omega, except
    // the edge row where the down-step self-loops: diag = omega there.
    const long left = env.left();
    const std::size_t m = static_cast<std::size_t>(n - left);
    std::vector<double> sub(m, 0.0), diag(m, 0.0), super(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double w = env.omega(left + static_cast<long>(i));
        diag[i] = i == 0 ? w : 1.0;
        if (i > 0) sub[i] = -(1.0 - w);
        if (i + 1 < m) super[i] = -w;
    }
    // Thomas factorization, reused by all four solves; A is an M-matrix, so
    // elimination without pivoting is stable.
    std::vector<double> c(m, 0.0);
    c[0] = super[0] / diag[0];
    for (std::size_t i = 1; i + 1 < m; ++i) c[i] = super[i] / (diag[i] - sub[i] * c[i - 1]);
    auto solve = [&](const std::vector<double>& rhs) {
        std::vector<double> u(m);
        u[0] = rhs[0] / diag[0];
        for (std::size_t i = 1; i < m; ++i)
            u[i] = (rhs[i] - sub[i] * u[i - 1]) / (diag[i] - sub[i] * c[i - 1]);
        for (std::size_t i = m - 1; i-- > 0;) u[i] -= c[i] * u[i + 1];
        return u;
    };
    // (Q v)(x) = (1-omega) v(x-1) + omega v(x+1), edge row reading v(x-1) as
    // v(x) and v(n) as zero.
    auto apply_q = [&](const std::vector<double>& v) {
        std::vector<double> out(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double w = env.omega(left + static_cast<long>(i));
            const double down = i == 0 ? v[0] : v[i - 1];
            const double up = i + 1 < m ? v[i + 1] : 0.0;
            out[i] = (1.0 - w) * down + w * up;
        }
        return out;
    };

    std::vector<double> rhs(m, 1.0);
    const std::vector<double> u1 = solve(rhs);
    const std::vector<double> q1 = apply_q(u1);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = 1.0 + 2.0 * q1[i];
    const std::vector<double> u2 = solve(rhs);
    const std::vector<double> q2 = apply_q(u2);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = 1.0 + 3.0 * q1[i] + 3.0 * q2[i];
    const std::vector<double> u3 = solve(rhs);
    const std::vector<double> q3 = apply_q(u3);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = 1.0 + 4.0 * q1[i] + 6.0 * q2[i] + 4.0 * q3[i];
    const std::vector<double> u4 = solve(rhs);

    const std::size_t s = static_cast<std::size_t>(-left);
    const double m1 = u1[s], m2 = u2[s], m3 = u3[s], m4 = u4[s];
    HittingMoments out;
    out.mean = m1;
    out.variance = m2 - m1 * m1;
    out.mu3 = m3 - 3.0 * m2 * m1 + 2.0 * m1 * m1 * m1;
    out.mu4 = m4 - 4.0 * m3 * m1 + 6.0 * m2 * m1 * m1 - 3.0 * m1 * m1 * m1 * m1;
    return out;
}

TrapStats trap_stats(const Environment& env, long a, long b) {
    if (b <= a) throw parameter_error("trap_stats needs a non-empty block [a, b)");
    if (!env.contains(a) || !env.contains(b - 1)) throw window_error("trap_stats block outside window");

    const long nu = b - a;
    // prefix log sums: P[t] = sum of log rho over the first t block sites
    std::vector<double> P(static_cast<std::size_t>(nu) + 1, 0.0);
    for (long t = 1; t <= nu; ++t)
        P[static_cast<std::size_t>(t)] = P[static_cast<std::size_t>(t - 1)] + env.log_rho(a + t - 1);

    TrapStats out;
    out.nu = nu;
    double best = -std::numeric_limits<double>::infinity();
    for (long t = 1; t <= nu; ++t) {
        if (P[static_cast<std::size_t>(t)] >= best) {  // >= keeps the last maximizer
            best = P[static_cast<std::size_t>(t)];
            out.i0 = t;
        }
    }
    out.m_big = std::exp(best);

    double log_min = 0.0;  // competes against the cap exp(0) = 1
    for (long i = 1; i < out.i0; ++i)
        for (long j = i; j < out.i0; ++j)
            log_min = std::min(log_min, P[static_cast<std::size_t>(j + 1)] - P[static_cast<std::size_t>(i)]);
    out.m_minus = std::exp(log_min);

    double log_max = 0.0;
    for (long i = out.i0 + 1; i < nu; ++i)
        for (long j = i; j < nu; ++j)
            log_max = std::max(log_max, P[static_cast<std::size_t>(j + 1)] - P[static_cast<std::size_t>(i)]);
    out.m_plus = std::exp(log_max);
    return out;
}

}  // namespace rwre
