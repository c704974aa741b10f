#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "rwre/env.hpp"
#include "rwre/errors.hpp"
#include "rwre/ladder.hpp"
#include "rwre/quenched.hpp"
#include "rwre/stats.hpp"

using namespace rwre;

namespace {

Environment env_from_rho_padded(const std::vector<double>& rho, long pad) {
    std::vector<double> omega;
    for (long i = 0; i < pad; ++i) omega.push_back(2.0 / 3.0);  // rho = 1/2
    for (double r : rho) omega.push_back(1.0 / (1.0 + r));
    for (long i = 0; i < pad; ++i) omega.push_back(2.0 / 3.0);
    return Environment(-pad, omega, 0, false);
}

std::vector<double> exact_pareto(std::size_t n, double kappa, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = std::pow(1.0 - rng.uniform(), -1.0 / kappa);
    return x;
}

}  // namespace

TEST_SUITE("ladder") {

TEST_CASE("constant contraction makes every site a ladder point") {
    std::vector<double> omega(61, 2.0 / 3.0);
    Environment env(-30, omega, 0, false);
    const std::vector<long> nu = ladder_locations(env, 10);
    for (std::size_t i = 0; i < nu.size(); ++i) CHECK(nu[i] == static_cast<long>(i) + 1);
    const std::vector<double> beta = beta_sequence(env, nu);
    for (double b : beta) CHECK(b == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("a prefix excursion shifts the first ladder point") {
    // rho = 2 then 0.4: the product first drops below one at site 2
    const Environment env = env_from_rho_padded({2.0, 0.4, 0.5, 0.5}, 40);
    const std::vector<long> nu = ladder_locations(env, 3);
    CHECK(nu[0] == 2);
    CHECK(nu[1] == 3);
    CHECK(nu[2] == 4);
    CHECK_THROWS_AS(ladder_locations(env, 0), parameter_error);
    CHECK_THROWS_AS(ladder_locations(env, 100), insufficient_window_error);
}

TEST_CASE("block crossing means telescope to the hitting-time mean") {
    const EnvDistribution d = reference_family(0.75);
    const Environment env = sample_env_Q(d, -300, 80, 909);
    const std::vector<long> nu = ladder_locations(env, 8);
    const std::vector<double> beta = beta_sequence(env, nu, 1e-12);
    double total = 0.0;
    for (double b : beta) total += b;
    CHECK(total == doctest::Approx(quenched_mean_T(env, nu.back(), 1e-12).value).epsilon(1e-10));
    CHECK_THROWS_AS(beta_sequence(env, {3, 3}), parameter_error);
}

TEST_CASE("streamed block sequences match materialized environments") {
    const EnvDistribution d = reference_family(0.75);
    const std::uint64_t key = 24601;
    const long depth = 300;
    const BlockSequence bs = sample_block_sequence(d, 6, key, 1e-12, depth);
    const Environment env = sample_env_Q(d, -depth, 200, key);
    const std::vector<long> nu = ladder_locations(env, 6);
    const std::vector<double> beta = beta_sequence(env, nu, 1e-12);
    REQUIRE(bs.nu.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(bs.nu[i] == nu[i]);
        CHECK(bs.beta[i] == doctest::Approx(beta[i]).epsilon(1e-10));
    }
    CHECK(bs.left_attempts >= 1);
    CHECK(bs.w_left > 0.0);
}

TEST_CASE("block sequences are a pure function of their key") {
    const EnvDistribution d = reference_family(0.75);
    const BlockSequence a = sample_block_sequence(d, 10, 5555);
    const BlockSequence b = sample_block_sequence(d, 10, 5555);
    CHECK(a.nu == b.nu);
    CHECK(a.beta == b.beta);
    CHECK(a.w_left == b.w_left);
    const BlockSequence c = sample_block_sequence(d, 10, 5556);
    CHECK(a.nu != c.nu);
}

TEST_CASE("block statistics are stationary across block index") {
    const EnvDistribution d = reference_family(0.75);
    const std::size_t n_envs = 1500;
    std::vector<double> first(n_envs), fifth(n_envs);
    for (std::size_t e = 0; e < n_envs; ++e) {
        const BlockSequence bs = sample_block_sequence(d, 5, derive(321, e));
        first[e] = bs.beta[0];
        fifth[e] = bs.beta[4];
    }
    const KsResult ks =
        ks_two_sample_test(EmpiricalDistribution(first), EmpiricalDistribution(fifth));
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("hill estimator recovers an exact power tail") {
    for (double kappa : {0.75, 1.5}) {
        const std::vector<double> x = exact_pareto(20000, kappa, 13131);
        const TailEstimate est = estimate_tail(x);
        // on an exact power tail the estimate has relative sd 1/sqrt(k)
        const double bound = 4.0 * kappa / std::sqrt(static_cast<double>(est.k_used));
        CHECK(std::abs(est.kappa_hat - kappa) <= bound);
        CHECK(est.c_tilde_hat > 0.5);
        CHECK(est.c_tilde_hat < 2.0);
        CHECK(est.lambda_hat == doctest::Approx(est.kappa_hat * est.c_tilde_hat).epsilon(1e-14));
        CHECK(est.k_used == static_cast<long>(std::ceil(std::sqrt(20000.0))));
    }
}

TEST_CASE("local tail constant is an exact counting statistic") {
    const std::vector<double> x = {1.0, 2.0, 4.0, 8.0};
    // two of four samples exceed 3, so the constant is (2/4) * 3^2
    CHECK(local_tail_constant(x, 3.0, 2.0) == doctest::Approx(4.5).epsilon(1e-15));
    // the count is strict: x = 4 leaves only the 8
    CHECK(local_tail_constant(x, 4.0, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(local_tail_constant(x, 0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(local_tail_constant(x, 8.0, 1.0), parameter_error);
    CHECK_THROWS_AS(local_tail_constant(x, 0.0, 1.0), parameter_error);
    CHECK_THROWS_AS(local_tail_constant(x, 1.0, 0.0), parameter_error);
    CHECK_THROWS_AS(local_tail_constant({}, 1.0, 1.0), parameter_error);
}

TEST_CASE("local tail constant recovers an exact power tail everywhere") {
    const double kappa = 1.5;
    const std::vector<double> x = exact_pareto(200000, kappa, 2468);
    // a unit Pareto has q(x) = x^{-kappa} exactly, so the constant is 1 at
    // any threshold; binomial noise at x is 1/sqrt(n x^{-kappa})
    for (double thr : {2.0, 10.0, 50.0}) {
        const double expect_counts = 200000.0 * std::pow(thr, -kappa);
        const double tol = 4.0 / std::sqrt(expect_counts);
        CHECK(std::abs(local_tail_constant(x, thr, kappa) - 1.0) <= tol);
    }
}

TEST_CASE("hill estimate is scale equivariant") {
    const std::vector<double> x = exact_pareto(5000, 0.75, 999);
    std::vector<double> scaled(x);
    for (auto& v : scaled) v *= 7.0;
    const TailEstimate base = estimate_tail(x);
    const TailEstimate shifted = estimate_tail(scaled);
    CHECK(shifted.kappa_hat == doctest::Approx(base.kappa_hat).epsilon(1e-13));
    CHECK(shifted.c_tilde_hat ==
          doctest::Approx(base.c_tilde_hat * std::pow(7.0, base.kappa_hat)).epsilon(1e-10));
}

TEST_CASE("tail estimation rejects unusable samples") {
    CHECK_THROWS_AS(estimate_tail(std::vector<double>(10, 1.0)), parameter_error);
    std::vector<double> degenerate(100, 0.0);
    degenerate[0] = 5.0;
    CHECK_THROWS_AS(estimate_tail(degenerate), parameter_error);
    const std::vector<double> x = exact_pareto(100, 1.0, 3);
    CHECK_THROWS_AS(estimate_tail(x, 1), parameter_error);
    CHECK_THROWS_AS(estimate_tail(x, 100), parameter_error);
}

TEST_CASE("truncated-mean centerings on a hand sample") {
    const std::vector<double> betas = {1.0, 2.0, 3.0, 10.0};
    CHECK(d_prime(betas, 2.0, 3.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(d_of(betas, 2.0, 3.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(d_double_prime(betas, 3.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(d_double_prime(betas, 0.5) == 0.0);
    CHECK_THROWS_AS(d_prime({}, 1.0, 1.0), parameter_error);
    CHECK_THROWS_AS(d_of(betas, 10.0, 3.0), parameter_error);
}

TEST_CASE("truncated mean of an exact power tail matches the integral") {
    // E[X 1{X <= n}] = kappa/(kappa-1) * (1 - n^{1-kappa}) for a unit Pareto
    const double kappa = 1.5, n = 50.0;
    const std::vector<double> x = exact_pareto(200000, kappa, 777);
    const double want = kappa / (kappa - 1.0) * (1.0 - std::pow(n, 1.0 - kappa));
    const double got = d_double_prime(x, n);
    CHECK(got == doctest::Approx(want).epsilon(0.02));
}

TEST_CASE("bootstrap interval brackets the point estimate") {
    const std::vector<double> x = exact_pareto(3000, 0.75, 4040);
    const TailEstimate est = estimate_tail(x);
    Rng rng(17);
    const HillInterval ci = hill_bootstrap(x, est.k_used, 200, 0.95, rng);
    CHECK(ci.b_resamples == 200);
    CHECK(ci.lo <= est.kappa_hat);
    CHECK(ci.hi >= est.kappa_hat);
    CHECK(ci.lo <= 0.75);
    CHECK(ci.hi >= 0.75);
}

TEST_CASE("ladder spacing mean is exact for constant environments") {
    const EnvDistribution d = EnvDistribution::finite_support({2.0 / 3.0}, {1.0});
    const MeanSe m = estimate_nu_bar(d, 5000, 1);
    CHECK(m.mean == 1.0);
    CHECK(m.se == 0.0);
}

TEST_CASE("ladder spacing mean matches the signed-walk value on a lattice family") {
    // steps +-log 3 with up-probability 1/4: expected first-descent time is 2
    const EnvDistribution d = EnvDistribution::two_point(0.75, 0.25, 0.75);
    const MeanSe m = estimate_nu_bar(d, 200000, 2, 4);
    CHECK(std::abs(m.mean - 2.0) <= 4.0 * m.se);
}

TEST_CASE("ladder spacing estimate is thread-count invariant") {
    const EnvDistribution d = reference_family(0.75);
    const MeanSe one = estimate_nu_bar(d, 20000, 42, 1);
    const MeanSe four = estimate_nu_bar(d, 20000, 42, 4);
    CHECK(one.mean == four.mean);
    CHECK(one.se == four.se);
}

}  // TEST_SUITE
