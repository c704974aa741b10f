#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <doctest.h>

#include "rwre/errors.hpp"
#include "rwre/limit_laws.hpp"
#include "rwre/point_process.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

using namespace rwre;

TEST_SUITE("limit_laws") {

TEST_CASE("measure sampler computes conditional moments exactly") {
    const MeasureSampler centered({1.0}, MeasureMode::centered, 0.0, 2.5);
    CHECK(centered.conditional_mean() == 2.5);
    CHECK(centered.conditional_var() == 1.0);
    CHECK(centered.atoms() == std::vector<double>{1.0});

    const MeasureSampler raw({2.0, 1.0}, MeasureMode::raw, 0.0, 0.0);
    CHECK(raw.conditional_mean() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(raw.conditional_var() == doctest::Approx(5.0).epsilon(1e-15));

    const MeasureSampler trunc({3.0, 0.5, 2.0}, MeasureMode::truncated, 1.0, 0.0);
    CHECK(trunc.atoms() == std::vector<double>{3.0, 2.0});  // floor drops 0.5, sorts the rest
    CHECK(trunc.conditional_var() == doctest::Approx(13.0).epsilon(1e-15));

    CHECK_THROWS_AS(MeasureSampler({1.0}, MeasureMode::raw, -0.1, 0.0), parameter_error);
    CHECK_THROWS_AS(MeasureSampler({0.0}, MeasureMode::raw, 0.0, 0.0), parameter_error);
    FinitePointProcess pp;
    pp.atoms = {1.0};
    CHECK_THROWS_AS(make_sampler(pp, MeasureMode::truncated, 0.0), parameter_error);
}

TEST_CASE("draws realize the prescribed conditional law") {
    Rng rng(11);
    const MeasureSampler unit({1.0}, MeasureMode::raw, 0.0, 0.0);
    const EmpiricalDistribution d = unit.draw_many(2000, rng);
    CHECK(ks_vs_cdf_test(d, [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); }).pass);

    // many equal centered atoms approach a standard normal
    const std::size_t k = 5000;
    const MeasureSampler clt(std::vector<double>(k, 1.0 / std::sqrt(double(k))),
                             MeasureMode::centered, 0.0, 0.0);
    const EmpiricalDistribution g = clt.draw_many(800, rng);
    CHECK(ks_vs_cdf_test(g, [](double x) { return normal_cdf(x); }).pass);

    CHECK_THROWS_AS(unit.draw_many(0, rng), empty_range_error);
}

TEST_CASE("coupled draws isolate the sub-floor atoms") {
    const MeasureSampler s({2.0, 0.3, 0.2}, MeasureMode::centered, 0.0, 0.0);
    Rng r1(5);
    const auto [full, floored] = s.draw_coupled(0.5, r1);
    Rng r2(5);
    const double e1 = r2.exponential(), e2 = r2.exponential(), e3 = r2.exponential();
    CHECK(full == doctest::Approx(2.0 * (e1 - 1.0) + 0.3 * (e2 - 1.0) + 0.2 * (e3 - 1.0)).epsilon(1e-15));
    CHECK(floored == doctest::Approx(2.0 * (e1 - 1.0)).epsilon(1e-15));

    // lowering the floor shrinks the coupling gap in mean square
    const MeasureSampler t({1.0, 0.4, 0.4, 0.3, 0.05, 0.04}, MeasureMode::centered, 0.0, 0.0);
    const std::size_t m = 500;
    double msq_hi = 0.0, msq_lo = 0.0;
    Rng ra(9), rb(9);
    for (std::size_t i = 0; i < m; ++i) {
        const auto [fa, ga] = t.draw_coupled(0.5, ra);
        const auto [fb, gb] = t.draw_coupled(0.1, rb);
        msq_hi += (fa - ga) * (fa - ga);
        msq_lo += (fb - gb) * (fb - gb);
    }
    CHECK(msq_lo < msq_hi);
}

TEST_CASE("centering constants follow the closed forms") {
    CHECK(centering(1.5, 1.0, 0.1).value == doctest::Approx(2.0 * std::sqrt(10.0)).epsilon(1e-12));
    CHECK(centering(1.0, 2.0, std::exp(-1.0)).value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(centering(1.0, 2.0, 1.0).value == 0.0);
    CHECK_THROWS_AS(centering(0.75, 1.0, 0.1), parameter_error);
    CHECK_THROWS_AS(centering(2.0, 1.0, 0.1), parameter_error);
    CHECK_THROWS_AS(centering(1.0, 1.0, 1.5), parameter_error);
    CHECK_THROWS_AS(centering(1.5, 1.0, 0.0), parameter_error);
    CHECK_THROWS_AS(centering(1.5, 0.0, 0.1), parameter_error);

    CHECK(centering_tilde(2.0, 1.0, std::exp(1.0)).value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(centering_tilde(1.0, 0.5, 2.0).value == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK_THROWS_AS(centering_tilde(1.0, 0.5, 0.9), parameter_error);
    CHECK_THROWS_AS(centering_tilde(1.0, 2.5, 2.0), parameter_error);
    CHECK_THROWS_AS(centering_tilde(1.0, 0.0, 2.0), parameter_error);
}

TEST_CASE("block samplers center and scale the crossing times") {
    const std::vector<double> beta = {4.0, 1.0, 9.0, 16.0};
    const MeasureSampler bar = sigma_bar_sampler(beta, 4, 2.0);
    CHECK(bar.mode() == MeasureMode::centered);
    CHECK(bar.conditional_mean() == 0.0);
    CHECK(bar.conditional_var() == doctest::Approx(88.5).epsilon(1e-12));

    const MeasureSampler low = sigma_sampler(beta, 4, 0.75);
    CHECK(low.mode() == MeasureMode::raw);
    CHECK(low.conditional_mean() == doctest::Approx(30.0 * std::pow(4.0, -4.0 / 3.0)).epsilon(1e-12));

    const MeasureSampler one = sigma_sampler(beta, 4, 1.0, 3.0);
    CHECK(one.conditional_mean() == doctest::Approx(30.0 / 4.0 - 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(sigma_sampler(beta, 4, 1.0), parameter_error);

    const MeasureSampler mid = sigma_sampler(beta, 4, 1.5, 2.0);
    CHECK(mid.conditional_mean() ==
          doctest::Approx(30.0 * std::pow(4.0, -2.0 / 3.0) - 2.0 * std::pow(4.0, 1.0 / 3.0))
              .epsilon(1e-12));
    CHECK_THROWS_AS(sigma_sampler(beta, 4, 1.5, -1.0), parameter_error);
}

TEST_CASE("stable cdf at index one half matches the closed form") {
    for (double b : {1.0, 2.5}) {
        const double sigma = M_PI * b / 2.0;
        for (double x : {0.2, 0.5, 1.0, 3.0, 10.0, 100.0}) {
            const double want = std::erfc(std::sqrt(sigma / (2.0 * x)));
            CHECK(stable_cdf(x, 0.5, b) == doctest::Approx(want).epsilon(1e-6));
        }
    }
    CHECK(stable_cdf(0.0, 0.5, 1.0) == 0.0);
    CHECK(stable_cdf(-1.0, 0.5, 1.0) == 0.0);
    CHECK(stable_cdf(std::numeric_limits<double>::infinity(), 0.5, 1.0) == 1.0);
}

TEST_CASE("tail constant and scale helpers hit reference values") {
    CHECK(stable_tail_constant(0.5) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
    CHECK(stable_tail_constant(1.0) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
    CHECK_THROWS_AS(stable_tail_constant(0.0), parameter_error);
    CHECK_THROWS_AS(stable_tail_constant(2.0), parameter_error);

    CHECK(stable_scale_point_sums(0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stable_scale_point_sums(2.0, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(stable_scale_marked_sums(0.5, 0.5) == doctest::Approx(M_PI / 4.0).epsilon(1e-12));
    CHECK_THROWS_AS(stable_scale_point_sums(0.0, 0.5), parameter_error);
    CHECK_THROWS_AS(stable_scale_marked_sums(1.0, 2.0), parameter_error);
}

TEST_CASE("stable cdf scales like a pure scale family away from index one") {
    for (double kappa : {0.75, 1.5}) {
        for (double x : {-2.0, -0.5, 0.5, 1.0, 4.0}) {
            CHECK(stable_cdf(x, kappa, 3.0) == doctest::Approx(stable_cdf(x / 3.0, kappa, 1.0)).epsilon(1e-6));
        }
    }
}

TEST_CASE("upper tail of the stable cdf is pinned by the scale") {
    // x^kappa * P(X > x) -> b^kappa; evaluate where the tail is near 1e-4
    const double b1 = 1.3, x1 = b1 * std::pow(1e4, 1.0 / 0.75);
    CHECK(std::pow(x1, 0.75) * (1.0 - stable_cdf(x1, 0.75, b1)) ==
          doctest::Approx(std::pow(b1, 0.75)).epsilon(0.02));
    const double b2 = 0.8, x2 = b2 * std::pow(1e4, 1.0 / 1.5);
    CHECK(std::pow(x2, 1.5) * (1.0 - stable_cdf(x2, 1.5, b2)) ==
          doctest::Approx(std::pow(b2, 1.5)).epsilon(0.02));
    const double x3 = 1e4;
    CHECK(x3 * (1.0 - stable_cdf(x3, 1.0, 1.0)) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("quantile inverts the cdf") {
    for (double kappa : {0.75, 1.0, 1.5}) {
        for (double p : {0.1, 0.5, 0.9, 0.99}) {
            const double q = stable_quantile(p, kappa, 1.0);
            CHECK(stable_cdf(q, kappa, 1.0) == doctest::Approx(p).epsilon(1e-6));
        }
    }
    CHECK_THROWS_AS(stable_quantile(0.0, 1.5, 1.0), parameter_error);
    CHECK_THROWS_AS(stable_quantile(1.0, 1.5, 1.0), parameter_error);
}

TEST_CASE("direct sampler agrees with the cdf") {
    for (double kappa : {0.75, 1.0, 1.5}) {
        Rng rng(4242);
        std::vector<double> xs(2000);
        for (double& x : xs) x = stable_sample(kappa, 1.0, rng);
        const auto cdf = [&](double x) { return stable_cdf(x, kappa, 1.0); };
        const KsResult r = ks_vs_cdf_test(EmpiricalDistribution(std::move(xs)), cdf);
        INFO("kappa = ", kappa, " distance = ", r.statistic, " p = ", r.p_value);
        CHECK(r.pass);
    }
    Rng rng(1);
    CHECK_THROWS_AS(stable_sample(2.5, 1.0, rng), parameter_error);
    CHECK_THROWS_AS(stable_sample(1.0, 0.0, rng), parameter_error);
    CHECK_THROWS_AS(stable_cdf(1.0, 0.0, 1.0), parameter_error);
    CHECK_THROWS_AS(stable_cdf(1.0, 1.5, -1.0), parameter_error);
}

TEST_CASE("point sums above a vanishing floor approach the stable law") {
    // below index one the raw sum needs no compensation
    const double lambda = 0.5, kappa = 0.5, eps = 1e-4;
    Rng rng(7531);
    const std::size_t m = 1500;
    std::vector<double> sums(m);
    for (double& s : sums) s = sum_atoms(sample_poisson_Nlk(lambda, kappa, eps, rng));
    const double b = stable_scale_point_sums(lambda, kappa);
    const auto cdf = [&](double x) { return stable_cdf(x, kappa, b); };
    CHECK(ks_vs_cdf_test(EmpiricalDistribution(std::move(sums)), cdf).pass);
}

TEST_CASE("marked sums tilt the scale by a gamma factor") {
    const double lambda = 0.5, kappa = 0.5, eps = 1e-4;
    Rng rng(9512);
    const std::size_t m = 1500;
    std::vector<double> sums(m);
    for (double& s : sums) {
        const FinitePointProcess pp = sample_poisson_Nlk(lambda, kappa, eps, rng);
        s = make_sampler(pp, MeasureMode::raw).draw(rng);
    }
    const double b = stable_scale_marked_sums(lambda, kappa);
    const auto cdf = [&](double x) { return stable_cdf(x, kappa, b); };
    CHECK(ks_vs_cdf_test(EmpiricalDistribution(std::move(sums)), cdf).pass);
}

TEST_CASE("compensated point sums at index one recover the stable law") {
    const double lambda = 1.0, eps = 1e-3;
    Rng rng(8642);
    const std::size_t m = 1000;
    std::vector<double> sums(m);
    const double c = centering(1.0, lambda, eps).value;
    for (double& s : sums) s = sum_atoms(sample_poisson_Nlk(lambda, 1.0, eps, rng)) - c;
    // compensating against the mean below 1 leaves the residual shift lambda*(1 - euler_gamma)
    const double shift = lambda * (1.0 - 0.57721566490153286);
    const auto cdf = [&](double x) { return stable_cdf(x - shift, 1.0, lambda); };
    const KsResult r = ks_vs_cdf_test(EmpiricalDistribution(std::move(sums)), cdf);
    INFO("distance = ", r.statistic, " p = ", r.p_value);
    CHECK(r.pass);
}

TEST_CASE("compensated point sums above index one stay near the stable law") {
    // convergence in eps is slow here, so bound the distance instead of testing
    const double lambda = 1.5, kappa = 1.5, eps = 2e-3;
    Rng rng(3690);
    const std::size_t m = 800;
    std::vector<double> sums(m);
    const double c = centering(kappa, lambda, eps).value;
    for (double& s : sums) s = sum_atoms(sample_poisson_Nlk(lambda, kappa, eps, rng)) - c;
    const double b = stable_scale_point_sums(lambda, kappa);
    const double dist = ks_distance_to_cdf(EmpiricalDistribution(std::move(sums)),
                                           [&](double x) { return stable_cdf(x, kappa, b); });
    CHECK(dist < 0.08);
}

TEST_CASE("convolution stability holds at matched floors") {
    Rng rng(20260814);
    const StabilityReport trivial = stability_convolution_check(0.75, 1.0, 1, 1200, 0.05, rng);
    CHECK(trivial.extra_shift == 0.0);
    CHECK(trivial.ks.pass);

    Rng rng_one(20260815);
    const StabilityReport one = stability_convolution_check(1.0, 2.0, 2, 1500, 0.05, rng_one);
    CHECK(one.extra_shift == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(one.ks.pass);

    Rng rng_mid(20260816);
    std::vector<double> conv, single;
    const StabilityReport mid =
        stability_convolution_check(1.5, 1.0, 4, 1500, 0.05, rng_mid, &conv, &single);
    CHECK(conv.size() == 1500);
    CHECK(single.size() == 1500);
    CHECK(mid.ks.pass);

    Rng bad(1);
    CHECK_THROWS_AS(stability_convolution_check(2.0, 1.0, 2, 100, 0.05, bad), parameter_error);
    CHECK_THROWS_AS(stability_convolution_check(1.5, 0.0, 2, 100, 0.05, bad), parameter_error);
    CHECK_THROWS_AS(stability_convolution_check(1.5, 1.0, 0, 100, 0.05, bad), parameter_error);
    CHECK_THROWS_AS(stability_convolution_check(1.5, 1.0, 2, 1, 0.05, bad), parameter_error);
    CHECK_THROWS_AS(stability_convolution_check(1.5, 1.0, 2, 100, 1.5, bad), parameter_error);
}

}  // TEST_SUITE
