#include <cmath>
#include <vector>

#include <doctest.h>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

using namespace rwre;

namespace {

long poisson_draw(double mu, Rng& rng) {
    const double floor_p = std::exp(-mu);
    long k = 0;
    double p = 1.0;
    for (;;) {
        p *= rng.uniform();
        if (p <= floor_p) return k;
        ++k;
    }
}

long binomial_draw(int n, double p, Rng& rng) {
    long s = 0;
    for (int i = 0; i < n; ++i)
        if (rng.uniform() < p) ++s;
    return s;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("empirical distribution sorts, evaluates, and inverts") {
    EmpiricalDistribution d({3.0, 1.0, 2.0});
    CHECK(d.size() == 3);
    CHECK(d.values() == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(d.cdf(0.5) == 0.0);
    CHECK(d.cdf(1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(d.cdf(2.5) == doctest::Approx(2.0 / 3.0));
    CHECK(d.cdf(3.0) == 1.0);
    CHECK(d.quantile(0.0) == 1.0);
    CHECK(d.quantile(1.0 / 3.0) == 1.0);  // order statistic ceil(q*n)
    CHECK(d.quantile(0.34) == 2.0);
    CHECK(d.quantile(0.5) == 2.0);
    CHECK(d.quantile(1.0) == 3.0);
    CHECK_THROWS_AS(d.quantile(-0.1), parameter_error);
    CHECK_THROWS_AS(d.quantile(1.1), parameter_error);
    CHECK_THROWS_AS(EmpiricalDistribution(std::vector<double>{}), empty_range_error);
    CHECK_THROWS_AS(EmpiricalDistribution({1.0, std::nan("")}), parameter_error);
}

TEST_CASE("two-sample distance on hand-checked configurations") {
    CHECK(ks_distance(EmpiricalDistribution({1.0, 2.0, 3.0}), EmpiricalDistribution({1.5})) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    // tied values advance both empirical CDFs before the gap is read
    CHECK(ks_distance(EmpiricalDistribution({1.0, 1.0, 2.0}), EmpiricalDistribution({1.0, 2.0, 2.0})) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    const EmpiricalDistribution same({0.3, 0.7, 0.9});
    CHECK(ks_distance(same, same) == 0.0);
}

TEST_CASE("distance to an analytic CDF on a hand-checked sample") {
    const EmpiricalDistribution d({0.25, 0.75});
    const double dist = ks_distance_to_cdf(d, [](double x) { return x; });
    CHECK(dist == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("kolmogorov tail reproduces the classic critical values") {
    CHECK(kolmogorov_sf(1.3581) == doctest::Approx(0.05).epsilon(2e-3));
    CHECK(kolmogorov_sf(1.6276) == doctest::Approx(0.01).epsilon(2e-3));
    CHECK(kolmogorov_sf(0.0) == 1.0);
    CHECK(kolmogorov_sf(-1.0) == 1.0);
    CHECK(kolmogorov_sf(8.0) == 0.0);
    CHECK(kolmogorov_sf(0.5) > kolmogorov_sf(1.0));
    CHECK(kolmogorov_sf(1.0) > kolmogorov_sf(2.0));
}

TEST_CASE("two-sample test accepts equal laws and rejects different ones") {
    Rng rng(2024);
    std::vector<double> a(800), b(900), c(800);
    for (double& v : a) v = rng.exponential();
    for (double& v : b) v = rng.exponential();
    for (double& v : c) v = 0.5 * rng.exponential();
    const KsResult same = ks_two_sample_test(EmpiricalDistribution(a), EmpiricalDistribution(b));
    CHECK(same.pass);
    CHECK(same.p_value > 0.01);
    CHECK(same.n1 == 800);
    CHECK(same.n2 == 900);
    CHECK(same.statistic ==
          doctest::Approx(ks_distance(EmpiricalDistribution(a), EmpiricalDistribution(b))));
    const KsResult diff = ks_two_sample_test(EmpiricalDistribution(a), EmpiricalDistribution(c));
    CHECK_FALSE(diff.pass);
    CHECK(diff.p_value < 1e-6);
}

TEST_CASE("test against an analytic CDF accepts a matching sample") {
    Rng rng(77);
    std::vector<double> u(1500);
    for (double& v : u) v = rng.uniform();
    const KsResult r = ks_vs_cdf_test(EmpiricalDistribution(std::move(u)), [](double x) {
        return std::min(1.0, std::max(0.0, x));
    });
    CHECK(r.pass);
    const KsResult bad = ks_vs_cdf_test(EmpiricalDistribution({0.9, 0.91, 0.92, 0.95, 0.99}),
                                        [](double x) { return std::min(1.0, std::max(0.0, x)); });
    CHECK_FALSE(bad.pass);
}

TEST_CASE("coupling bound on a constant offset has a closed form") {
    std::vector<double> x(50), y(50);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = static_cast<double>(i);
        y[i] = x[i] + 0.008;
    }
    const ProhorovBound b = prohorov_coupling_bound(x, y);
    CHECK(b.cube_root_mean_square == doctest::Approx(std::cbrt(0.008 * 0.008)).epsilon(1e-12));
    CHECK(b.sqrt_mean_abs == doctest::Approx(std::sqrt(0.008)).epsilon(1e-12));
    CHECK_THROWS_AS(prohorov_coupling_bound({1.0}, {1.0, 2.0}), parameter_error);
    CHECK_THROWS_AS(prohorov_coupling_bound({}, {}), parameter_error);
}

TEST_CASE("transfer check counts mass at distance delta or more") {
    const std::vector<double> x = {0.0, 0.0, 0.0, 0.0};
    const std::vector<double> y = {0.5, 0.0, 0.0, 0.0};
    const TransferCheck ok = transfer_check(x, y, 0.25);
    CHECK(ok.fraction_apart == doctest::Approx(0.25));
    CHECK(ok.pass);  // fraction equals delta exactly
    const TransferCheck bad = transfer_check(x, y, 0.2);
    CHECK(bad.fraction_apart == doctest::Approx(0.25));
    CHECK_FALSE(bad.pass);
    CHECK_THROWS_AS(transfer_check(x, y, 0.0), parameter_error);
    CHECK_THROWS_AS(transfer_check({1.0}, {1.0, 2.0}, 0.1), parameter_error);
}

TEST_CASE("dispersion index is the scaled sum of squared deviations") {
    const DispersionResult r = poisson_dispersion_test({1, 2, 3, 6}, 3.0);
    CHECK(r.mean == doctest::Approx(3.0));
    CHECK(r.index == doctest::Approx(14.0 / 3.0).epsilon(1e-12));
    CHECK(r.pass_mean);
    CHECK_THROWS_AS(poisson_dispersion_test({1}, 1.0), parameter_error);
    CHECK_THROWS_AS(poisson_dispersion_test({1, 2}, 0.0), parameter_error);
}

TEST_CASE("dispersion test separates poisson from binomial counts") {
    Rng rng(314159);
    std::vector<long> pois(2000), binom(2000);
    for (long& c : pois) c = poisson_draw(3.0, rng);
    for (long& c : binom) c = binomial_draw(10, 0.3, rng);
    const DispersionResult good = poisson_dispersion_test(pois, 3.0);
    CHECK(good.pass_dispersion);
    CHECK(good.pass_mean);
    const DispersionResult under = poisson_dispersion_test(binom, 3.0);
    CHECK_FALSE(under.pass_dispersion);  // variance 2.1 against poisson variance 3
    CHECK(under.pass_mean);
    const DispersionResult off_mean = poisson_dispersion_test(pois, 5.0);
    CHECK_FALSE(off_mean.pass_mean);
}

TEST_CASE("chi-square goodness of fit on a fair and a loaded die") {
    Rng rng(654321);
    const std::vector<double> fair(6, 1.0 / 6.0);
    std::vector<long> counts(6, 0);
    for (int i = 0; i < 6000; ++i) {
        auto face = static_cast<std::size_t>(rng.uniform() * 6.0);
        ++counts[face < 6 ? face : 5];
    }
    const GofResult ok = chi_square_gof(counts, fair);
    CHECK(ok.pass);
    CHECK(ok.dof == 5);

    std::vector<long> loaded(6, 0);
    for (int i = 0; i < 6000; ++i) {
        const double u = rng.uniform();
        // face 0 has probability 0.3, others 0.14 each
        const auto face = u < 0.3 ? std::size_t{0} : 1 + static_cast<std::size_t>((u - 0.3) / 0.14);
        ++loaded[face < 6 ? face : 5];
    }
    const GofResult bad = chi_square_gof(loaded, fair);
    CHECK_FALSE(bad.pass);
    CHECK(bad.p_value < 1e-6);
}

TEST_CASE("chi-square statistic and p-value on a two-cell split") {
    const GofResult r = chi_square_gof({60, 40}, {0.5, 0.5});
    CHECK(r.statistic == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.dof == 1);
    CHECK(r.p_value == doctest::Approx(0.045500264).epsilon(1e-6));
}

TEST_CASE("trailing cells pool until expected counts reach five") {
    // geometric(1/2) cells k = 0..7 plus the remaining tail mass
    std::vector<double> probs;
    for (int k = 0; k < 8; ++k) probs.push_back(std::pow(0.5, k + 1));
    probs.push_back(std::pow(0.5, 8));
    const std::vector<long> observed = {100, 50, 25, 13, 6, 3, 2, 1, 0};  // total 200
    const GofResult r = chi_square_gof(observed, probs);
    // expected {100,50,25,12.5,6.25} stand alone, the rest pool into one cell
    CHECK(r.dof == 5);
    CHECK(r.pass);
    // pooling everything into a single cell is refused
    CHECK_THROWS_AS(chi_square_gof({100, 3}, {0.97, 0.03}), parameter_error);
    CHECK_THROWS_AS(chi_square_gof({1, 2, 3}, {0.5, 0.5}), parameter_error);
    CHECK_THROWS_AS(chi_square_gof({0, 0}, {0.5, 0.5}), empty_range_error);
}

TEST_CASE("hill bootstrap brackets the exponent of an exact pareto sample") {
    Rng rng(13579);
    std::vector<double> pareto(1000);
    for (double& v : pareto) v = std::pow(1.0 - rng.uniform(), -1.0);  // tail exponent 1
    Rng boot_rng(24680);
    const HillInterval h = hill_bootstrap(pareto, 100, 400, 0.95, boot_rng);
    CHECK(h.lo <= h.kappa_hat);
    CHECK(h.kappa_hat <= h.hi);
    CHECK(h.lo < 1.0);
    CHECK(h.hi > 1.0);
    CHECK(h.b_resamples == 400);
}

TEST_CASE("hill bootstrap validates its inputs") {
    Rng rng(1);
    std::vector<double> small(10, 1.0);
    CHECK_THROWS_AS(hill_bootstrap(small, 4, 100, 0.95, rng), parameter_error);
    std::vector<double> ok(100, 1.5);
    CHECK_THROWS_AS(hill_bootstrap(ok, 1, 100, 0.95, rng), parameter_error);
    CHECK_THROWS_AS(hill_bootstrap(ok, 100, 100, 0.95, rng), parameter_error);
    CHECK_THROWS_AS(hill_bootstrap(ok, 10, 5, 0.95, rng), parameter_error);
    CHECK_THROWS_AS(hill_bootstrap(ok, 10, 100, 1.0, rng), parameter_error);
    std::vector<double> with_zero(100, 1.0);
    with_zero[3] = 0.0;
    CHECK_THROWS_AS(hill_bootstrap(with_zero, 10, 100, 0.95, rng), parameter_error);
}

TEST_CASE("special functions hit reference values") {
    CHECK(regularized_gamma_p(0.5, 1.0) == doctest::Approx(std::erf(1.0)).epsilon(1e-12));
    CHECK(regularized_gamma_p(1.0, 2.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
    CHECK(regularized_gamma_p(0.5, 0.0) == 0.0);
    CHECK(chi_square_cdf(3.841459, 1.0) == doctest::Approx(0.95).epsilon(1e-6));
    CHECK(chi_square_cdf(0.0, 3.0) == 0.0);
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
    CHECK(normal_cdf(-1.959964) == doctest::Approx(0.025).epsilon(1e-4));
    CHECK_THROWS_AS(regularized_gamma_p(0.0, 1.0), parameter_error);
    CHECK_THROWS_AS(regularized_gamma_p(1.0, -1.0), parameter_error);
    CHECK_THROWS_AS(chi_square_cdf(1.0, 0.0), parameter_error);
}

}  // TEST_SUITE
